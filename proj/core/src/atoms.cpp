#include "conesat/atoms.hpp"

#include <algorithm>

namespace conesat {

// ---------------------------------------------------------------------------
// ClosureContext
// ---------------------------------------------------------------------------

ClosureContext::ClosureContext(Closure c) : closure_(std::move(c)) {
  const auto& entries = closure_.entries();
  letter_bit_of_entry_.assign(entries.size(), -1);
  slot_of_entry_.assign(entries.size(), -1);
  for (std::uint32_t i = 0; i < entries.size(); ++i) {
    switch (entries[i].kind) {
      case FormulaKind::Letter:
        letter_bit_of_entry_[i] = static_cast<int>(letters_.size());
        letters_.push_back(i);
        break;
      case FormulaKind::Diamond: {
        int slot = static_cast<int>(slots_.size());
        if (slot >= 64)
          throw ResourceLimit("more than 64 diamond formulas in closure");
        slot_of_entry_[i] = slot;
        slots_.push_back({i, entries[i].dir, entries[i].body});
        dir_masks_[static_cast<int>(entries[i].dir)] |= std::uint64_t{1}
                                                        << slot;
        break;
      }
      default:
        break;
    }
  }
  for (Direction d : all_directions)
    if (is_upward(d)) up_mask_ |= dir_mask(d);
}

int ClosureContext::slot_of(Direction d, Closure::Ref r) const {
  for (std::size_t s = 0; s < slots_.size(); ++s)
    if (slots_[s].dir == d && slots_[s].body == r) return static_cast<int>(s);
  return -1;
}

Bits ClosureContext::eval(std::uint32_t letters,
                          std::uint64_t diamonds) const {
  const auto& entries = closure_.entries();
  Bits out(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    bool v = false;
    switch (e.kind) {
      case FormulaKind::True:
        v = true;
        break;
      case FormulaKind::Letter:
        v = (letters >> letter_bit_of_entry_[i]) & 1;
        break;
      case FormulaKind::Diamond:
        v = (diamonds >> slot_of_entry_[i]) & 1;
        break;
      case FormulaKind::Or: {
        bool l = out.get(e.lhs.index) != e.lhs.negated;
        bool r = out.get(e.rhs.index) != e.rhs.negated;
        v = l || r;
        break;
      }
      default:
        break;
    }
    out.set(i, v);
  }
  return out;
}

bool ClosureContext::eval_ref(Closure::Ref r, std::uint32_t letters,
                              std::uint64_t diamonds) const {
  Bits b = eval(letters, diamonds);
  return b.get(r.index) != r.negated;
}

Summary ClosureContext::summary_of(std::uint32_t letters,
                                   std::uint64_t diamonds) const {
  Bits b = eval(letters, diamonds);
  Summary s;
  s.req = diamonds;
  for (std::size_t slot = 0; slot < slots_.size(); ++slot) {
    const auto& body = slots_[slot].body;
    if (b.get(body.index) != body.negated) s.obs |= std::uint64_t{1} << slot;
  }
  return s;
}

Summary ClosureContext::summary_of_atom(const Bits& atom) const {
  Summary s;
  for (std::size_t slot = 0; slot < slots_.size(); ++slot) {
    if (atom.get(slots_[slot].entry)) s.req |= std::uint64_t{1} << slot;
    const auto& body = slots_[slot].body;
    if (atom.get(body.index) != body.negated) s.obs |= std::uint64_t{1} << slot;
  }
  return s;
}

std::vector<ClosureContext::ObsSig> ClosureContext::obs_signatures(
    std::uint64_t diamonds) const {
  // Lane-parallel evaluation: lane j of each word is the truth value under
  // letter assignment (block*64 + j).
  const auto& entries = closure_.entries();
  int k = letter_count();
  std::uint64_t total = std::uint64_t{1} << k;
  std::vector<ObsSig> sigs;
  std::vector<std::uint64_t> vals(entries.size());
  std::uint64_t lanes = std::min<std::uint64_t>(total, 64);

  static constexpr std::uint64_t kPattern[6] = {
      0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
      0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};

  for (std::uint64_t block = 0; block * 64 < total; ++block) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      std::uint64_t v = 0;
      switch (e.kind) {
        case FormulaKind::True:
          v = ~std::uint64_t{0};
          break;
        case FormulaKind::Letter: {
          int bit = letter_bit_of_entry_[i];
          if (bit < 6) {
            v = kPattern[bit];
          } else {
            std::uint64_t base = block * 64;
            v = ((base >> bit) & 1) ? ~std::uint64_t{0} : 0;
          }
          break;
        }
        case FormulaKind::Diamond:
          v = ((diamonds >> slot_of_entry_[i]) & 1) ? ~std::uint64_t{0} : 0;
          break;
        case FormulaKind::Or: {
          std::uint64_t l = vals[e.lhs.index];
          if (e.lhs.negated) l = ~l;
          std::uint64_t r = vals[e.rhs.index];
          if (e.rhs.negated) r = ~r;
          v = l | r;
          break;
        }
        default:
          break;
      }
      vals[i] = v;
    }
    std::uint64_t root = vals[closure_.root().index];
    if (closure_.root().negated) root = ~root;
    for (std::uint64_t lane = 0; lane < lanes; ++lane) {
      std::uint64_t obs = 0;
      for (std::size_t slot = 0; slot < slots_.size(); ++slot) {
        const auto& body = slots_[slot].body;
        bool bv = (vals[body.index] >> lane) & 1;
        if (bv != body.negated) obs |= std::uint64_t{1} << slot;
      }
      sigs.push_back({obs, static_cast<bool>((root >> lane) & 1),
                      static_cast<std::uint32_t>(block * 64 + lane)});
    }
  }
  std::sort(sigs.begin(), sigs.end());
  sigs.erase(std::unique(sigs.begin(), sigs.end(),
                         [](const ObsSig& a, const ObsSig& b) {
                           return a.obs == b.obs && a.root == b.root;
                         }),
             sigs.end());
  return sigs;
}

std::string ClosureContext::render_slots(std::uint64_t mask) const {
  std::string out = "{";
  bool first = true;
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    if (!((mask >> s) & 1)) continue;
    if (!first) out += ", ";
    first = false;
    out += closure_.render_ref(slots_[s].body);
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Atoms
// ---------------------------------------------------------------------------

std::vector<Atom> enumerate_atoms(const ClosureContext& ctx, int max_bits) {
  int bits = ctx.letter_count() + ctx.diamond_count();
  if (bits > max_bits)
    throw ResourceLimit("atom enumeration over " + std::to_string(bits) +
                        " independent bits exceeds the configured limit");
  std::vector<Atom> out;
  out.reserve(std::size_t{1} << bits);
  std::uint64_t dtotal = std::uint64_t{1} << ctx.diamond_count();
  std::uint32_t ltotal = std::uint32_t{1} << ctx.letter_count();
  for (std::uint64_t d = 0; d < dtotal; ++d)
    for (std::uint32_t l = 0; l < ltotal; ++l)
      out.push_back({ctx.eval(l, d), ctx.summary_of(l, d)});
  return out;
}

std::vector<Closure::Ref> requests(const ClosureContext& ctx, const Atom& a,
                                   Direction d) {
  std::vector<Closure::Ref> out;
  std::uint64_t m = a.summary.req & ctx.dir_mask(d);
  for (std::size_t s = 0; s < ctx.slots().size(); ++s)
    if ((m >> s) & 1) out.push_back(ctx.slots()[s].body);
  return out;
}

std::vector<Closure::Ref> observables(const ClosureContext& ctx, const Atom& a,
                                      Direction d) {
  std::vector<Closure::Ref> out;
  std::uint64_t m = a.summary.obs & ctx.dir_mask(d);
  for (std::size_t s = 0; s < ctx.slots().size(); ++s)
    if ((m >> s) & 1) out.push_back(ctx.slots()[s].body);
  return out;
}

// ---------------------------------------------------------------------------
// Dependency relations
// ---------------------------------------------------------------------------

bool related(const ClosureContext& ctx, const Summary& from, const Summary& to,
             Direction d) {
  for (Direction e : absorbing(d)) {
    std::uint64_t m = ctx.dir_mask(e);
    if (((to.obs | to.req) & m) & ~from.req) return false;
    std::uint64_t mi = ctx.dir_mask(inverse(e));
    if (((from.obs | from.req) & mi) & ~to.req) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Clusters
// ---------------------------------------------------------------------------

Cluster saturate_cluster(const ClosureContext& ctx, std::uint64_t requests,
                         int max_bits) {
  if (ctx.letter_count() > max_bits)
    throw ResourceLimit("cluster saturation over too many letters");
  Cluster c;
  c.requests = requests;
  std::uint32_t ltotal = std::uint32_t{1} << ctx.letter_count();
  for (std::uint32_t l = 0; l < ltotal; ++l) {
    Atom a{ctx.eval(l, requests), ctx.summary_of(l, requests)};
    c.observed |= a.summary.obs;
    c.atoms.push_back(std::move(a));
  }
  return c;
}

std::optional<Cluster> saturate_cluster(
    const ClosureContext& ctx,
    const std::map<Direction, std::vector<Formula>>& profile, int max_bits) {
  std::uint64_t mask = 0;
  for (const auto& [dir, formulas] : profile) {
    for (const auto& f : formulas) {
      if (!ctx.closure().contains(f)) return std::nullopt;
      int slot = ctx.slot_of(dir, ctx.closure().ref_of(f));
      if (slot < 0) return std::nullopt;
      mask |= std::uint64_t{1} << slot;
    }
  }
  return saturate_cluster(ctx, mask, max_bits);
}

}  // namespace conesat
