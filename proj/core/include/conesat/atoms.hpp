#ifndef CONESAT_ATOMS_HPP
#define CONESAT_ATOMS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "conesat/formula.hpp"

namespace conesat {

class ResourceLimit : public std::runtime_error {
 public:
  explicit ResourceLimit(const std::string& what)
      : std::runtime_error(what) {}
};

// ---------------------------------------------------------------------------
// Bit-vectors over closure positives
// ---------------------------------------------------------------------------

class Bits {
 public:
  Bits() = default;
  explicit Bits(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  void set(std::size_t i, bool v) {
    std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (v) w_[i >> 6] |= m; else w_[i >> 6] &= ~m;
  }

  friend bool operator==(const Bits&, const Bits&) = default;
  friend auto operator<=>(const Bits& a, const Bits& b) {
    return a.w_ <=> b.w_;
  }

  std::size_t hash() const {
    std::size_t h = 0;
    for (auto w : w_) h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

// ---------------------------------------------------------------------------
// Summaries: per-direction requests and observables as diamond-slot masks
// ---------------------------------------------------------------------------

// Every positive diamond in the closure owns one slot.  A request set along d
// is the slot mask restricted to d's slots; an observable set along d marks
// the d-slots whose body holds in the atom (or in some member of a cluster).
struct Summary {
  std::uint64_t req = 0;
  std::uint64_t obs = 0;

  friend bool operator==(const Summary&, const Summary&) = default;
  friend auto operator<=>(const Summary&, const Summary&) = default;
};

// ---------------------------------------------------------------------------
// Closure analysis
// ---------------------------------------------------------------------------

struct DiamondSlot {
  std::uint32_t entry;   // closure entry index of the diamond
  Direction dir;
  Closure::Ref body;
};

// Derived tables for a closure: the independent bits are the proposition
// letters and the diamond formulas; every other member's truth value follows
// bottom-up.  An atom is precisely a choice of letter bits and diamond bits.
class ClosureContext {
 public:
  explicit ClosureContext(Closure c);

  const Closure& closure() const { return closure_; }

  int letter_count() const { return static_cast<int>(letters_.size()); }
  int diamond_count() const { return static_cast<int>(slots_.size()); }
  const std::vector<DiamondSlot>& slots() const { return slots_; }
  const std::vector<std::uint32_t>& letter_entries() const { return letters_; }

  std::uint64_t dir_mask(Direction d) const {
    return dir_masks_[static_cast<int>(d)];
  }
  std::uint64_t upward_mask() const { return up_mask_; }

  // Slot lookup for a diamond with direction d and body r; -1 if absent.
  int slot_of(Direction d, Closure::Ref r) const;

  // Truth values of all positives under a letter/diamond assignment.
  Bits eval(std::uint32_t letters, std::uint64_t diamonds) const;
  bool eval_ref(Closure::Ref r, std::uint32_t letters,
                std::uint64_t diamonds) const;

  Summary summary_of(std::uint32_t letters, std::uint64_t diamonds) const;
  Summary summary_of_atom(const Bits& atom) const;

  // Distinct observable signatures over all letter assignments, for a fixed
  // request profile; each with the truth value of the closure root.  Sorted
  // for deterministic iteration.
  struct ObsSig {
    std::uint64_t obs;
    bool root;
    std::uint32_t witness_letters;  // least letter assignment realizing it
    friend bool operator==(const ObsSig&, const ObsSig&) = default;
    friend auto operator<=>(const ObsSig&, const ObsSig&) = default;
  };
  std::vector<ObsSig> obs_signatures(std::uint64_t diamonds) const;

  std::string render_slots(std::uint64_t mask) const;

 private:
  Closure closure_;
  std::vector<std::uint32_t> letters_;       // entry indices of letters
  std::vector<int> letter_bit_of_entry_;     // entry -> letter bit or -1
  std::vector<DiamondSlot> slots_;
  std::vector<int> slot_of_entry_;           // entry -> slot or -1
  std::uint64_t dir_masks_[kDirectionCount] = {};
  std::uint64_t up_mask_ = 0;
};

// ---------------------------------------------------------------------------
// Atoms
// ---------------------------------------------------------------------------

struct Atom {
  Bits members;     // bit i set = positive i in the atom
  Summary summary;

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.members == b.members;
  }
  friend auto operator<=>(const Atom& a, const Atom& b) {
    return a.members <=> b.members;
  }
};

// All atoms over the closure, in deterministic order (diamond assignment
// major, letter assignment minor).  Throws ResourceLimit if the number of
// independent bits exceeds max_bits.
std::vector<Atom> enumerate_atoms(const ClosureContext& ctx,
                                  int max_bits = 22);

// Requests/observables of an atom along d, as closure references.
std::vector<Closure::Ref> requests(const ClosureContext& ctx, const Atom& a,
                                   Direction d);
std::vector<Closure::Ref> observables(const ClosureContext& ctx, const Atom& a,
                                      Direction d);

// ---------------------------------------------------------------------------
// Dependency relations
// ---------------------------------------------------------------------------

// The relation between summaries induced by a spatial relation d: for every e
// absorbing d, the e-requests of the source cover the e-requests and
// e-observables of the target, and symmetrically along the inverses.  Works
// uniformly for atoms and for uniform-request clusters.
bool related(const ClosureContext& ctx, const Summary& from, const Summary& to,
             Direction d);

inline bool atom_rel(const ClosureContext& ctx, const Atom& a, const Atom& b,
                     Direction d) {
  return related(ctx, a.summary, b.summary, d);
}

// ---------------------------------------------------------------------------
// Clusters
// ---------------------------------------------------------------------------

// A cluster summarised by its shared request profile and the union of its
// members' observables; members are exactly the atoms whose requests equal
// the profile (request saturation).
struct Cluster {
  std::uint64_t requests = 0;
  std::uint64_t observed = 0;
  std::vector<Atom> atoms;

  Summary summary() const { return {requests, observed}; }
};

inline bool cluster_rel(const ClosureContext& ctx, const Cluster& c,
                        const Cluster& d, Direction dir) {
  return related(ctx, c.summary(), d.summary(), dir);
}
inline bool cluster_rel(const ClosureContext& ctx, const Atom& a,
                        const Cluster& d, Direction dir) {
  return related(ctx, a.summary, d.summary(), dir);
}
inline bool cluster_rel(const ClosureContext& ctx, const Cluster& c,
                        const Atom& b, Direction dir) {
  return related(ctx, c.summary(), b.summary, dir);
}

// Builds the request-saturated cluster for a request profile given as
// direction -> bodies.  Returns nullopt (an unrealizable summary) when some
// requested body has no matching diamond in the closure.
std::optional<Cluster> saturate_cluster(
    const ClosureContext& ctx,
    const std::map<Direction, std::vector<Formula>>& profile,
    int max_bits = 22);

// Same, from a slot mask.
Cluster saturate_cluster(const ClosureContext& ctx, std::uint64_t requests,
                         int max_bits = 22);

}  // namespace conesat

#endif  // CONESAT_ATOMS_HPP
