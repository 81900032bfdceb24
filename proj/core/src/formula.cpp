#include "conesat/formula.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace conesat {

// ---------------------------------------------------------------------------
// Directions
// ---------------------------------------------------------------------------

Direction inverse(Direction d) {
  switch (d) {
    case Direction::North: return Direction::South;
    case Direction::South: return Direction::North;
    case Direction::EastUp: return Direction::WestDown;
    case Direction::EastDown: return Direction::WestUp;
    case Direction::WestUp: return Direction::EastDown;
    case Direction::WestDown: return Direction::EastUp;
  }
  return d;
}

bool is_quadrant(Direction d) {
  return d != Direction::North && d != Direction::South;
}

bool is_upward(Direction d) {
  return d == Direction::North || d == Direction::EastUp ||
         d == Direction::WestUp;
}

bool is_eastward(Direction d) {
  return d == Direction::EastUp || d == Direction::EastDown;
}

const std::vector<Direction>& absorbing(Direction d) {
  static const std::vector<Direction> north = {
      Direction::North, Direction::EastUp, Direction::WestUp};
  static const std::vector<Direction> south = {
      Direction::South, Direction::EastDown, Direction::WestDown};
  static const std::vector<Direction> eu = {Direction::EastUp};
  static const std::vector<Direction> ed = {Direction::EastDown};
  static const std::vector<Direction> wu = {Direction::WestUp};
  static const std::vector<Direction> wd = {Direction::WestDown};
  switch (d) {
    case Direction::North: return north;
    case Direction::South: return south;
    case Direction::EastUp: return eu;
    case Direction::EastDown: return ed;
    case Direction::WestUp: return wu;
    case Direction::WestDown: return wd;
  }
  return north;
}

std::string_view direction_tag(Direction d) {
  switch (d) {
    case Direction::North: return "N";
    case Direction::South: return "S";
    case Direction::EastUp: return "EU";
    case Direction::EastDown: return "ED";
    case Direction::WestUp: return "WU";
    case Direction::WestDown: return "WD";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// AST construction
// ---------------------------------------------------------------------------

namespace {

std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

Formula make_node(FormulaKind kind, std::string name, Direction dir,
                  Formula left, Formula right) {
  auto node = std::make_shared<FormulaNode>();
  node->kind = kind;
  node->name = std::move(name);
  node->dir = dir;
  node->left = std::move(left);
  node->right = std::move(right);
  std::size_t h = static_cast<std::size_t>(kind) * 0x9e3779b9;
  h = hash_combine(h, std::hash<std::string>{}(node->name));
  h = hash_combine(h, static_cast<std::size_t>(node->dir));
  if (node->left) h = hash_combine(h, node->left->hash());
  if (node->right) h = hash_combine(h, node->right->hash());
  node->hash_ = h;
  return node;
}

Formula letter(std::string name) {
  return make_node(FormulaKind::Letter, std::move(name), Direction::North,
                   nullptr, nullptr);
}
Formula truth() {
  return make_node(FormulaKind::True, {}, Direction::North, nullptr, nullptr);
}
Formula falsity() {
  return make_node(FormulaKind::False, {}, Direction::North, nullptr, nullptr);
}
Formula lnot(Formula f) {
  return make_node(FormulaKind::Not, {}, Direction::North, std::move(f),
                   nullptr);
}
Formula land(Formula l, Formula r) {
  return make_node(FormulaKind::And, {}, Direction::North, std::move(l),
                   std::move(r));
}
Formula lor(Formula l, Formula r) {
  return make_node(FormulaKind::Or, {}, Direction::North, std::move(l),
                   std::move(r));
}
Formula diamond(Direction d, Formula f) {
  return make_node(FormulaKind::Diamond, {}, d, std::move(f), nullptr);
}
Formula box(Direction d, Formula f) {
  return make_node(FormulaKind::Box, {}, d, std::move(f), nullptr);
}

bool equal(const Formula& a, const Formula& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->hash() != b->hash() || a->kind != b->kind) return false;
  switch (a->kind) {
    case FormulaKind::Letter:
      return a->name == b->name;
    case FormulaKind::True:
    case FormulaKind::False:
      return true;
    case FormulaKind::Not:
      return equal(a->left, b->left);
    case FormulaKind::And:
    case FormulaKind::Or:
      return equal(a->left, b->left) && equal(a->right, b->right);
    case FormulaKind::Diamond:
    case FormulaKind::Box:
      return a->dir == b->dir && equal(a->left, b->left);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Derived operators
// ---------------------------------------------------------------------------

Formula diamond_ne(Formula f) {
  return diamond(Direction::North, diamond(Direction::EastUp, std::move(f)));
}
Formula diamond_nw(Formula f) {
  return diamond(Direction::North, diamond(Direction::WestUp, std::move(f)));
}
Formula diamond_se(Formula f) {
  return diamond(Direction::South, diamond(Direction::EastDown, std::move(f)));
}
Formula diamond_sw(Formula f) {
  return diamond(Direction::South, diamond(Direction::WestDown, std::move(f)));
}

Formula somewhere(Formula f) {
  Formula out = f;
  for (Direction d : all_directions) out = lor(std::move(out), diamond(d, f));
  return out;
}

Formula everywhere(Formula f) { return lnot(somewhere(lnot(std::move(f)))); }

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

namespace {

Formula negate_norm(const Formula& f) {
  if (f->kind == FormulaKind::Not) return f->left;
  if (f->kind == FormulaKind::True) return falsity();
  if (f->kind == FormulaKind::False) return truth();
  return lnot(f);
}

}  // namespace

Formula normalize(const Formula& f) {
  switch (f->kind) {
    case FormulaKind::Letter:
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Not:
      return negate_norm(normalize(f->left));
    case FormulaKind::And: {
      Formula l = normalize(f->left);
      Formula r = normalize(f->right);
      if (l->kind == FormulaKind::False || r->kind == FormulaKind::False)
        return falsity();
      if (l->kind == FormulaKind::True) return r;
      if (r->kind == FormulaKind::True) return l;
      return land(std::move(l), std::move(r));
    }
    case FormulaKind::Or: {
      Formula l = normalize(f->left);
      Formula r = normalize(f->right);
      if (l->kind == FormulaKind::True || r->kind == FormulaKind::True)
        return truth();
      if (l->kind == FormulaKind::False) return r;
      if (r->kind == FormulaKind::False) return l;
      return lor(std::move(l), std::move(r));
    }
    case FormulaKind::Diamond: {
      Formula c = normalize(f->left);
      if (c->kind == FormulaKind::False) return falsity();
      return diamond(f->dir, std::move(c));
    }
    case FormulaKind::Box: {
      // [d]a == ~<d>~a
      Formula c = negate_norm(normalize(f->left));
      if (c->kind == FormulaKind::False) return truth();
      return negate_norm(diamond(f->dir, std::move(c)));
    }
  }
  return f;
}

Formula expand_derived(const Formula& f) { return normalize(f); }

Formula disjunctive_kernel(const Formula& f) {
  switch (f->kind) {
    case FormulaKind::Letter:
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Not:
      return negate_norm(disjunctive_kernel(f->left));
    case FormulaKind::And: {
      Formula l = disjunctive_kernel(f->left);
      Formula r = disjunctive_kernel(f->right);
      return negate_norm(lor(negate_norm(l), negate_norm(r)));
    }
    case FormulaKind::Or:
      return lor(disjunctive_kernel(f->left), disjunctive_kernel(f->right));
    case FormulaKind::Diamond:
      return diamond(f->dir, disjunctive_kernel(f->left));
    case FormulaKind::Box:
      return disjunctive_kernel(normalize(f));
  }
  return f;
}

// ---------------------------------------------------------------------------
// Mirrors
// ---------------------------------------------------------------------------

namespace {

Formula map_directions(const Formula& f, Direction (*m)(Direction)) {
  switch (f->kind) {
    case FormulaKind::Letter:
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Not:
      return lnot(map_directions(f->left, m));
    case FormulaKind::And:
      return land(map_directions(f->left, m), map_directions(f->right, m));
    case FormulaKind::Or:
      return lor(map_directions(f->left, m), map_directions(f->right, m));
    case FormulaKind::Diamond:
      return diamond(m(f->dir), map_directions(f->left, m));
    case FormulaKind::Box:
      return box(m(f->dir), map_directions(f->left, m));
  }
  return f;
}

Direction mirror_x_dir(Direction d) {
  switch (d) {
    case Direction::EastUp: return Direction::WestUp;
    case Direction::WestUp: return Direction::EastUp;
    case Direction::EastDown: return Direction::WestDown;
    case Direction::WestDown: return Direction::EastDown;
    default: return d;
  }
}

Direction mirror_y_dir(Direction d) {
  switch (d) {
    case Direction::North: return Direction::South;
    case Direction::South: return Direction::North;
    case Direction::EastUp: return Direction::EastDown;
    case Direction::EastDown: return Direction::EastUp;
    case Direction::WestUp: return Direction::WestDown;
    case Direction::WestDown: return Direction::WestUp;
  }
  return d;
}

}  // namespace

Formula mirror_x(const Formula& f) { return map_directions(f, mirror_x_dir); }
Formula mirror_y(const Formula& f) { return map_directions(f, mirror_y_dir); }

std::vector<std::string> letters_of(const Formula& f) {
  std::set<std::string> acc;
  auto walk = [&acc](auto&& self, const Formula& g) -> void {
    if (!g) return;
    if (g->kind == FormulaKind::Letter) acc.insert(g->name);
    self(self, g->left);
    self(self, g->right);
  };
  walk(walk, f);
  return {acc.begin(), acc.end()};
}

// ---------------------------------------------------------------------------
// Plane-to-stripe rewriting
// ---------------------------------------------------------------------------

namespace {

Formula relativize(const Formula& f, const Formula& guard) {
  switch (f->kind) {
    case FormulaKind::Letter:
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Not:
      return negate_norm(relativize(f->left, guard));
    case FormulaKind::And:
      return land(relativize(f->left, guard), relativize(f->right, guard));
    case FormulaKind::Or:
      return lor(relativize(f->left, guard), relativize(f->right, guard));
    case FormulaKind::Diamond:
      return diamond(f->dir, land(guard, relativize(f->left, guard)));
    case FormulaKind::Box:
      return relativize(normalize(f), guard);
  }
  return f;
}

}  // namespace

Formula plane_to_stripe(const Formula& f) {
  auto names = letters_of(f);
  if (std::find(names.begin(), names.end(), kBorderLetter) != names.end())
    throw LetterClash(std::string(kBorderLetter));

  Formula bd = letter(std::string(kBorderLetter));
  Formula not_bd = lnot(bd);

  auto no_escape = [](Direction d) {
    // [d]false == ~<d>true; holds exactly at points with no d-successor.
    return lnot(diamond(d, truth()));
  };
  Formula edge =
      lor(land(no_escape(Direction::EastUp), no_escape(Direction::EastDown)),
          land(no_escape(Direction::WestUp), no_escape(Direction::WestDown)));
  Formula iff = land(lor(lnot(edge), bd), lor(lnot(bd), edge));

  Formula core = relativize(normalize(f), not_bd);
  return normalize(land(land(not_bd, core), everywhere(iff)));
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum Kind {
    Ident, True, False, Tilde, Amp, Pipe, Arrow, LParen, RParen,
    LAngle, RAngle, LBracket, RBracket, Star, End,
  };
  Kind kind;
  std::string text;
  std::size_t pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
    std::size_t start = pos_;
    if (pos_ >= src_.size()) {
      tok_ = {Token::End, "", start};
      return;
    }
    char c = src_[pos_];
    auto single = [&](Token::Kind k) {
      ++pos_;
      tok_ = {k, std::string(1, c), start};
    };
    switch (c) {
      case '~': return single(Token::Tilde);
      case '&': return single(Token::Amp);
      case '|': return single(Token::Pipe);
      case '(': return single(Token::LParen);
      case ')': return single(Token::RParen);
      case '<': return single(Token::LAngle);
      case '>': return single(Token::RAngle);
      case '[': return single(Token::LBracket);
      case ']': return single(Token::RBracket);
      case '*': return single(Token::Star);
      case '-':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
          pos_ += 2;
          tok_ = {Token::Arrow, "->", start};
          return;
        }
        throw ParseError("stray '-'", start);
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[end])) ||
              src_[end] == '_'))
        ++end;
      std::string word(src_.substr(pos_, end - pos_));
      pos_ = end;
      if (word == "true") {
        tok_ = {Token::True, word, start};
      } else if (word == "false") {
        tok_ = {Token::False, word, start};
      } else {
        tok_ = {Token::Ident, word, start};
      }
      return;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'",
                     start);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  Token tok_{Token::End, "", 0};
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  Formula parse_all() {
    Formula f = parse_implies();
    if (lex_.peek().kind != Token::End)
      throw ParseError("trailing input", lex_.peek().pos);
    return f;
  }

 private:
  Formula parse_implies() {
    Formula l = parse_or();
    if (lex_.peek().kind == Token::Arrow) {
      lex_.take();
      Formula r = parse_implies();  // right associative
      return lor(lnot(std::move(l)), std::move(r));
    }
    return l;
  }

  Formula parse_or() {
    Formula l = parse_and();
    while (lex_.peek().kind == Token::Pipe) {
      lex_.take();
      l = lor(std::move(l), parse_and());
    }
    return l;
  }

  Formula parse_and() {
    Formula l = parse_unary();
    while (lex_.peek().kind == Token::Amp) {
      lex_.take();
      l = land(std::move(l), parse_unary());
    }
    return l;
  }

  // DIR tag inside <...> or [...]; returns the fully applied modality.
  Formula apply_modality(bool is_box, std::size_t open_pos) {
    Token t = lex_.take();
    std::string tag;
    if (t.kind == Token::Star) {
      tag = "*";
    } else if (t.kind == Token::Ident) {
      tag = t.text;
    } else {
      throw ParseError("expected direction tag", t.pos);
    }
    Token close = lex_.take();
    if ((is_box && close.kind != Token::RBracket) ||
        (!is_box && close.kind != Token::RAngle))
      throw ParseError(is_box ? "expected ']'" : "expected '>'", close.pos);
    Formula body = parse_unary();

    if (tag == "*")
      return is_box ? everywhere(std::move(body)) : somewhere(std::move(body));

    static const std::unordered_map<std::string, Direction> prim = {
        {"N", Direction::North},    {"S", Direction::South},
        {"EU", Direction::EastUp},  {"ED", Direction::EastDown},
        {"WU", Direction::WestUp},  {"WD", Direction::WestDown}};
    if (auto it = prim.find(tag); it != prim.end())
      return is_box ? box(it->second, std::move(body))
                    : diamond(it->second, std::move(body));

    // Strict cones expand to a vertical step composed with a half-plane step.
    Formula (*mk)(Formula) = nullptr;
    if (tag == "NE") mk = diamond_ne;
    else if (tag == "NW") mk = diamond_nw;
    else if (tag == "SE") mk = diamond_se;
    else if (tag == "SW") mk = diamond_sw;
    if (!mk) throw UnknownModality(tag, open_pos);
    if (is_box) return lnot(mk(lnot(std::move(body))));
    return mk(std::move(body));
  }

  Formula parse_unary() {
    Token t = lex_.peek();
    switch (t.kind) {
      case Token::Tilde:
        lex_.take();
        return lnot(parse_unary());
      case Token::LAngle:
        lex_.take();
        return apply_modality(false, t.pos);
      case Token::LBracket:
        lex_.take();
        return apply_modality(true, t.pos);
      case Token::LParen: {
        lex_.take();
        Formula f = parse_implies();
        Token close = lex_.take();
        if (close.kind != Token::RParen)
          throw ParseError("expected ')'", close.pos);
        return f;
      }
      case Token::Ident:
        lex_.take();
        return letter(t.text);
      case Token::True:
        lex_.take();
        return truth();
      case Token::False:
        lex_.take();
        return falsity();
      default:
        throw ParseError("expected formula", t.pos);
    }
  }

  Lexer lex_;
};

}  // namespace

Formula parse(std::string_view text) {
  Parser p(text);
  return normalize(p.parse_all());
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

// Precedence levels: 3 unary, 2 and, 1 or.
void render_into(const Formula& f, std::string& out, int parent_level) {
  auto paren = [&](int level, auto&& body) {
    bool need = level < parent_level;
    if (need) out += '(';
    body();
    if (need) out += ')';
  };
  switch (f->kind) {
    case FormulaKind::Letter:
      out += f->name;
      return;
    case FormulaKind::True:
      out += "true";
      return;
    case FormulaKind::False:
      out += "false";
      return;
    case FormulaKind::Not: {
      const Formula& c = f->left;
      if (c->kind == FormulaKind::Diamond) {
        // ~<d>~x renders as [d] x, ~<d>x as [d] ~x.
        out += '[';
        out += direction_tag(c->dir);
        out += "] ";
        if (c->left->kind == FormulaKind::Not) {
          render_into(c->left->left, out, 3);
        } else {
          out += '~';
          render_into(c->left, out, 3);
        }
        return;
      }
      out += '~';
      render_into(c, out, 3);
      return;
    }
    case FormulaKind::And:
      paren(2, [&] {
        render_into(f->left, out, 2);
        out += " & ";
        render_into(f->right, out, 2);
      });
      return;
    case FormulaKind::Or:
      paren(1, [&] {
        render_into(f->left, out, 1);
        out += " | ";
        render_into(f->right, out, 1);
      });
      return;
    case FormulaKind::Diamond:
    case FormulaKind::Box:
      out += f->kind == FormulaKind::Diamond ? '<' : '[';
      out += direction_tag(f->dir);
      out += f->kind == FormulaKind::Diamond ? '>' : ']';
      out += ' ';
      render_into(f->left, out, 3);
      return;
  }
}

}  // namespace

std::string render(const Formula& f) {
  std::string out;
  render_into(f, out, 0);
  return out;
}

// ---------------------------------------------------------------------------
// Closure
// ---------------------------------------------------------------------------

Closure::Closure(const Formula& f) {
  root_ = intern(disjunctive_kernel(normalize(f)));
}

Closure::Ref Closure::intern(const Formula& f) {
  if (f->kind == FormulaKind::Not) {
    Ref r = intern(f->left);
    return {r.index, !r.negated};
  }
  if (f->kind == FormulaKind::False) {
    Ref r = intern(truth());
    return {r.index, true};
  }
  if (auto it = index_.find(f); it != index_.end())
    return {it->second, false};

  Entry e;
  e.formula = f;
  e.kind = f->kind;
  switch (f->kind) {
    case FormulaKind::Letter:
    case FormulaKind::True:
      break;
    case FormulaKind::Or:
      e.lhs = intern(f->left);
      e.rhs = intern(f->right);
      break;
    case FormulaKind::Diamond:
      e.dir = f->dir;
      e.body = intern(f->left);
      break;
    default:
      throw std::logic_error("closure: input not in disjunctive kernel form");
  }
  auto idx = static_cast<std::uint32_t>(entries_.size());
  entries_.push_back(std::move(e));
  index_.emplace(f, idx);
  return {idx, false};
}

Closure::Ref Closure::ref_of(const Formula& f) const {
  Formula g = disjunctive_kernel(normalize(f));
  bool neg = false;
  while (g->kind == FormulaKind::Not) {
    neg = !neg;
    g = g->left;
  }
  if (g->kind == FormulaKind::False) {
    g = truth();
    neg = !neg;
  }
  auto it = index_.find(g);
  if (it == index_.end())
    throw std::out_of_range("formula not in closure: " + render(f));
  return {it->second, neg};
}

bool Closure::contains(const Formula& f) const {
  Formula g = disjunctive_kernel(normalize(f));
  while (g->kind == FormulaKind::Not) g = g->left;
  if (g->kind == FormulaKind::False) g = truth();
  return index_.count(g) > 0;
}

std::string Closure::render_ref(Ref r) const {
  std::string s = r.negated ? "~" : "";
  const Formula& f = entries_[r.index].formula;
  if (r.negated && (f->kind == FormulaKind::Or)) {
    return s + "(" + render(f) + ")";
  }
  return s + render(f);
}

Closure closure_of(const Formula& f) { return Closure(f); }

}  // namespace conesat
