#ifndef CONESAT_FORMULA_HPP
#define CONESAT_FORMULA_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace conesat {

// ---------------------------------------------------------------------------
// Directions
// ---------------------------------------------------------------------------

// The six primitive spatial relations over the plane: two vertical rays and
// four half-open quadrants.  Deltas are relative to the source point:
//   N  (dx=0, dy>0)    S  (dx=0, dy<0)
//   EU (dx>0, dy>=0)   ED (dx>0, dy<=0)
//   WU (dx<0, dy>=0)   WD (dx<0, dy<=0)
enum class Direction : std::uint8_t {
  North = 0,
  South = 1,
  EastUp = 2,
  EastDown = 3,
  WestUp = 4,
  WestDown = 5,
};

inline constexpr int kDirectionCount = 6;

inline constexpr std::array<Direction, 6> all_directions = {
    Direction::North,    Direction::South,   Direction::EastUp,
    Direction::EastDown, Direction::WestUp,  Direction::WestDown};

inline constexpr std::array<Direction, 4> quadrant_directions = {
    Direction::EastUp, Direction::EastDown, Direction::WestUp,
    Direction::WestDown};

Direction inverse(Direction d);
bool is_quadrant(Direction d);
bool is_upward(Direction d);   // N, EU, WU
bool is_eastward(Direction d); // EU, ED

// Directions e whose relation absorbs d on the right: e . d is contained in e.
// These are exactly the relations along which requests must propagate when a
// point moves one step along d.
const std::vector<Direction>& absorbing(Direction d);

std::string_view direction_tag(Direction d);

// ---------------------------------------------------------------------------
// Formula AST
// ---------------------------------------------------------------------------

enum class FormulaKind : std::uint8_t {
  Letter,
  True,
  False,
  Not,
  And,
  Or,
  Diamond,
  Box,
};

class FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

class FormulaNode {
 public:
  FormulaKind kind;
  std::string name;       // Letter
  Direction dir;          // Diamond / Box
  Formula left, right;    // children (unary ops use left)

  std::size_t hash() const { return hash_; }

 private:
  friend Formula make_node(FormulaKind, std::string, Direction, Formula,
                           Formula);
  std::size_t hash_ = 0;
};

// Structural equality / hashing (hash is cached per node).
bool equal(const Formula& a, const Formula& b);

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f->hash(); }
};
struct FormulaEq {
  bool operator()(const Formula& a, const Formula& b) const {
    return equal(a, b);
  }
};

// Constructors.  These perform no simplification.
Formula letter(std::string name);
Formula truth();
Formula falsity();
Formula lnot(Formula f);
Formula land(Formula l, Formula r);
Formula lor(Formula l, Formula r);
Formula diamond(Direction d, Formula f);
Formula box(Direction d, Formula f);

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string msg, std::size_t position)
      : std::runtime_error(std::move(msg)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class UnknownModality : public ParseError {
 public:
  UnknownModality(std::string tag, std::size_t position)
      : ParseError("unknown modality <" + tag + ">", position),
        tag_(std::move(tag)) {}
  const std::string& modality() const { return tag_; }

 private:
  std::string tag_;
};

class LetterClash : public std::runtime_error {
 public:
  explicit LetterClash(const std::string& name)
      : std::runtime_error("reserved letter already occurs in formula: " +
                           name) {}
};

// ---------------------------------------------------------------------------
// Parsing and printing
// ---------------------------------------------------------------------------

// Parses the textual grammar:
//   phi ::= IDENT | "true" | "false" | "~" phi | phi "&" phi | phi "|" phi
//         | phi "->" phi | "<" DIR ">" phi | "[" DIR "]" phi | "(" phi ")"
//   DIR ::= N | S | EU | ED | WU | WD | NE | NW | SE | SW | *
// Precedence: unary > & > | > -> (right associative).  '#' starts a line
// comment.  Derived modalities (NE/NW/SE/SW/*) survive parsing as two-step
// compositions resp. somewhere/everywhere expansions; the result is a
// normalized AST (boxes stored as negated diamonds, double negation
// eliminated, implication desugared).
Formula parse(std::string_view text);

// Renders with minimal parentheses; parse(render(f)) == f for normalized f.
std::string render(const Formula& f);

// ---------------------------------------------------------------------------
// Transformations
// ---------------------------------------------------------------------------

// Rewrites derived operators into the six primitive modalities:
//   <NE> a -> <N><EU> a      (and NW/SE/SW analogously)
//   <*> a  -> a | <N>a | <S>a | <EU>a | <ED>a | <WU>a | <WD>a
//   [*] a  -> dual of the above
// The parser runs this internally; it is exposed for programmatic ASTs built
// with the surface constructors below.
Formula expand_derived(const Formula& f);

// Surface constructors for derived operators (expand_derived removes them).
Formula diamond_ne(Formula f);
Formula diamond_nw(Formula f);
Formula diamond_se(Formula f);
Formula diamond_sw(Formula f);
Formula somewhere(Formula f);
Formula everywhere(Formula f);

// Normal form used by the rest of the system: only Letter/True/False/Not/
// And/Or/Diamond nodes, no double negation, boxes as negated diamonds,
// boolean constants folded (Diamond(d, false) folds to false; Diamond(d,
// true) is kept, since border points falsify it).
Formula normalize(const Formula& f);

// Conjunction-free kernel: rewrites And(l, r) into ~(~l | ~r) so that closure
// construction only deals with disjunctions.
Formula disjunctive_kernel(const Formula& f);

// Mirror symmetries; both are involutions and commute with each other.
Formula mirror_x(const Formula& f);  // swaps EU<->WU, ED<->WD
Formula mirror_y(const Formula& f);  // swaps N<->S, EU<->ED, WU<->WD

// Collects the proposition letters occurring in f.
std::vector<std::string> letters_of(const Formula& f);

// Equi-satisfiable rewriting from plane semantics to closed-stripe semantics.
// Returns ~bd & rel(f) & [*]((([EU]false & [ED]false) | ([WU]false &
// [WD]false)) <-> bd), where rel relativizes every diamond body to ~bd.
// Throws LetterClash if the border letter "bd" occurs in f.
Formula plane_to_stripe(const Formula& f);

inline constexpr std::string_view kBorderLetter = "bd";

// ---------------------------------------------------------------------------
// Closure
// ---------------------------------------------------------------------------

// Positive members of the closure of a normalized, conjunction-free formula,
// ordered by post-order of first occurrence.  Negative members are implicit:
// an atom is a bit-vector over this list (bit set = member, clear = its
// negation).
class Closure {
 public:
  // A reference to a closure member with a sign: (index, negated).
  struct Ref {
    std::uint32_t index = 0;
    bool negated = false;
    friend bool operator==(const Ref&, const Ref&) = default;
    friend auto operator<=>(const Ref&, const Ref&) = default;
  };

  struct Entry {
    Formula formula;
    FormulaKind kind;       // Letter, True, Or, or Diamond
    Ref lhs, rhs;           // Or operands
    Direction dir;          // Diamond direction
    Ref body;               // Diamond body
  };

  explicit Closure(const Formula& f);

  std::size_t size() const { return entries_.size(); }
  const Entry& entry(std::size_t i) const { return entries_[i]; }
  const std::vector<Entry>& entries() const { return entries_; }

  // Reference to the whole input formula.
  Ref root() const { return root_; }

  // Index lookup for a closure member; formulas of the form ~g resolve to a
  // negated reference to g.
  Ref ref_of(const Formula& f) const;
  bool contains(const Formula& f) const;

  std::string render_ref(Ref r) const;

 private:
  Ref intern(const Formula& f);

  std::vector<Entry> entries_;
  std::unordered_map<Formula, std::uint32_t, FormulaHash, FormulaEq> index_;
  Ref root_;
};

// Convenience: normalize + kernel + closure.
Closure closure_of(const Formula& f);

}  // namespace conesat

#endif  // CONESAT_FORMULA_HPP
