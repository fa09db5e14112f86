#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ltlsem {

// Operator kinds. The enum order doubles as the rank used by the canonical
// total order on formulas, so do not reorder.
enum class Op : std::uint8_t {
  True,
  False,
  Atom,
  Not,
  Next,
  Finally,
  Globally,
  And,
  Or,
  Until,
};

// Immutable LTL term. Construction goes through the static factories, which
// keep n-ary conjunctions/disjunctions flattened, deduplicated, sorted and
// constant-folded. Deeper rewrites (double negation, FF/GG collapse,
// implication-based subsumption) live in canonicalize().
class Formula {
public:
  Formula() : Formula(tt()) {}

  static Formula tt() { return leaf(Op::True); }
  static Formula ff() { return leaf(Op::False); }

  static Formula atom(std::string name) {
    return Formula(std::make_shared<Node>(Op::Atom, std::move(name), std::vector<Formula>{}));
  }

  static Formula negate(Formula f) {
    if (f.is_tt()) return ff();
    if (f.is_ff()) return tt();
    return unary(Op::Not, std::move(f));
  }

  static Formula next(Formula f) {
    if (f.is_tt() || f.is_ff()) return f;
    return unary(Op::Next, std::move(f));
  }

  static Formula finally(Formula f) {
    if (f.is_tt() || f.is_ff()) return f;
    return unary(Op::Finally, std::move(f));
  }

  static Formula globally(Formula f) {
    if (f.is_tt() || f.is_ff()) return f;
    return unary(Op::Globally, std::move(f));
  }

  static Formula until(Formula lhs, Formula rhs) {
    if (rhs.is_tt() || rhs.is_ff()) return rhs;
    if (lhs.is_ff()) return rhs;
    if (lhs.is_tt()) return finally(std::move(rhs));  // F is the tt-guard abbreviation
    std::vector<Formula> kids;
    kids.push_back(std::move(lhs));
    kids.push_back(std::move(rhs));
    return Formula(std::make_shared<Node>(Op::Until, std::string{}, std::move(kids)));
  }

  static Formula conj(std::vector<Formula> parts) { return nary(Op::And, std::move(parts)); }
  static Formula disj(std::vector<Formula> parts) { return nary(Op::Or, std::move(parts)); }

  Op op() const { return node_->op; }
  const std::string& name() const { return node_->name; }
  const std::vector<Formula>& children() const { return node_->kids; }
  const Formula& child(std::size_t i = 0) const { return node_->kids[i]; }
  std::size_t hash() const { return node_->hash; }

  bool is_tt() const { return op() == Op::True; }
  bool is_ff() const { return op() == Op::False; }
  bool is_atom() const { return op() == Op::Atom; }
  bool is_literal() const {
    return is_atom() || (op() == Op::Not && child().is_atom());
  }

  friend int compare(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return 0;
    if (a.op() != b.op())
      return static_cast<int>(a.op()) < static_cast<int>(b.op()) ? -1 : 1;
    if (a.op() == Op::Atom) return a.name().compare(b.name());
    const auto& x = a.children();
    const auto& y = b.children();
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
      if (int c = compare(x[i], y[i]); c != 0) return c;
    }
    if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
    return 0;
  }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->hash != b.node_->hash) return false;
    return compare(a, b) == 0;
  }
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }
  friend bool operator<(const Formula& a, const Formula& b) { return compare(a, b) < 0; }

private:
  struct Node {
    Node(Op o, std::string n, std::vector<Formula> k)
        : op(o), name(std::move(n)), kids(std::move(k)), hash(compute_hash(op, name, kids)) {}
    Op op;
    std::string name;
    std::vector<Formula> kids;
    std::size_t hash;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static std::size_t compute_hash(Op op, const std::string& name,
                                  const std::vector<Formula>& kids) {
    std::size_t h = 0x9e3779b9u + static_cast<std::size_t>(op);
    for (char c : name) h = h * 131 + static_cast<unsigned char>(c);
    for (const Formula& k : kids) h ^= k.hash() + 0x9e3779b9u + (h << 6) + (h >> 2);
    return h;
  }

  static Formula leaf(Op op) {
    return Formula(std::make_shared<Node>(op, std::string{}, std::vector<Formula>{}));
  }

  static Formula unary(Op op, Formula f) {
    std::vector<Formula> kids;
    kids.push_back(std::move(f));
    return Formula(std::make_shared<Node>(op, std::string{}, std::move(kids)));
  }

  static Formula nary(Op op, std::vector<Formula> parts) {
    const bool is_and = op == Op::And;
    std::vector<Formula> flat;
    flat.reserve(parts.size());
    for (Formula& p : parts) {
      if (p.op() == op) {
        for (const Formula& c : p.children()) flat.push_back(c);
      } else {
        flat.push_back(std::move(p));
      }
    }
    std::vector<Formula> kept;
    kept.reserve(flat.size());
    for (Formula& f : flat) {
      if (is_and) {
        if (f.is_ff()) return ff();
        if (f.is_tt()) continue;
      } else {
        if (f.is_tt()) return tt();
        if (f.is_ff()) continue;
      }
      kept.push_back(std::move(f));
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    if (kept.empty()) return is_and ? tt() : ff();
    if (kept.size() == 1) return kept.front();
    return Formula(std::make_shared<Node>(op, std::string{}, std::move(kept)));
  }

  std::shared_ptr<const Node> node_;
};

inline std::size_t node_count(const Formula& f) {
  std::size_t n = 1;
  for (const Formula& c : f.children()) n += node_count(c);
  return n;
}

// Sound, deliberately incomplete implication test: a true result guarantees
// f |= g, a false result means nothing. The rules are the usual temporal
// monotonicity laws plus conjunct/disjunct decomposition, chained through
// recursion (each call strictly shrinks the pair, so this terminates).
inline bool implies_syntactic(const Formula& f, const Formula& g) {
  if (f == g) return true;
  if (f.is_ff() || g.is_tt()) return true;
  if (f.op() == Op::And) {
    for (const Formula& c : f.children())
      if (implies_syntactic(c, g)) return true;
  }
  if (g.op() == Op::Or) {
    for (const Formula& d : g.children())
      if (implies_syntactic(f, d)) return true;
  }
  if (f.op() == Op::Or) {
    bool all = true;
    for (const Formula& c : f.children())
      if (!implies_syntactic(c, g)) { all = false; break; }
    if (all) return true;
  }
  if (g.op() == Op::And) {
    bool all = true;
    for (const Formula& d : g.children())
      if (!implies_syntactic(f, d)) { all = false; break; }
    if (all) return true;
  }
  // G f' => f' => g
  if (f.op() == Op::Globally && implies_syntactic(f.child(), g)) return true;
  // f => g' => F g'
  if (g.op() == Op::Finally && implies_syntactic(f, g.child())) return true;
  if (f.op() == Op::Finally && g.op() == Op::Finally) {
    // monotonicity, and F f' => F F psi = F psi when f' => F psi
    if (implies_syntactic(f.child(), g.child())) return true;
    if (implies_syntactic(f.child(), g)) return true;
  }
  if (f.op() == Op::Globally && g.op() == Op::Globally) {
    if (implies_syntactic(f.child(), g.child())) return true;
    if (implies_syntactic(f, g.child())) return true;  // G f' => psi pointwise
  }
  if (f.op() == Op::Next && g.op() == Op::Next)
    return implies_syntactic(f.child(), g.child());
  if (f.op() == Op::Until && g.op() == Op::Until) {
    if (implies_syntactic(f.child(0), g.child(0)) &&
        implies_syntactic(f.child(1), g.child(1)))
      return true;
  }
  // phi U psi => F psi
  if (f.op() == Op::Until && implies_syntactic(Formula::finally(f.child(1)), g))
    return true;
  // psi => phi U psi (witness at the first position)
  if (g.op() == Op::Until && implies_syntactic(f, g.child(1))) return true;
  return false;
}

namespace detail {

inline std::vector<Formula> prune_subsumed(const std::vector<Formula>& parts, bool disjunction) {
  std::vector<bool> dropped(parts.size(), false);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = 0; j < parts.size(); ++j) {
      if (i == j || dropped[j]) continue;
      const bool subsumed = disjunction ? implies_syntactic(parts[i], parts[j])
                                        : implies_syntactic(parts[j], parts[i]);
      if (subsumed) { dropped[i] = true; break; }
    }
  }
  std::vector<Formula> kept;
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (!dropped[i]) kept.push_back(parts[i]);
  return kept;
}

inline Formula canonicalize_once(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return f;
    case Op::Not: {
      Formula c = canonicalize_once(f.child());
      if (c.op() == Op::Not) return c.child();
      return Formula::negate(c);
    }
    case Op::Next:
      return Formula::next(canonicalize_once(f.child()));
    case Op::Finally: {
      Formula c = canonicalize_once(f.child());
      if (c.op() == Op::Finally) c = c.child();
      return Formula::finally(c);
    }
    case Op::Globally: {
      Formula c = canonicalize_once(f.child());
      if (c.op() == Op::Globally) c = c.child();
      return Formula::globally(c);
    }
    case Op::Until:
      return Formula::until(canonicalize_once(f.child(0)), canonicalize_once(f.child(1)));
    case Op::And:
    case Op::Or: {
      const bool disjunction = f.op() == Op::Or;
      std::vector<Formula> parts;
      parts.reserve(f.children().size());
      for (const Formula& c : f.children()) parts.push_back(canonicalize_once(c));
      Formula rebuilt = disjunction ? Formula::disj(std::move(parts)) : Formula::conj(std::move(parts));
      if (rebuilt.op() != f.op()) return rebuilt;
      std::vector<Formula> kept = prune_subsumed(rebuilt.children(), disjunction);
      if (kept.size() == rebuilt.children().size()) return rebuilt;
      return disjunction ? Formula::disj(std::move(kept)) : Formula::conj(std::move(kept));
    }
  }
  return f;
}

}  // namespace detail

// Canonical simplification to fixpoint. Canonical formulas serve as state
// identities in the automaton, so this must be deterministic and idempotent.
inline Formula canonicalize(const Formula& f) {
  Formula cur = f;
  for (int round = 0; round < 64; ++round) {
    Formula nxt = detail::canonicalize_once(cur);
    if (nxt == cur) return cur;
    cur = nxt;
  }
  throw std::logic_error("canonicalize did not converge");
}

namespace detail {

inline bool needs_parens_as_binary_operand(const Formula& f) {
  return !(f.is_atom() || f.is_tt() || f.is_ff());
}

inline bool needs_parens_as_unary_operand(const Formula& f) {
  switch (f.op()) {
    case Op::And:
    case Op::Or:
    case Op::Until:
      return true;
    default:
      return false;
  }
}

inline void render_into(const Formula& f, std::string& out) {
  auto wrapped = [&out](const Formula& g, bool parens) {
    if (parens) out.push_back('(');
    render_into(g, out);
    if (parens) out.push_back(')');
  };
  switch (f.op()) {
    case Op::True: out += "true"; return;
    case Op::False: out += "false"; return;
    case Op::Atom: out += f.name(); return;
    case Op::Not:
      out.push_back('!');
      wrapped(f.child(), needs_parens_as_unary_operand(f.child()));
      return;
    case Op::Next:
    case Op::Finally:
    case Op::Globally:
      out.push_back(f.op() == Op::Next ? 'X' : f.op() == Op::Finally ? 'F' : 'G');
      out.push_back(' ');
      wrapped(f.child(), needs_parens_as_unary_operand(f.child()));
      return;
    case Op::Until:
      wrapped(f.child(0), needs_parens_as_binary_operand(f.child(0)));
      out += " U ";
      wrapped(f.child(1), needs_parens_as_binary_operand(f.child(1)));
      return;
    case Op::And:
    case Op::Or: {
      const char* sep = f.op() == Op::And ? " & " : " | ";
      bool first = true;
      for (const Formula& c : f.children()) {
        if (!first) out += sep;
        first = false;
        wrapped(c, needs_parens_as_binary_operand(c));
      }
      return;
    }
  }
}

}  // namespace detail

// Text form that reparses to a structurally identical formula.
inline std::string render(const Formula& f) {
  std::string out;
  detail::render_into(f, out);
  return out;
}

// Syntax-tree height. Conjunction/disjunction breadth is measured separately,
// so n-ary And/Or nodes are transparent here; atoms and constants have
// height 1 and every other operator adds one level.
inline int height(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return 1;
    case Op::And:
    case Op::Or: {
      int h = 1;
      for (const Formula& c : f.children()) h = std::max(h, height(c));
      return h;
    }
    default: {
      int h = 0;
      for (const Formula& c : f.children()) h = std::max(h, height(c));
      return h + 1;
    }
  }
}

namespace detail {
inline int connective_count(const Formula& f, Op op) {
  int n = f.op() == op ? static_cast<int>(f.children().size()) - 1 : 0;
  for (const Formula& c : f.children()) n += connective_count(c, op);
  return n;
}
}  // namespace detail

// Number of binary conjunctions after flattening (an n-ary node counts n-1).
inline int conjunct_count(const Formula& f) { return detail::connective_count(f, Op::And); }
inline int disjunct_count(const Formula& f) { return detail::connective_count(f, Op::Or); }

// True when no Globally occurs anywhere, i.e. the formula is satisfied by a
// finite prefix and an episode may terminate early on acceptance.
inline bool is_guarantee(const Formula& f) {
  if (f.op() == Op::Globally) return false;
  for (const Formula& c : f.children())
    if (!is_guarantee(c)) return false;
  return true;
}

namespace detail {
inline bool cosafe_impl(const Formula& f, bool positive) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return true;
    case Op::Not:
      return cosafe_impl(f.child(), !positive);
    case Op::Next:
      return cosafe_impl(f.child(), positive);
    case Op::Finally:
      return positive && cosafe_impl(f.child(), positive);
    case Op::Globally:
      return !positive && cosafe_impl(f.child(), positive);
    case Op::Until:
      return positive && cosafe_impl(f.child(0), positive) && cosafe_impl(f.child(1), positive);
    case Op::And:
    case Op::Or:
      for (const Formula& c : f.children())
        if (!cosafe_impl(c, positive)) return false;
      return true;
  }
  return false;
}
}  // namespace detail

// Syntactic co-safety: in negation normal form only X/F/U remain. Such
// formulas are recognised entirely by progression to tt.
inline bool is_cosafe(const Formula& f) { return detail::cosafe_impl(f, true); }

}  // namespace ltlsem
