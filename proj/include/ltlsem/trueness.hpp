#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltlsem/formula.hpp"

namespace ltlsem {

// Raised when an exact computation would exceed its configured limit; callers
// must handle it, there is no silent approximation anywhere.
struct CapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact satisfying-assignment ratio: sat / 2^vars.
struct Trueness {
  std::uint64_t sat = 0;
  std::uint64_t total = 1;
  double value() const { return static_cast<double>(sat) / static_cast<double>(total); }
};

namespace detail {

// Propositional skeleton: maximal temporal subformulas (rooted at X/F/G/U)
// become shared variables, keyed by canonical equality; bare atoms are
// variables of their own.
struct Skeleton {
  enum class Kind { Const, Var, Not, And, Or };
  Kind kind = Kind::Const;
  bool constant = false;
  int var = -1;
  std::vector<Skeleton> kids;
};

struct SkeletonBuilder {
  std::map<Formula, int> temporal_vars;
  std::map<std::string, int> atom_vars;
  int next_var = 0;

  Skeleton build(const Formula& f) {
    Skeleton s;
    switch (f.op()) {
      case Op::True:
      case Op::False:
        s.kind = Skeleton::Kind::Const;
        s.constant = f.is_tt();
        return s;
      case Op::Atom: {
        s.kind = Skeleton::Kind::Var;
        auto [it, inserted] = atom_vars.try_emplace(f.name(), next_var);
        if (inserted) ++next_var;
        s.var = it->second;
        return s;
      }
      case Op::Not:
        s.kind = Skeleton::Kind::Not;
        s.kids.push_back(build(f.child()));
        return s;
      case Op::And:
      case Op::Or:
        s.kind = f.op() == Op::And ? Skeleton::Kind::And : Skeleton::Kind::Or;
        for (const Formula& c : f.children()) s.kids.push_back(build(c));
        return s;
      case Op::Next:
      case Op::Finally:
      case Op::Globally:
      case Op::Until: {
        s.kind = Skeleton::Kind::Var;
        auto [it, inserted] = temporal_vars.try_emplace(f, next_var);
        if (inserted) ++next_var;
        s.var = it->second;
        return s;
      }
    }
    return s;
  }
};

inline bool eval_skeleton(const Skeleton& s, std::uint64_t assignment) {
  switch (s.kind) {
    case Skeleton::Kind::Const: return s.constant;
    case Skeleton::Kind::Var: return (assignment >> s.var) & 1;
    case Skeleton::Kind::Not: return !eval_skeleton(s.kids[0], assignment);
    case Skeleton::Kind::And:
      for (const Skeleton& k : s.kids)
        if (!eval_skeleton(k, assignment)) return false;
      return true;
    case Skeleton::Kind::Or:
      for (const Skeleton& k : s.kids)
        if (eval_skeleton(k, assignment)) return true;
      return false;
  }
  return false;
}

}  // namespace detail

// Trueness of a formula: replace each maximal temporal subformula by a fresh
// propositional variable (canonically equal ones share), then count
// satisfying assignments exhaustively.
inline Trueness trueness(const Formula& f, int var_cap = 20) {
  detail::SkeletonBuilder builder;
  detail::Skeleton skel = builder.build(f);
  const int vars = builder.next_var;
  if (vars > var_cap)
    throw CapError("trueness: " + std::to_string(vars) + " variables exceed cap of " +
                   std::to_string(var_cap));
  Trueness t;
  t.total = std::uint64_t{1} << vars;
  for (std::uint64_t a = 0; a < t.total; ++a)
    if (detail::eval_skeleton(skel, a)) ++t.sat;
  return t;
}

}  // namespace ltlsem
