#pragma once

#include "ltlsem/formula.hpp"
#include "ltlsem/word.hpp"

namespace ltlsem {

namespace detail {

inline Formula prog_raw(const Formula& f, const Letter& sigma) {
  switch (f.op()) {
    case Op::True:
      return Formula::tt();
    case Op::False:
      return Formula::ff();
    case Op::Atom:
      return sigma.contains(f.name()) ? Formula::tt() : Formula::ff();
    case Op::Not:
      return Formula::negate(prog_raw(f.child(), sigma));
    case Op::Next:
      return f.child();
    case Op::Finally:
      return Formula::disj({prog_raw(f.child(), sigma), f});
    case Op::Globally:
      return Formula::conj({prog_raw(f.child(), sigma), f});
    case Op::Until:
      return Formula::disj(
          {prog_raw(f.child(1), sigma),
           Formula::conj({prog_raw(f.child(0), sigma), f})});
    case Op::And:
    case Op::Or: {
      std::vector<Formula> parts;
      parts.reserve(f.children().size());
      for (const Formula& c : f.children()) parts.push_back(prog_raw(c, sigma));
      return f.op() == Op::And ? Formula::conj(std::move(parts))
                               : Formula::disj(std::move(parts));
    }
  }
  return Formula::ff();
}

}  // namespace detail

// Formula progression: the obligation that remains after observing sigma.
// The defining property is eval_lasso(sigma . w, f) == eval_lasso(w, prog(f, sigma)).
// The result is always canonical.
inline Formula prog(const Formula& f, const Letter& sigma) {
  return canonicalize(detail::prog_raw(f, sigma));
}

}  // namespace ltlsem
