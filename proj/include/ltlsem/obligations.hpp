#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "ltlsem/formula.hpp"
#include "ltlsem/word.hpp"

namespace ltlsem {

// Letters whose infinite repetition satisfies the formula: for every sigma in
// obligations(f, 2^AP), sigma^omega |= f. Every case is intersected with the
// supplied alphabet, so restricting the alphabet commutes with computing
// obligations.
using ObligationSet = std::vector<Letter>;

namespace detail {

inline ObligationSet ob_difference(const Alphabet& alphabet, const ObligationSet& s) {
  ObligationSet out;
  std::set_difference(alphabet.begin(), alphabet.end(), s.begin(), s.end(),
                      std::back_inserter(out));
  return out;
}

inline ObligationSet ob_impl(const Formula& f, const Alphabet& alphabet) {
  switch (f.op()) {
    case Op::True:
      return alphabet;
    case Op::False:
      return {};
    case Op::Atom: {
      ObligationSet out;
      for (const Letter& sigma : alphabet)
        if (sigma.contains(f.name())) out.push_back(sigma);
      return out;
    }
    case Op::Not:
      return ob_difference(alphabet, ob_impl(f.child(), alphabet));
    case Op::And: {
      ObligationSet acc = alphabet;
      for (const Formula& c : f.children()) {
        ObligationSet cs = ob_impl(c, alphabet);
        ObligationSet merged;
        std::set_intersection(acc.begin(), acc.end(), cs.begin(), cs.end(),
                              std::back_inserter(merged));
        acc = std::move(merged);
      }
      return acc;
    }
    case Op::Or: {
      ObligationSet acc;
      for (const Formula& c : f.children()) {
        ObligationSet cs = ob_impl(c, alphabet);
        ObligationSet merged;
        std::set_union(acc.begin(), acc.end(), cs.begin(), cs.end(),
                       std::back_inserter(merged));
        acc = std::move(merged);
      }
      return acc;
    }
    case Op::Next:
    case Op::Finally:
    case Op::Globally:
      return ob_impl(f.child(), alphabet);
    case Op::Until:
      return ob_impl(f.child(1), alphabet);
  }
  return {};
}

}  // namespace detail

inline ObligationSet obligations(const Formula& f, const Alphabet& alphabet) {
  if (alphabet.empty()) throw std::invalid_argument("obligations: empty alphabet");
  return detail::ob_impl(f, alphabet);
}

}  // namespace ltlsem
