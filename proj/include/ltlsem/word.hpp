#pragma once

#include <algorithm>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltlsem/formula.hpp"

namespace ltlsem {

// A letter is a set of atomic proposition names (one element of 2^AP).
class Letter {
public:
  Letter() = default;
  Letter(std::initializer_list<std::string> names)
      : Letter(std::vector<std::string>(names)) {}
  explicit Letter(std::vector<std::string> names) : props_(std::move(names)) {
    std::sort(props_.begin(), props_.end());
    props_.erase(std::unique(props_.begin(), props_.end()), props_.end());
  }

  bool contains(const std::string& name) const {
    return std::binary_search(props_.begin(), props_.end(), name);
  }
  bool empty() const { return props_.empty(); }
  std::size_t size() const { return props_.size(); }
  const std::vector<std::string>& props() const { return props_; }

  friend bool operator==(const Letter& a, const Letter& b) { return a.props_ == b.props_; }
  friend bool operator!=(const Letter& a, const Letter& b) { return !(a == b); }
  friend bool operator<(const Letter& a, const Letter& b) { return a.props_ < b.props_; }

private:
  std::vector<std::string> props_;
};

// Ordered, duplicate-free set of letters; used both for the environment's
// restricted label set and for full 2^AP alphabets.
using Alphabet = std::vector<Letter>;

inline Alphabet make_alphabet(std::vector<Letter> letters) {
  std::sort(letters.begin(), letters.end());
  letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
  return letters;
}

// All 2^|ap| letters; subsets enumerated in binary-counter order over the
// sorted proposition list, then sorted into canonical letter order.
inline Alphabet full_alphabet(std::vector<std::string> ap) {
  std::sort(ap.begin(), ap.end());
  ap.erase(std::unique(ap.begin(), ap.end()), ap.end());
  if (ap.size() > 20) throw std::invalid_argument("full_alphabet: too many propositions");
  Alphabet out;
  out.reserve(std::size_t{1} << ap.size());
  for (std::size_t mask = 0; mask < (std::size_t{1} << ap.size()); ++mask) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < ap.size(); ++i)
      if (mask & (std::size_t{1} << i)) names.push_back(ap[i]);
    out.push_back(Letter(std::move(names)));
  }
  return make_alphabet(std::move(out));
}

// Collects every atom name occurring in the formula.
inline std::vector<std::string> atom_names(const Formula& f) {
  std::vector<std::string> out;
  auto walk = [&out](auto&& self, const Formula& g) -> void {
    if (g.is_atom()) out.push_back(g.name());
    for (const Formula& c : g.children()) self(self, c);
  };
  walk(walk, f);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Ultimately periodic omega-word u . v^omega, the finite representation all
// oracle checks run on. The loop must be nonempty.
struct LassoWord {
  LassoWord(std::vector<Letter> prefix_, std::vector<Letter> loop_)
      : prefix(std::move(prefix_)), loop(std::move(loop_)) {
    if (loop.empty()) throw std::invalid_argument("lasso loop must be nonempty");
  }

  std::vector<Letter> prefix;
  std::vector<Letter> loop;

  const Letter& at(std::size_t i) const {
    if (i < prefix.size()) return prefix[i];
    return loop[(i - prefix.size()) % loop.size()];
  }

  LassoWord prepend(const Letter& sigma) const {
    std::vector<Letter> p;
    p.reserve(prefix.size() + 1);
    p.push_back(sigma);
    p.insert(p.end(), prefix.begin(), prefix.end());
    return LassoWord(std::move(p), loop);
  }
};

namespace detail {

// Evaluates f at each of the u+v distinct positions. Position i >= u is
// identified with i+v; F/G/U are least/greatest fixpoints of the one-step
// recurrence, solved by two backward passes over the loop (any until witness
// can be shortened to lie within one loop length, so two passes reach the
// fixpoint) followed by one pass over the prefix.
inline std::vector<char> eval_positions(const Formula& f, const LassoWord& w) {
  const std::size_t u = w.prefix.size();
  const std::size_t n = u + w.loop.size();
  auto next = [&](std::size_t i) { return i + 1 < n ? i + 1 : u; };

  auto backward_fixpoint = [&](auto&& step_value) {
    std::vector<char> r(n, 0);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = n; i-- > u;) r[i] = step_value(i, r[next(i)]);
    for (std::size_t i = u; i-- > 0;) r[i] = step_value(i, r[i + 1]);
    return r;
  };

  switch (f.op()) {
    case Op::True: return std::vector<char>(n, 1);
    case Op::False: return std::vector<char>(n, 0);
    case Op::Atom: {
      std::vector<char> r(n);
      for (std::size_t i = 0; i < n; ++i) r[i] = w.at(i).contains(f.name());
      return r;
    }
    case Op::Not: {
      std::vector<char> r = eval_positions(f.child(), w);
      for (auto& x : r) x = !x;
      return r;
    }
    case Op::And:
    case Op::Or: {
      const bool conj = f.op() == Op::And;
      std::vector<char> r(n, conj ? 1 : 0);
      for (const Formula& c : f.children()) {
        std::vector<char> cr = eval_positions(c, w);
        for (std::size_t i = 0; i < n; ++i)
          r[i] = conj ? (r[i] && cr[i]) : (r[i] || cr[i]);
      }
      return r;
    }
    case Op::Next: {
      std::vector<char> cr = eval_positions(f.child(), w);
      std::vector<char> r(n);
      for (std::size_t i = 0; i < n; ++i) r[i] = cr[next(i)];
      return r;
    }
    case Op::Finally: {
      std::vector<char> cr = eval_positions(f.child(), w);
      // least fixpoint of r[i] = cr[i] || r[next(i)], initialised false
      return backward_fixpoint([&](std::size_t i, char nxt) -> char { return cr[i] || nxt; });
    }
    case Op::Globally: {
      std::vector<char> cr = eval_positions(f.child(), w);
      // greatest fixpoint: initialise true
      std::vector<char> r(n, 1);
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t i = n; i-- > u;) r[i] = cr[i] && r[next(i)];
      for (std::size_t i = u; i-- > 0;) r[i] = cr[i] && r[i + 1];
      return r;
    }
    case Op::Until: {
      std::vector<char> lr = eval_positions(f.child(0), w);
      std::vector<char> rr = eval_positions(f.child(1), w);
      return backward_fixpoint(
          [&](std::size_t i, char nxt) -> char { return rr[i] || (lr[i] && nxt); });
    }
  }
  return std::vector<char>(n, 0);
}

}  // namespace detail

// Brute-force satisfaction oracle: w |= f by fixpoint evaluation over the
// u+v distinct positions of the lasso.
inline bool eval_lasso(const LassoWord& w, const Formula& f) {
  return detail::eval_positions(f, w)[0] != 0;
}

}  // namespace ltlsem
