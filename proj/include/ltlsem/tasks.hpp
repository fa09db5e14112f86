#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltlsem/formula.hpp"
#include "ltlsem/rng.hpp"

namespace ltlsem {

enum class TaskFamily {
  Small,
  LocalSafety,
  GlobalSafety,
  FiniteReactive,
  ComplexPatrol,
  ReachStay,
  AlwaysReactive,
};

inline const char* family_name(TaskFamily f) {
  switch (f) {
    case TaskFamily::Small: return "small";
    case TaskFamily::LocalSafety: return "localsafety";
    case TaskFamily::GlobalSafety: return "globalsafety";
    case TaskFamily::FiniteReactive: return "finitereactive";
    case TaskFamily::ComplexPatrol: return "complexpatrol";
    case TaskFamily::ReachStay: return "reachstay";
    case TaskFamily::AlwaysReactive: return "alwaysreactive";
  }
  return "?";
}

inline TaskFamily family_from_name(const std::string& s) {
  for (TaskFamily f : {TaskFamily::Small, TaskFamily::LocalSafety, TaskFamily::GlobalSafety,
                       TaskFamily::FiniteReactive, TaskFamily::ComplexPatrol,
                       TaskFamily::ReachStay, TaskFamily::AlwaysReactive})
    if (s == family_name(f)) return f;
  throw std::invalid_argument("unknown task family '" + s + "'");
}

struct TaskSpec {
  TaskFamily family = TaskFamily::Small;
  int k = 1;
  int m = 1;
  std::vector<std::string> pool;
  Formula formula;
  bool guarantee = false;  // no G anywhere: eligible for early termination
};

namespace detail {

inline std::vector<std::string> draw_distinct(const std::vector<std::string>& pool,
                                              std::size_t n, Rng& rng) {
  if (n > pool.size())
    throw std::invalid_argument("task sampler: pool of " + std::to_string(pool.size()) +
                                " propositions exhausted (need " + std::to_string(n) + ")");
  std::vector<std::string> shuffled = pool;
  rng.shuffle(shuffled);
  shuffled.resize(n);
  return shuffled;
}

// !a1 U (r1 & (!a2 U (r2 & ... (!ak U rk))))
inline Formula reach_avoid_chain(const std::vector<Formula>& avoid,
                                 const std::vector<Formula>& reach) {
  Formula acc = reach.back();
  for (std::size_t i = reach.size(); i-- > 0;) {
    if (i + 1 < reach.size())
      acc = Formula::conj({reach[i], acc});
    acc = Formula::until(Formula::negate(avoid[i]), acc);
  }
  return acc;
}

// F(r1 & F(r2 & ... F rk))
inline Formula sequential_reach(const std::vector<Formula>& reach) {
  Formula acc = Formula::finally(reach.back());
  for (std::size_t i = reach.size() - 1; i-- > 0;)
    acc = Formula::finally(Formula::conj({reach[i], acc}));
  return acc;
}

inline std::vector<Formula> atoms(const std::vector<std::string>& names) {
  std::vector<Formula> out;
  out.reserve(names.size());
  for (const std::string& n : names) out.push_back(Formula::atom(n));
  return out;
}

}  // namespace detail

// Instantiates one task template with distinct uniformly drawn propositions.
// LocalSafety/GlobalSafety draw each disjunct independently (propositions are
// distinct within a disjunct); GlobalSafety shares one avoidance proposition
// across every until-guard of the task.
inline TaskSpec sample_task(TaskFamily family, int k, int m,
                            const std::vector<std::string>& pool, Rng& rng) {
  using detail::atoms;
  using detail::draw_distinct;
  TaskSpec spec;
  spec.family = family;
  spec.k = k;
  spec.m = m;
  spec.pool = pool;
  Formula f;
  switch (family) {
    case TaskFamily::Small: {
      // Fixed shapes of the established benchmark tasks, letters drawn fresh.
      switch (rng.pick(4)) {
        case 0: {
          auto p = atoms(draw_distinct(pool, 6, rng));
          f = detail::reach_avoid_chain({p[0], p[2], p[4]}, {p[1], p[3], p[5]});
          break;
        }
        case 1: {
          auto p = atoms(draw_distinct(pool, 7, rng));
          f = Formula::conj(
              {Formula::finally(Formula::conj(
                   {Formula::disj({p[0], p[1], p[2]}), Formula::finally(p[3])})),
               Formula::finally(Formula::conj({p[1], Formula::finally(p[4])})),
               Formula::finally(p[5])});
          break;
        }
        case 2: {
          auto p = atoms(draw_distinct(pool, 3, rng));
          f = Formula::conj(
              {Formula::finally(p[0]),
               Formula::until(Formula::negate(p[1]),
                              Formula::conj({p[0], Formula::finally(p[2])}))});
          break;
        }
        default: {
          auto p = atoms(draw_distinct(pool, 4, rng));
          f = Formula::conj(
              {Formula::finally(Formula::conj(
                   {p[0], Formula::until(Formula::negate(p[1]), p[2])})),
               Formula::finally(p[3])});
          break;
        }
      }
      break;
    }
    case TaskFamily::LocalSafety: {
      std::vector<Formula> disjuncts;
      for (int j = 0; j < m; ++j) {
        auto p = atoms(draw_distinct(pool, 2 * static_cast<std::size_t>(k), rng));
        std::vector<Formula> avoid(p.begin(), p.begin() + k);
        std::vector<Formula> reach(p.begin() + k, p.end());
        disjuncts.push_back(detail::reach_avoid_chain(avoid, reach));
      }
      f = Formula::disj(std::move(disjuncts));
      break;
    }
    case TaskFamily::GlobalSafety: {
      auto global = atoms(draw_distinct(pool, 1, rng));
      std::vector<std::string> rest;
      for (const std::string& s : pool)
        if (s != global[0].name()) rest.push_back(s);
      std::vector<Formula> disjuncts;
      for (int j = 0; j < m; ++j) {
        auto reach = atoms(draw_distinct(rest, static_cast<std::size_t>(k), rng));
        std::vector<Formula> avoid(static_cast<std::size_t>(k), global[0]);
        disjuncts.push_back(detail::reach_avoid_chain(avoid, reach));
      }
      f = Formula::disj(std::move(disjuncts));
      break;
    }
    case TaskFamily::FiniteReactive: {
      // (AND_i (t_i -> F(r_i1 | ... | r_im))) U g. The goal and the k
      // triggers are distinct; responses are drawn per rule (distinct within
      // a rule, reusable across rules) so large k fits a 12-letter pool.
      auto names = draw_distinct(pool, static_cast<std::size_t>(k) + 1, rng);
      Formula goal = Formula::atom(names[0]);
      std::vector<Formula> rules;
      for (int i = 0; i < k; ++i) {
        const std::string& trigger = names[static_cast<std::size_t>(i) + 1];
        std::vector<std::string> rest;
        for (const std::string& s : pool)
          if (s != trigger && s != names[0]) rest.push_back(s);
        std::vector<Formula> responses = atoms(draw_distinct(rest, static_cast<std::size_t>(m), rng));
        rules.push_back(Formula::disj({Formula::negate(Formula::atom(trigger)),
                                       Formula::finally(Formula::disj(std::move(responses)))}));
      }
      f = Formula::until(Formula::conj(std::move(rules)), goal);
      break;
    }
    case TaskFamily::ComplexPatrol: {
      // G F (psi_1 | ... | psi_m) & G !a
      auto global = atoms(draw_distinct(pool, 1, rng));
      std::vector<std::string> rest;
      for (const std::string& s : pool)
        if (s != global[0].name()) rest.push_back(s);
      std::vector<Formula> disjuncts;
      for (int j = 0; j < m; ++j)
        disjuncts.push_back(
            detail::sequential_reach(atoms(draw_distinct(rest, static_cast<std::size_t>(k), rng))));
      f = Formula::conj(
          {Formula::globally(Formula::finally(Formula::disj(std::move(disjuncts)))),
           Formula::globally(Formula::negate(global[0]))});
      break;
    }
    case TaskFamily::ReachStay: {
      auto p = atoms(draw_distinct(pool, static_cast<std::size_t>(k) + 1, rng));
      std::vector<Formula> reach(p.begin(), p.end() - 1);
      f = Formula::conj({detail::sequential_reach(reach),
                         Formula::finally(Formula::globally(p.back()))});
      break;
    }
    case TaskFamily::AlwaysReactive: {
      // GF t0 & AND_{i<k} G(t_i -> F(r_i1 | .. | r_im | t_{i+1})). The k+1
      // triggers are distinct; responses are drawn per rule and may collide
      // with other rules' propositions (a response can be another trigger).
      auto names = draw_distinct(pool, static_cast<std::size_t>(k) + 1, rng);
      std::vector<Formula> triggers = atoms(names);
      std::vector<Formula> parts{Formula::globally(Formula::finally(triggers[0]))};
      for (int i = 0; i < k; ++i) {
        std::vector<std::string> rest;
        for (const std::string& s : pool)
          if (s != names[static_cast<std::size_t>(i)] && s != names[static_cast<std::size_t>(i) + 1])
            rest.push_back(s);
        std::vector<Formula> responses = atoms(draw_distinct(rest, static_cast<std::size_t>(m), rng));
        responses.push_back(triggers[static_cast<std::size_t>(i) + 1]);
        parts.push_back(Formula::globally(Formula::disj(
            {Formula::negate(triggers[static_cast<std::size_t>(i)]),
             Formula::finally(Formula::disj(std::move(responses)))})));
      }
      f = Formula::conj(std::move(parts));
      break;
    }
  }
  spec.formula = canonicalize(f);
  spec.guarantee = is_guarantee(spec.formula);
  return spec;
}

// LetterWorld curriculum stages: (1) F a and !a U b; (2) the same with
// disjunctions of width up to 2; (3) width exactly 2; (4) reach/avoid depth
// and width up to 3 plus recurrence tasks AND_i GF a_i & G!(b_1 | ... | b_l).
inline Formula sample_stage_task(int stage, const std::vector<std::string>& pool, Rng& rng) {
  using detail::atoms;
  using detail::draw_distinct;
  // template sizes are clamped so small desk-scale pools stay samplable
  auto reach_or_avoid = [&](int width) {
    width = std::min<int>(width, static_cast<int>(pool.size()) - 1);
    if (width < 1) width = 1;
    if (rng.chance(0.5)) {
      auto p = atoms(draw_distinct(pool, static_cast<std::size_t>(width), rng));
      return Formula::finally(Formula::disj(std::move(p)));
    }
    auto p = atoms(draw_distinct(pool, static_cast<std::size_t>(width) + 1, rng));
    Formula target = p.back();
    p.pop_back();
    return Formula::until(Formula::negate(Formula::disj(std::move(p))), target);
  };
  switch (stage) {
    case 1:
      return canonicalize(reach_or_avoid(1));
    case 2:
      return canonicalize(reach_or_avoid(1 + static_cast<int>(rng.pick(2))));
    case 3:
      return canonicalize(reach_or_avoid(2));
    default: {
      if (rng.chance(0.25)) {
        int kk = 2 + static_cast<int>(rng.pick(3));
        kk = std::min<int>(kk, static_cast<int>(pool.size()));
        int ll = static_cast<int>(rng.pick(3));
        ll = std::min<int>(ll, static_cast<int>(pool.size()) - kk);
        auto p = atoms(draw_distinct(pool, static_cast<std::size_t>(kk + ll), rng));
        std::vector<Formula> parts;
        for (int i = 0; i < kk; ++i)
          parts.push_back(Formula::globally(Formula::finally(p[static_cast<std::size_t>(i)])));
        if (ll > 0) {
          std::vector<Formula> bad(p.begin() + kk, p.end());
          parts.push_back(
              Formula::globally(Formula::negate(Formula::disj(std::move(bad)))));
        }
        return canonicalize(Formula::conj(std::move(parts)));
      }
      int depth = 1 + static_cast<int>(rng.pick(3));
      int width = 1 + static_cast<int>(rng.pick(3));
      std::vector<Formula> chain;
      for (int i = 0; i < depth; ++i) chain.push_back(reach_or_avoid(width));
      return canonicalize(Formula::conj(std::move(chain)));
    }
  }
}

// Stage thresholds on the windowed success rate; stage 4 is terminal.
inline int curriculum_advance(const std::vector<double>& window, int stage,
                              std::size_t window_size = 256) {
  static constexpr double kThresholds[] = {0.90, 0.95, 0.95};
  if (stage < 1 || stage >= 4) return stage;
  if (window.size() < window_size) return stage;
  double sum = std::accumulate(window.end() - static_cast<std::ptrdiff_t>(window_size),
                               window.end(), 0.0);
  double sr = sum / static_cast<double>(window_size);
  return sr >= kThresholds[stage - 1] ? stage + 1 : stage;
}

}  // namespace ltlsem
