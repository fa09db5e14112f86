#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ltlsem/formula.hpp"
#include "ltlsem/progression.hpp"
#include "ltlsem/trueness.hpp"
#include "ltlsem/word.hpp"

#include <json.hpp>

namespace ltlsem {

enum class Component { Initial, Accepting };

// Automaton state labelled with its semantics: the Main formula (remaining
// language) and, in the accepting component, the Breakpoint formula (pending
// obligation whose completion emits a Buechi signal). The accepting flag is
// part of the state identity: completing the breakpoint leads to a distinct,
// accepting state.
struct SemanticState {
  Formula main;
  std::optional<Formula> breakpoint;
  Component component = Component::Initial;
  bool accepting = false;

  bool is_reject_sink() const { return main.is_ff(); }
  bool is_tt_sink() const { return main.is_tt(); }

  friend int compare(const SemanticState& a, const SemanticState& b) {
    if (a.component != b.component)
      return a.component == Component::Initial ? -1 : 1;
    if (a.accepting != b.accepting) return a.accepting ? 1 : -1;
    if (int c = compare(a.main, b.main); c != 0) return c;
    if (a.breakpoint.has_value() != b.breakpoint.has_value())
      return a.breakpoint.has_value() ? 1 : -1;
    if (a.breakpoint) return compare(*a.breakpoint, *b.breakpoint);
    return 0;
  }
  friend bool operator==(const SemanticState& a, const SemanticState& b) {
    return compare(a, b) == 0;
  }
  friend bool operator<(const SemanticState& a, const SemanticState& b) {
    return compare(a, b) < 0;
  }
};

// The single accepting sink for satisfied tasks. Self-loops with the flag
// set, so every step through it keeps emitting acceptance.
inline SemanticState tt_sink() {
  return SemanticState{Formula::tt(), Formula::tt(), Component::Accepting, true};
}

inline SemanticState reject_sink(Component component) {
  return SemanticState{Formula::ff(),
                       component == Component::Accepting ? std::optional<Formula>(Formula::ff())
                                                         : std::nullopt,
                       component, false};
}

// Breakpoint extraction: keeps the guarantee layer of a formula (F/U
// obligations), erases G wrappers and maps propositional leaves to tt.
// Used both when entering the accepting component and on every breakpoint
// completion, so new pending obligations of the progressed Main are picked
// up by the next breakpoint.
inline Formula breakpoint_reset(const Formula& f) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Atom:
    case Op::Not:
      return Formula::tt();
    case Op::And:
    case Op::Or: {
      std::vector<Formula> parts;
      parts.reserve(f.children().size());
      for (const Formula& c : f.children()) parts.push_back(breakpoint_reset(c));
      Formula out = f.op() == Op::And ? Formula::conj(std::move(parts))
                                      : Formula::disj(std::move(parts));
      return canonicalize(out);
    }
    case Op::Globally:
      return breakpoint_reset(f.child());
    case Op::Next:
      return canonicalize(Formula::next(breakpoint_reset(f.child())));
    case Op::Finally:
    case Op::Until:
      return f;
  }
  return Formula::tt();
}

inline SemanticState initial_state(const Formula& phi) {
  Formula m = canonicalize(phi);
  if (m.is_tt()) return tt_sink();
  if (m.is_ff()) return reject_sink(Component::Initial);
  return SemanticState{std::move(m), std::nullopt, Component::Initial, false};
}

// Deterministic successor under one letter. Within the initial component only
// the Main formula progresses; in the accepting component the breakpoint
// progresses alongside and emits the acceptance flag when it completes.
//
// On completion the new breakpoint is extracted from the progression of Main
// *before* implication-based subsumption. Subsumption may absorb a surfaced
// obligation into a G conjunct that entails it (e.g. F x into G(x | (F x & p))),
// and a breakpoint computed from the pruned formula would silently stop
// tracking that recurring obligation.
inline SemanticState step(const SemanticState& q, const Letter& sigma) {
  Formula m_pre = detail::prog_raw(q.main, sigma);
  Formula m = canonicalize(m_pre);
  if (q.component == Component::Initial) {
    // Reaching tt jumps straight to the accepting sink so a finished task
    // never requires a vacuous epsilon action.
    if (m.is_tt()) return tt_sink();
    if (m.is_ff()) return reject_sink(Component::Initial);
    return SemanticState{std::move(m), std::nullopt, Component::Initial, false};
  }
  if (m.is_ff()) return reject_sink(Component::Accepting);
  Formula b = prog(*q.breakpoint, sigma);
  if (b.is_tt())
    return SemanticState{m, breakpoint_reset(m_pre), Component::Accepting, true};
  return SemanticState{std::move(m), std::move(b), Component::Accepting, false};
}

namespace detail {

// Replaces every positive-polarity FG psi by G psi. The substitution shrinks
// the language (G psi implies FG psi pointwise), which is exactly what an
// epsilon guess is allowed to do; negative occurrences are left alone.
inline Formula fg_to_g(const Formula& f, bool positive = true) {
  switch (f.op()) {
    case Op::True:
    case Op::False:
    case Op::Atom:
      return f;
    case Op::Not:
      return Formula::negate(fg_to_g(f.child(), !positive));
    case Op::Next:
      return Formula::next(fg_to_g(f.child(), positive));
    case Op::Finally:
      if (positive && f.child().op() == Op::Globally)
        return Formula::globally(fg_to_g(f.child().child(), positive));
      return Formula::finally(fg_to_g(f.child(), positive));
    case Op::Globally:
      return Formula::globally(fg_to_g(f.child(), positive));
    case Op::Until:
      return Formula::until(fg_to_g(f.child(0), positive), fg_to_g(f.child(1), positive));
    case Op::And:
    case Op::Or: {
      std::vector<Formula> parts;
      parts.reserve(f.children().size());
      for (const Formula& c : f.children()) parts.push_back(fg_to_g(c, positive));
      return f.op() == Op::And ? Formula::conj(std::move(parts))
                               : Formula::disj(std::move(parts));
    }
  }
  return f;
}

}  // namespace detail

// Epsilon jumps into the accepting component: guess that the persistence
// parts of Main start holding now. Candidates come from the FG->G
// substitution, split over top-level disjunctions. Purely co-safe candidates
// are dropped (they are recognised via the tt sink without a jump), so a
// plain guarantee state has no epsilon actions at all.
inline std::vector<SemanticState> epsilon_targets(const SemanticState& q) {
  if (q.component != Component::Initial) return {};
  Formula m_nu = canonicalize(detail::fg_to_g(q.main));
  std::vector<Formula> candidates;
  if (m_nu.op() == Op::Or) {
    candidates = m_nu.children();
  } else {
    candidates.push_back(m_nu);
  }
  std::set<SemanticState> out;
  for (const Formula& c : candidates) {
    if (c.is_ff()) continue;
    if (c.is_tt()) {
      out.insert(tt_sink());
      continue;
    }
    if (is_cosafe(c)) continue;
    Formula b = breakpoint_reset(c);
    bool accepting = b.is_tt();
    out.insert(SemanticState{c, std::move(b), Component::Accepting, accepting});
  }
  return std::vector<SemanticState>(out.begin(), out.end());
}

// On-the-fly construction cache for one task formula. States get dense ids in
// the order they are first materialised; constructed() is the mu_states
// measure. Pure lookups, so results never depend on cache history.
class Explorer {
public:
  explicit Explorer(const Formula& phi) { initial_ = intern(initial_state(phi)); }

  int initial() const { return initial_; }
  const SemanticState& state(int id) const { return states_[static_cast<std::size_t>(id)]; }
  std::size_t constructed() const { return states_.size(); }

  int step_id(int id, const Letter& sigma) {
    auto key = std::make_pair(id, sigma);
    auto it = step_cache_.find(key);
    if (it != step_cache_.end()) return it->second;
    int dst = intern(step(state(id), sigma));
    step_cache_.emplace(std::move(key), dst);
    return dst;
  }

  const std::vector<int>& epsilon_ids(int id) {
    auto it = eps_cache_.find(id);
    if (it != eps_cache_.end()) return it->second;
    std::vector<int> ids;
    for (const SemanticState& t : epsilon_targets(state(id))) ids.push_back(intern(t));
    return eps_cache_.emplace(id, std::move(ids)).first->second;
  }

private:
  int intern(SemanticState s) {
    auto it = ids_.find(s);
    if (it != ids_.end()) return it->second;
    int id = static_cast<int>(states_.size());
    states_.push_back(s);
    ids_.emplace(std::move(s), id);
    return id;
  }

  std::vector<SemanticState> states_;
  std::map<SemanticState, int> ids_;
  std::map<std::pair<int, Letter>, int> step_cache_;
  std::map<int, std::vector<int>> eps_cache_;
  int initial_ = 0;
};

// Fully built automaton over a fixed alphabet. delta[s][i] is the successor
// of state s under alphabet[i]; epsilon[s] lists jump targets.
struct Automaton {
  Alphabet alphabet;
  std::vector<SemanticState> states;
  int initial = 0;
  std::vector<std::vector<int>> delta;
  std::vector<std::vector<int>> epsilon;

  std::size_t transition_count() const {
    std::size_t n = 0;
    for (const auto& row : delta) n += row.size();
    for (const auto& row : epsilon) n += row.size();
    return n;
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(states.size());
    for (std::size_t s = 0; s < states.size(); ++s) {
      std::set<int> succ(delta[s].begin(), delta[s].end());
      succ.insert(epsilon[s].begin(), epsilon[s].end());
      adj[s].assign(succ.begin(), succ.end());
    }
    return adj;
  }
};

// Breadth-first closure of initial_state(phi) under step (over the given
// alphabet) and epsilon_targets.
inline Automaton build_full(const Formula& phi, const Alphabet& alphabet,
                            std::size_t cap = 10000) {
  if (alphabet.empty()) throw std::invalid_argument("build_full: empty alphabet");
  Explorer ex(phi);
  Automaton out;
  out.alphabet = alphabet;
  out.initial = ex.initial();
  std::size_t frontier = 0;
  while (frontier < ex.constructed()) {
    if (ex.constructed() > cap)
      throw CapError("build_full: state cap " + std::to_string(cap) +
                     " exceeded with frontier size " + std::to_string(ex.constructed()));
    int id = static_cast<int>(frontier++);
    std::vector<int> row;
    row.reserve(alphabet.size());
    for (const Letter& sigma : alphabet) row.push_back(ex.step_id(id, sigma));
    out.delta.push_back(std::move(row));
    out.epsilon.push_back(ex.epsilon_ids(id));
  }
  if (ex.constructed() > cap)
    throw CapError("build_full: state cap " + std::to_string(cap) +
                   " exceeded with frontier size " + std::to_string(ex.constructed()));
  for (std::size_t i = 0; i < ex.constructed(); ++i)
    out.states.push_back(ex.state(static_cast<int>(i)));
  return out;
}

namespace detail {

// Tarjan SCC over an explicit graph, iterative to keep stack use flat.
inline std::vector<int> strongly_connected_components(
    const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  int next_index = 0, next_comp = 0;

  struct Frame { int v; std::size_t child; };
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      if (f.child < adj[f.v].size()) {
        int w = adj[f.v][f.child++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
      } else {
        if (low[f.v] == index[f.v]) {
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            comp[w] = next_comp;
            if (w == f.v) break;
          }
          ++next_comp;
        }
        int v = f.v;
        call.pop_back();
        if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
    }
  }
  return comp;
}

}  // namespace detail

// Decides whether the automaton for phi accepts the lasso word: exact search
// over the product of on-the-fly states with the u+v word positions. Epsilon
// moves keep the position (they consume no letter); at most one can occur on
// any run since they always cross into the accepting component. Accepting
// iff some reachable non-trivial SCC contains an accepting-flag node.
inline bool accepts_lasso(const Formula& phi, const LassoWord& w, const Alphabet& alphabet,
                          std::size_t cap = 10000) {
  for (std::size_t i = 0; i < w.prefix.size() + w.loop.size(); ++i) {
    const Letter& sigma = w.at(i);
    if (!std::binary_search(alphabet.begin(), alphabet.end(), sigma))
      throw std::invalid_argument("accepts_lasso: word letter outside alphabet");
  }
  Explorer ex(phi);
  const std::size_t u = w.prefix.size();
  const std::size_t n = u + w.loop.size();
  auto next_pos = [&](std::size_t i) { return i + 1 < n ? i + 1 : u; };

  std::map<std::pair<int, std::size_t>, int> node_ids;
  std::vector<std::pair<int, std::size_t>> nodes;
  auto intern = [&](int state, std::size_t pos) {
    auto key = std::make_pair(state, pos);
    auto it = node_ids.find(key);
    if (it != node_ids.end()) return it->second;
    int id = static_cast<int>(nodes.size());
    nodes.push_back(key);
    node_ids.emplace(key, id);
    return id;
  };

  std::vector<std::vector<int>> adj;
  intern(ex.initial(), 0);
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    if (nodes.size() > cap || ex.constructed() > cap)
      throw CapError("accepts_lasso: state cap exceeded");
    auto [state, pos] = nodes[head];
    std::vector<int> edges;
    edges.push_back(intern(ex.step_id(state, w.at(pos)), next_pos(pos)));
    for (int t : ex.epsilon_ids(state)) edges.push_back(intern(t, pos));
    adj.push_back(std::move(edges));
  }

  std::vector<int> comp = detail::strongly_connected_components(adj);
  int comp_count = 0;
  for (int c : comp) comp_count = std::max(comp_count, c + 1);
  std::vector<int> comp_size(comp_count, 0);
  std::vector<char> comp_self_edge(comp_count, 0), comp_accepting(comp_count, 0);
  for (std::size_t v = 0; v < adj.size(); ++v) {
    ++comp_size[comp[v]];
    if (ex.state(nodes[v].first).accepting) comp_accepting[comp[v]] = 1;
    for (int wv : adj[v])
      if (comp[wv] == comp[static_cast<int>(v)]) comp_self_edge[comp[v]] = 1;
  }
  for (int c = 0; c < comp_count; ++c)
    if (comp_accepting[c] && (comp_size[c] > 1 || comp_self_edge[c])) {
      // SCC membership alone is not enough: the accepting node itself must
      // lie on a cycle, which for an SCC with any internal edge it does.
      return true;
    }
  return false;
}

// Exact number of nonempty simple paths (node sequences of length >= 1 with
// no repeated node) starting at `from`.
inline std::uint64_t count_simple_paths(const std::vector<std::vector<int>>& adj, int from,
                                        std::uint64_t cap = 1000000000ULL) {
  std::vector<char> visited(adj.size(), 0);
  std::uint64_t count = 0;
  auto dfs = [&](auto&& self, int v) -> void {
    visited[v] = 1;
    if (++count > cap) throw CapError("count_simple_paths: count cap exceeded");
    for (int w : adj[v])
      if (!visited[w]) self(self, w);
    visited[v] = 0;
  };
  dfs(dfs, from);
  return count;
}

inline std::uint64_t count_simple_paths(const Automaton& aut, int from,
                                        std::uint64_t cap = 1000000000ULL) {
  return count_simple_paths(aut.adjacency(), from, cap);
}

inline nlohmann::json letter_to_json(const Letter& sigma) {
  return nlohmann::json(sigma.props());
}

inline nlohmann::json automaton_to_json(const Automaton& aut) {
  nlohmann::json j;
  j["version"] = 1;
  j["alphabet"] = nlohmann::json::array();
  for (const Letter& sigma : aut.alphabet) j["alphabet"].push_back(letter_to_json(sigma));
  j["states"] = nlohmann::json::array();
  for (std::size_t i = 0; i < aut.states.size(); ++i) {
    const SemanticState& s = aut.states[i];
    nlohmann::json js;
    js["id"] = i;
    js["main"] = render(s.main);
    js["breakpoint"] = s.breakpoint ? nlohmann::json(render(*s.breakpoint)) : nlohmann::json();
    js["component"] = s.component == Component::Initial ? "initial" : "accepting";
    js["accepting"] = s.accepting;
    j["states"].push_back(std::move(js));
  }
  j["initial"] = aut.initial;
  j["delta"] = nlohmann::json::array();
  for (std::size_t s = 0; s < aut.delta.size(); ++s)
    for (std::size_t i = 0; i < aut.delta[s].size(); ++i)
      j["delta"].push_back({s, letter_to_json(aut.alphabet[i]), aut.delta[s][i]});
  j["epsilon"] = nlohmann::json::array();
  for (std::size_t s = 0; s < aut.epsilon.size(); ++s)
    for (int t : aut.epsilon[s]) j["epsilon"].push_back({s, t});
  return j;
}

}  // namespace ltlsem
