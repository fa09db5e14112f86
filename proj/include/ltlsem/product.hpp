#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "ltlsem/automaton.hpp"
#include "ltlsem/letterworld.hpp"
#include "ltlsem/tasks.hpp"
#include "ltlsem/word.hpp"

namespace ltlsem {

struct ProductConfig {
  LetterWorldConfig env;
  int episode_limit = 75;
};

// One product-MDP episode: LetterWorld paired with the on-the-fly automaton
// of the task. Actions 0..3 move the agent and advance the automaton by the
// emitted label; action 4+i takes the i-th epsilon jump, advancing only the
// automaton. A fresh Explorer per episode makes constructed() the mu_states
// measure of the episode.
class ProductEpisode {
public:
  struct StepResult {
    double reward = 0.0;
    bool terminal = false;
    bool accepting_visit = false;
    bool sink = false;
    std::size_t constructed = 0;
  };

  ProductEpisode(const Formula& task, bool guarantee, const ProductConfig& cfg,
                 std::uint64_t env_seed)
      : cfg_(cfg),
        guarantee_(guarantee),
        env_(LetterWorld::reset(cfg.env, env_seed)),
        explorer_(task) {
    state_ = explorer_.initial();
  }

  const LetterWorld& env() const { return env_; }
  const Explorer& explorer() const { return explorer_; }
  int state_id() const { return state_; }
  const SemanticState& state() const { return explorer_.state(state_); }
  bool done() const { return done_; }
  bool succeeded() const { return succeeded_; }
  int steps() const { return steps_; }
  int accepting_visits() const { return accepting_visits_; }
  double total_reward() const { return total_reward_; }
  std::size_t constructed() const { return explorer_.constructed(); }
  const std::vector<Letter>& word() const { return word_; }

  // Moves first, then the epsilon actions of the current automaton state.
  int action_count() { return 4 + static_cast<int>(epsilon_ids().size()); }
  const std::vector<int>& epsilon_ids() { return explorer_.epsilon_ids(state_); }

  StepResult apply(int action) {
    if (done_) throw std::logic_error("product episode already terminal");
    if (action < 0 || action >= action_count())
      throw std::out_of_range("action " + std::to_string(action) + " not available");
    int next_state;
    if (action < 4) {
      Letter sigma = env_.step(move_from_index(action));
      word_.push_back(sigma);
      next_state = explorer_.step_id(state_, sigma);
      ++steps_;
    } else {
      // epsilon action: automaton only, the MDP state stays
      next_state = epsilon_ids()[static_cast<std::size_t>(action - 4)];
    }
    state_ = next_state;
    const SemanticState& q = explorer_.state(state_);

    StepResult r;
    r.accepting_visit = q.accepting;
    r.sink = q.is_reject_sink();
    if (q.accepting) {
      r.reward = 1.0;
      ++accepting_visits_;
    } else if (q.is_reject_sink()) {
      r.reward = -1.0;
    }
    if (q.is_reject_sink()) {
      done_ = true;
    } else if (guarantee_ && q.accepting) {
      // the trajectory already satisfies a guarantee task
      done_ = true;
      succeeded_ = true;
    } else if (steps_ >= cfg_.episode_limit) {
      done_ = true;
    }
    r.terminal = done_;
    r.constructed = explorer_.constructed();
    total_reward_ += r.reward;
    return r;
  }

private:
  ProductConfig cfg_;
  bool guarantee_;
  LetterWorld env_;
  Explorer explorer_;
  int state_ = 0;
  int steps_ = 0;
  int accepting_visits_ = 0;
  double total_reward_ = 0.0;
  bool done_ = false;
  bool succeeded_ = false;
  std::vector<Letter> word_;
};

}  // namespace ltlsem
