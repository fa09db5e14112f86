#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ltlsem/embedding.hpp"
#include "ltlsem/product.hpp"
#include "ltlsem/rng.hpp"
#include "ltlsem/tasks.hpp"

#include <json.hpp>

namespace ltlsem {

// Per-state feature payload shared across episodes of one task: the semantic
// embedding plus the per-environment-letter trueness deltas of Main that
// drive the optional interaction features.
struct StateFeatures {
  std::vector<double> embedding;
  std::vector<double> letter_delta;  // indexed like LetterWorldConfig::letters
};

class TaskEmbedder {
public:
  TaskEmbedder(const Formula& task, const std::vector<std::string>& ap, Alphabet sigma_env,
               const std::vector<std::string>& env_letters)
      : cfg_(EmbeddingConfig::for_task(task, ap, std::move(sigma_env))),
        env_letters_(env_letters) {}

  const EmbeddingConfig& config() const { return cfg_; }

  const StateFeatures& get(const SemanticState& q) {
    auto it = cache_.find(q);
    if (it != cache_.end()) return *it->second;
    auto feat = std::make_shared<StateFeatures>();
    feat->embedding = embed_state(q, cfg_);
    feat->letter_delta.reserve(env_letters_.size());
    for (const std::string& l : env_letters_)
      feat->letter_delta.push_back(f_trueness(q.main, Letter{l}));
    return *cache_.emplace(q, std::move(feat)).first->second;
  }

private:
  EmbeddingConfig cfg_;
  std::vector<std::string> env_letters_;
  std::map<SemanticState, std::shared_ptr<StateFeatures>> cache_;
};

struct QConfig {
  double alpha = 0.005;
  double gamma = 0.94;
  double eps_start = 1.0;
  double eps_end = 0.05;
  long eps_decay_steps = 30000;
  // Appends an egocentric grid of task-weighted letter cells (observation
  // times the letter's trueness delta) to the concatenated features. The
  // plain concatenation cannot rank letters by task relevance, so zero-shot
  // transfer across letter identities needs this interaction block.
  bool interaction_features = false;
};

// Linear action-value model: one weight vector per move, one shared vector
// scoring epsilon actions through the embedding of their target state.
struct LinearQ {
  std::size_t feature_dim = 0;
  std::array<std::vector<double>, 4> move_weights;
  std::vector<double> epsilon_weights;

  static LinearQ zeros(std::size_t dim) {
    LinearQ m;
    m.feature_dim = dim;
    for (auto& w : m.move_weights) w.assign(dim, 0.0);
    m.epsilon_weights.assign(dim, 0.0);
    return m;
  }
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Assembles [observation ++ embedding (++ interaction grid)] for one
// (environment, automaton-state) pair.
class FeatureMap {
public:
  FeatureMap(const LetterWorldConfig& env_cfg, std::size_t embedding_dim, bool interaction)
      : grid_(env_cfg.grid),
        obs_size_(static_cast<std::size_t>(env_cfg.grid) * env_cfg.grid *
                  (env_cfg.letters.size() + 1)),
        embedding_dim_(embedding_dim),
        interaction_(interaction) {}

  std::size_t dimension() const {
    return obs_size_ + embedding_dim_ +
           (interaction_ ? static_cast<std::size_t>(grid_) * grid_ : 0);
  }

  std::vector<double> build(const LetterWorld& env, const std::vector<double>& obs,
                            const StateFeatures& state) const {
    std::vector<double> f;
    f.reserve(dimension());
    f.insert(f.end(), obs.begin(), obs.end());
    f.insert(f.end(), state.embedding.begin(), state.embedding.end());
    if (interaction_) {
      for (int vr = 0; vr < grid_; ++vr)
        for (int vc = 0; vc < grid_; ++vc) {
          int letter = env.letter_at_view(vr, vc);
          f.push_back(letter < 0 ? 0.0 : state.letter_delta[static_cast<std::size_t>(letter)]);
        }
    }
    return f;
  }

private:
  int grid_;
  std::size_t obs_size_;
  std::size_t embedding_dim_;
  bool interaction_;
};

namespace detail {

struct ActionValues {
  // features shared by the four moves, one vector per epsilon action
  std::vector<double> move_features;
  std::vector<std::vector<double>> eps_features;
  std::vector<double> q;  // moves first, then epsilon actions

  int best() const {
    int arg = 0;
    for (std::size_t i = 1; i < q.size(); ++i)
      if (q[i] > q[static_cast<std::size_t>(arg)]) arg = static_cast<int>(i);
    return arg;
  }
  double max() const { return q[static_cast<std::size_t>(best())]; }
};

inline ActionValues action_values(const LinearQ& model, const FeatureMap& fmap,
                                  ProductEpisode& ep, TaskEmbedder& embedder) {
  ActionValues av;
  std::vector<double> obs = ep.env().observation();
  const StateFeatures& cur = embedder.get(ep.state());
  av.move_features = fmap.build(ep.env(), obs, cur);
  for (int a = 0; a < 4; ++a)
    av.q.push_back(dot(model.move_weights[static_cast<std::size_t>(a)], av.move_features));
  for (int target : ep.epsilon_ids()) {
    const StateFeatures& tf = embedder.get(ep.explorer().state(target));
    av.eps_features.push_back(fmap.build(ep.env(), obs, tf));
    av.q.push_back(dot(model.epsilon_weights, av.eps_features.back()));
  }
  return av;
}

}  // namespace detail

// One temporal-difference update; only the taken action's weights change and
// terminal targets drop the bootstrap term.
inline void q_update(LinearQ& model, int action, const std::vector<double>& features,
                     double q_taken, double reward, double next_max, bool terminal,
                     double alpha, double gamma) {
  double target = terminal ? reward : reward + gamma * next_max;
  double delta = alpha * (target - q_taken);
  std::vector<double>& w = action < 4 ? model.move_weights[static_cast<std::size_t>(action)]
                                      : model.epsilon_weights;
  if (w.size() != features.size()) throw std::logic_error("q_update: feature dimension mismatch");
  for (std::size_t i = 0; i < w.size(); ++i) w[i] += delta * features[i];
}

struct EpisodeLog {
  long episode = 0;
  std::string task;
  int steps = 0;
  double episode_return = 0.0;
  int accepted_visits = 0;
  std::size_t constructed_states = 0;
  bool success = false;
};

inline nlohmann::json episode_log_to_json(const EpisodeLog& e) {
  return {{"episode", e.episode},
          {"task", e.task},
          {"steps", e.steps},
          {"return", e.episode_return},
          {"accepted_visits", e.accepted_visits},
          {"constructed_states", e.constructed_states},
          {"success", e.success}};
}

struct TrainConfig {
  ProductConfig product;
  std::vector<std::string> ap;
  Alphabet sigma_env;
  QConfig q;
  long max_steps = 50000;
  std::size_t window = 256;
  std::uint64_t seed = 0;
  bool use_curriculum = false;
  int stage = 1;  // task distribution when no custom sampler is given
  std::function<TaskSpec(Rng&)> sampler;
  // Which episodes count toward the tracked success window (default: all).
  std::function<bool(const TaskSpec&)> window_filter;
  double target_sr = -1.0;  // stop early once the tracked window reaches this
  std::function<void(const EpisodeLog&)> on_episode;
};

struct TrainResult {
  LinearQ model;
  long steps = 0;
  long episodes = 0;
  int stage = 1;
  double window_sr = 0.0;
  long steps_to_target = -1;
};

namespace detail {

inline TaskSpec default_stage_task(int stage, const std::vector<std::string>& pool, Rng& rng) {
  TaskSpec spec;
  spec.family = TaskFamily::Small;
  spec.pool = pool;
  spec.formula = sample_stage_task(stage, pool, rng);
  spec.guarantee = is_guarantee(spec.formula);
  return spec;
}

}  // namespace detail

inline TrainResult train(const TrainConfig& cfg) {
  FeatureMap fmap(cfg.product.env, EmbeddingConfig{cfg.ap, cfg.sigma_env}.dimension(),
                  cfg.q.interaction_features);
  TrainResult result;
  result.model = LinearQ::zeros(fmap.dimension());
  Rng task_rng(Rng::mix(cfg.seed, 0xA11CE));
  Rng explore_rng(Rng::mix(cfg.seed, 0x5EED));

  std::map<Formula, std::unique_ptr<TaskEmbedder>> embedders;
  auto embedder_for = [&](const Formula& f) -> TaskEmbedder& {
    auto it = embedders.find(f);
    if (it == embedders.end())
      it = embedders
               .emplace(f, std::make_unique<TaskEmbedder>(f, cfg.ap, cfg.sigma_env,
                                                          cfg.product.env.letters))
               .first;
    return *it->second;
  };

  std::vector<double> window;       // tracked episode successes (filtered)
  std::vector<double> stage_window; // all episodes, drives the curriculum
  long steps = 0;

  while (steps < cfg.max_steps) {
    TaskSpec task = cfg.sampler
                        ? cfg.sampler(task_rng)
                        : detail::default_stage_task(result.stage, cfg.product.env.letters,
                                                     task_rng);
    TaskEmbedder& embedder = embedder_for(task.formula);
    ProductEpisode ep(task.formula, task.guarantee, cfg.product,
                      Rng::mix(cfg.seed, static_cast<std::uint64_t>(result.episodes)));
    detail::ActionValues av = detail::action_values(result.model, fmap, ep, embedder);
    while (!ep.done() && steps < cfg.max_steps) {
      double frac = cfg.q.eps_decay_steps > 0
                        ? std::min(1.0, static_cast<double>(steps) /
                                            static_cast<double>(cfg.q.eps_decay_steps))
                        : 1.0;
      double eps = cfg.q.eps_start + (cfg.q.eps_end - cfg.q.eps_start) * frac;
      int action = explore_rng.chance(eps)
                       ? static_cast<int>(explore_rng.pick(static_cast<std::size_t>(av.q.size())))
                       : av.best();
      const std::vector<double>& feat =
          action < 4 ? av.move_features : av.eps_features[static_cast<std::size_t>(action - 4)];
      double q_taken = av.q[static_cast<std::size_t>(action)];
      // epsilon actions advance only the automaton and cost no env step
      ProductEpisode::StepResult sr = ep.apply(action);
      if (action < 4) ++steps;
      detail::ActionValues next;
      double next_max = 0.0;
      if (!ep.done()) {
        next = detail::action_values(result.model, fmap, ep, embedder);
        next_max = next.max();
      }
      q_update(result.model, action, feat, q_taken, sr.reward, next_max, ep.done(),
               cfg.q.alpha, cfg.q.gamma);
      if (!ep.done()) av = std::move(next);
    }
    ++result.episodes;
    double success = ep.succeeded() ? 1.0 : 0.0;
    if (cfg.on_episode) {
      EpisodeLog log;
      log.episode = result.episodes - 1;
      log.task = render(task.formula);
      log.steps = ep.steps();
      log.episode_return = ep.total_reward();
      log.accepted_visits = ep.accepting_visits();
      log.constructed_states = ep.constructed();
      log.success = ep.succeeded();
      cfg.on_episode(log);
    }
    stage_window.push_back(success);
    if (cfg.use_curriculum) {
      int next_stage = curriculum_advance(stage_window, result.stage, cfg.window);
      if (next_stage != result.stage) {
        result.stage = next_stage;
        stage_window.clear();
      }
    }
    if (!cfg.window_filter || cfg.window_filter(task)) {
      window.push_back(success);
      if (window.size() >= cfg.window) {
        double sum = 0.0;
        for (std::size_t i = window.size() - cfg.window; i < window.size(); ++i)
          sum += window[i];
        result.window_sr = sum / static_cast<double>(cfg.window);
        if (cfg.target_sr >= 0.0 && result.steps_to_target < 0 &&
            result.window_sr >= cfg.target_sr) {
          result.steps_to_target = steps;
          result.steps = steps;
          return result;
        }
      }
    }
  }
  result.steps = steps;
  return result;
}

struct EvalTask {
  std::string name;
  Formula formula;
  bool guarantee = false;
};

struct EvalOptions {
  ProductConfig product;
  std::vector<std::string> ap;
  Alphabet sigma_env;
  bool interaction_features = false;
  int guarantee_horizon = 75;
  int infinite_horizon = 300;
  int episodes = 100;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::function<void(const EpisodeLog&)> on_episode;
};

struct EvalSeedRow {
  std::uint64_t seed = 0;
  double sr = 0.0;
  double mu_acc = 0.0;
  double mu_states = 0.0;
};

struct EvalTaskRow {
  std::string name;
  bool guarantee = false;
  std::vector<EvalSeedRow> per_seed;
  double sr_mean = 0.0, sr_std = 0.0;
  double mu_acc_mean = 0.0, mu_acc_std = 0.0;
  double mu_states_mean = 0.0, mu_states_std = 0.0;
};

struct EvalReport {
  std::vector<EvalTaskRow> tasks;
  double sr_mean = 0.0;
  double mu_acc_mean = 0.0;
  double mu_states_mean = 0.0;
};

namespace detail {

inline std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size());
  return {mean, std::sqrt(var)};
}

}  // namespace detail

// Greedy rollouts (or a uniform random policy when model is null), averaged
// over seeds and episodes. Deterministic for fixed seeds: per-episode rng is
// derived from (seed, task index, episode index).
inline EvalReport evaluate(const LinearQ* model, const std::vector<EvalTask>& tasks,
                           const EvalOptions& opt) {
  EvalReport report;
  FeatureMap fmap(opt.product.env, EmbeddingConfig{opt.ap, opt.sigma_env}.dimension(),
                  opt.interaction_features);
  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    const EvalTask& task = tasks[ti];
    TaskEmbedder embedder(task.formula, opt.ap, opt.sigma_env, opt.product.env.letters);
    EvalTaskRow row;
    row.name = task.name;
    row.guarantee = task.guarantee;
    ProductConfig pc = opt.product;
    pc.episode_limit = task.guarantee ? opt.guarantee_horizon : opt.infinite_horizon;
    for (std::uint64_t seed : opt.seeds) {
      double successes = 0.0, acc = 0.0, states = 0.0;
      for (int e = 0; e < opt.episodes; ++e) {
        std::uint64_t stream =
            Rng::mix(seed, Rng::mix(static_cast<std::uint64_t>(ti), static_cast<std::uint64_t>(e)));
        ProductEpisode ep(task.formula, task.guarantee, pc, stream);
        Rng policy_rng(Rng::mix(stream, 0xAC7ULL));
        while (!ep.done()) {
          int action;
          if (model) {
            action = detail::action_values(*model, fmap, ep, embedder).best();
          } else {
            action = static_cast<int>(policy_rng.pick(static_cast<std::size_t>(ep.action_count())));
          }
          ep.apply(action);
        }
        successes += ep.succeeded() ? 1.0 : 0.0;
        acc += ep.accepting_visits();
        states += static_cast<double>(ep.constructed());
        if (opt.on_episode) {
          EpisodeLog log;
          log.episode = e;
          log.task = task.name;
          log.steps = ep.steps();
          log.episode_return = ep.total_reward();
          log.accepted_visits = ep.accepting_visits();
          log.constructed_states = ep.constructed();
          log.success = ep.succeeded();
          opt.on_episode(log);
        }
      }
      EvalSeedRow sr;
      sr.seed = seed;
      sr.sr = successes / opt.episodes;
      sr.mu_acc = acc / opt.episodes;
      sr.mu_states = states / opt.episodes;
      row.per_seed.push_back(sr);
    }
    auto collect = [&](auto proj) {
      std::vector<double> xs;
      for (const EvalSeedRow& s : row.per_seed) xs.push_back(proj(s));
      return detail::mean_std(xs);
    };
    std::tie(row.sr_mean, row.sr_std) = collect([](const EvalSeedRow& s) { return s.sr; });
    std::tie(row.mu_acc_mean, row.mu_acc_std) =
        collect([](const EvalSeedRow& s) { return s.mu_acc; });
    std::tie(row.mu_states_mean, row.mu_states_std) =
        collect([](const EvalSeedRow& s) { return s.mu_states; });
    report.tasks.push_back(std::move(row));
  }
  double n = static_cast<double>(report.tasks.size());
  for (const EvalTaskRow& row : report.tasks) {
    report.sr_mean += row.sr_mean / n;
    report.mu_acc_mean += row.mu_acc_mean / n;
    report.mu_states_mean += row.mu_states_mean / n;
  }
  return report;
}

inline nlohmann::json eval_report_to_json(const EvalReport& r) {
  nlohmann::json j;
  j["version"] = 1;
  j["tasks"] = nlohmann::json::array();
  for (const EvalTaskRow& row : r.tasks) {
    nlohmann::json jt;
    jt["task"] = row.name;
    jt["guarantee"] = row.guarantee;
    jt["per_seed"] = nlohmann::json::array();
    for (const EvalSeedRow& s : row.per_seed)
      jt["per_seed"].push_back({{"seed", s.seed},
                                {"sr", s.sr},
                                {"mu_acc", s.mu_acc},
                                {"mu_states", s.mu_states}});
    jt["sr"] = {{"mean", row.sr_mean}, {"std", row.sr_std}};
    jt["mu_acc"] = {{"mean", row.mu_acc_mean}, {"std", row.mu_acc_std}};
    jt["mu_states"] = {{"mean", row.mu_states_mean}, {"std", row.mu_states_std}};
    j["tasks"].push_back(std::move(jt));
  }
  j["aggregate"] = {{"sr_mean", r.sr_mean},
                    {"mu_acc_mean", r.mu_acc_mean},
                    {"mu_states_mean", r.mu_states_mean}};
  return j;
}

inline nlohmann::json model_to_json(const LinearQ& model, const EmbeddingConfig& emb,
                                    const QConfig& qcfg, const LetterWorldConfig& env) {
  nlohmann::json j;
  j["version"] = 1;
  j["feature_dim"] = model.feature_dim;
  j["interaction_features"] = qcfg.interaction_features;
  j["gamma"] = qcfg.gamma;
  j["env"] = {{"grid", env.grid}, {"letters", env.letters}, {"copies", env.copies}};
  j["embedding"] = embedding_config_to_json(emb);
  j["layout"] = nlohmann::json::array();
  for (const LayoutBlock& b : emb.layout())
    j["layout"].push_back({{"name", b.name}, {"offset", b.offset}, {"length", b.length}});
  j["weights"]["north"] = model.move_weights[0];
  j["weights"]["east"] = model.move_weights[1];
  j["weights"]["south"] = model.move_weights[2];
  j["weights"]["west"] = model.move_weights[3];
  j["weights"]["epsilon"] = model.epsilon_weights;
  return j;
}

struct ModelBundle {
  LinearQ model;
  EmbeddingConfig embedding;
  QConfig qcfg;
  LetterWorldConfig env;
};

inline ModelBundle model_from_json(const nlohmann::json& j) {
  ModelBundle b;
  b.embedding = embedding_config_from_json(j.at("embedding"));
  b.qcfg.interaction_features = j.value("interaction_features", false);
  b.qcfg.gamma = j.value("gamma", 0.94);
  b.env.grid = j.at("env").at("grid").get<int>();
  b.env.letters = j.at("env").at("letters").get<std::vector<std::string>>();
  b.env.copies = j.at("env").at("copies").get<int>();
  b.model.feature_dim = j.at("feature_dim").get<std::size_t>();
  b.model.move_weights[0] = j.at("weights").at("north").get<std::vector<double>>();
  b.model.move_weights[1] = j.at("weights").at("east").get<std::vector<double>>();
  b.model.move_weights[2] = j.at("weights").at("south").get<std::vector<double>>();
  b.model.move_weights[3] = j.at("weights").at("west").get<std::vector<double>>();
  b.model.epsilon_weights = j.at("weights").at("epsilon").get<std::vector<double>>();
  for (const auto& w : b.model.move_weights)
    if (w.size() != b.model.feature_dim)
      throw std::invalid_argument("model: weight size does not match feature_dim");
  if (b.model.epsilon_weights.size() != b.model.feature_dim)
    throw std::invalid_argument("model: weight size does not match feature_dim");
  return b;
}

}  // namespace ltlsem
