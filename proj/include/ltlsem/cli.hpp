#pragma once

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ltlsem/automaton.hpp"
#include "ltlsem/embedding.hpp"
#include "ltlsem/obligations.hpp"
#include "ltlsem/parse.hpp"
#include "ltlsem/progression.hpp"
#include "ltlsem/qlearn.hpp"
#include "ltlsem/tasks.hpp"
#include "ltlsem/trueness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

namespace ltlsem::cli {

// Exit codes: 0 success, 1 user error, 2 a cap or limit was exceeded.
constexpr int kOk = 0;
constexpr int kUserError = 1;
constexpr int kCapExceeded = 2;

// Command-line letter syntax: ',' separates proposition names within a
// letter, ';' separates letters of a word, an empty segment is the empty
// letter. "a,b;;c" is the word {a,b} {} {c}.
inline Letter parse_letter(const std::string& text) {
  std::vector<std::string> names;
  std::string cur;
  std::stringstream ss(text);
  while (std::getline(ss, cur, ','))
    if (!cur.empty()) names.push_back(cur);
  return Letter(std::move(names));
}

inline std::vector<Letter> parse_word(const std::string& text) {
  std::vector<Letter> letters;
  if (text.empty()) return letters;
  std::size_t start = 0;
  while (true) {
    std::size_t semi = text.find(';', start);
    letters.push_back(parse_letter(text.substr(start, semi - start)));
    if (semi == std::string::npos) break;
    start = semi + 1;
  }
  return letters;
}

inline std::string letter_text(const Letter& sigma) {
  std::string out = "{";
  for (std::size_t i = 0; i < sigma.props().size(); ++i) {
    if (i) out += ",";
    out += sigma.props()[i];
  }
  return out + "}";
}

namespace detail {

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file '" + path + "'");
  nlohmann::json j;
  in >> j;
  return j;
}

inline Alphabet alphabet_from_json(const nlohmann::json& j) {
  std::vector<Letter> letters;
  for (const auto& l : j)
    letters.push_back(Letter(l.get<std::vector<std::string>>()));
  return make_alphabet(std::move(letters));
}

inline void emit(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << "\n"; }

struct EnvSettings {
  LetterWorldConfig env;
  int episode_limit = 75;
};

inline EnvSettings env_from_json(const nlohmann::json& j) {
  EnvSettings s;
  if (j.contains("env")) {
    const auto& e = j.at("env");
    s.env.grid = e.value("grid", s.env.grid);
    if (e.contains("letters")) s.env.letters = e.at("letters").get<std::vector<std::string>>();
    s.env.copies = e.value("copies", s.env.copies);
  }
  s.episode_limit = j.value("episode_limit", 75);
  return s;
}

inline QConfig qconfig_from_json(const nlohmann::json& j) {
  QConfig q;
  if (!j.contains("q")) return q;
  const auto& jq = j.at("q");
  q.alpha = jq.value("alpha", q.alpha);
  q.gamma = jq.value("gamma", q.gamma);
  q.eps_start = jq.value("eps_start", q.eps_start);
  q.eps_end = jq.value("eps_end", q.eps_end);
  q.eps_decay_steps = jq.value("eps_decay_steps", q.eps_decay_steps);
  q.interaction_features = jq.value("interaction_features", q.interaction_features);
  return q;
}

inline std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) seeds.push_back(std::stoull(item));
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LTL task toolkit: progression, semantic automata, embeddings, gridworld RL"};
  app.require_subcommand(1);
  bool json_mode = false;
  app.add_flag("--json", json_mode, "emit one JSON document instead of text");

  // parse
  std::string parse_formula_text;
  CLI::App* cmd_parse = app.add_subcommand("parse", "parse and canonicalize a formula");
  cmd_parse->add_option("formula", parse_formula_text)->required();

  // progress
  std::string prog_formula_text, prog_letter_text;
  CLI::App* cmd_prog = app.add_subcommand("progress", "progress a formula by one letter");
  cmd_prog->add_option("formula", prog_formula_text)->required();
  cmd_prog->add_option("--letter", prog_letter_text, "comma-separated proposition names");

  // trueness
  std::string tr_formula_text;
  CLI::App* cmd_tr = app.add_subcommand("trueness", "satisfying-assignment ratio");
  cmd_tr->add_option("formula", tr_formula_text)->required();

  // obligations
  std::string ob_formula_text, ob_alphabet_text, ob_alphabet_file;
  bool ob_full_ap = false;
  CLI::App* cmd_ob = app.add_subcommand("obligations", "letters whose repetition satisfies");
  cmd_ob->add_option("formula", ob_formula_text)->required();
  cmd_ob->add_option("--alphabet", ob_alphabet_text, "';'-separated letters");
  cmd_ob->add_option("--alphabet-file", ob_alphabet_file, "JSON array of letters");
  cmd_ob->add_flag("--full-ap", ob_full_ap, "use all of 2^AP over the formula's atoms");

  // embed
  std::string emb_formula_text, emb_breakpoint_text, emb_config_file;
  CLI::App* cmd_emb = app.add_subcommand("embed", "semantic embedding of a state");
  cmd_emb->add_option("formula", emb_formula_text)->required();
  cmd_emb->add_option("--breakpoint", emb_breakpoint_text, "breakpoint formula (accepting component)");
  cmd_emb->add_option("--config", emb_config_file, "embedding config JSON")->required();

  // automaton
  std::string aut_formula_text, aut_alphabet_text;
  bool aut_full_ap = false;
  std::size_t aut_cap = 10000;
  CLI::App* cmd_aut = app.add_subcommand("automaton", "build the full automaton");
  cmd_aut->add_option("formula", aut_formula_text)->required();
  cmd_aut->add_option("--alphabet", aut_alphabet_text, "';'-separated letters");
  cmd_aut->add_flag("--full-ap", aut_full_ap);
  cmd_aut->add_option("--cap", aut_cap, "state cap");

  // accepts
  std::string acc_formula_text, acc_prefix_text, acc_loop_text;
  CLI::App* cmd_acc = app.add_subcommand("accepts", "check a lasso word against the automaton");
  cmd_acc->add_option("formula", acc_formula_text)->required();
  cmd_acc->add_option("--prefix", acc_prefix_text, "';'-separated letters (may be empty)");
  cmd_acc->add_option("--loop", acc_loop_text, "';'-separated letters, nonempty")->required();

  // sample
  std::string smp_family = "localsafety";
  int smp_k = 1, smp_m = 1;
  std::uint64_t smp_seed = 0;
  std::vector<std::string> smp_pool;
  CLI::App* cmd_smp = app.add_subcommand("sample", "sample a task from a family template");
  cmd_smp->add_option("--family", smp_family)->required();
  cmd_smp->add_option("--k", smp_k);
  cmd_smp->add_option("--m", smp_m);
  cmd_smp->add_option("--seed", smp_seed);
  cmd_smp->add_option("--pool", smp_pool, "proposition pool (default: a..l)");

  // train
  std::string train_config_file, train_out_file, train_log_file;
  std::uint64_t train_seed = 0;
  CLI::App* cmd_train = app.add_subcommand("train", "train the linear Q learner");
  cmd_train->add_option("--config", train_config_file)->required();
  cmd_train->add_option("--seed", train_seed);
  cmd_train->add_option("--out", train_out_file, "model checkpoint path")->required();
  cmd_train->add_option("--log", train_log_file, "episode log (JSON lines)");

  // eval
  std::string eval_model_file, eval_tasks_file, eval_log_file, eval_out_file;
  int eval_episodes = 100;
  std::string eval_seeds_text = "0,1,2,3,4";
  bool eval_random_policy = false;
  CLI::App* cmd_eval = app.add_subcommand("eval", "greedy evaluation of a model");
  cmd_eval->add_option("--model", eval_model_file);
  cmd_eval->add_flag("--random", eval_random_policy, "evaluate the uniform random policy");
  cmd_eval->add_option("--tasks", eval_tasks_file, "JSON task list")->required();
  cmd_eval->add_option("--episodes", eval_episodes);
  cmd_eval->add_option("--seeds", eval_seeds_text, "comma-separated seed list");
  cmd_eval->add_option("--log", eval_log_file, "episode log (JSON lines)");
  cmd_eval->add_option("--out", eval_out_file, "write the report JSON here too");

  // bench
  std::string bench_family = "localsafety";
  int bench_k = 3, bench_m = 3, bench_tasks = 5, bench_episodes = 50;
  std::uint64_t bench_seed = 0;
  std::size_t bench_cap = 10000;
  std::uint64_t bench_path_cap = 10000000;
  bool bench_paths = false;
  std::string bench_model_file;
  std::vector<std::string> bench_pool;
  CLI::App* cmd_bench = app.add_subcommand(
      "bench", "full automaton size vs on-the-fly constructed states");
  cmd_bench->add_option("--family", bench_family);
  cmd_bench->add_option("--k", bench_k);
  cmd_bench->add_option("--m", bench_m);
  cmd_bench->add_option("--tasks", bench_tasks);
  cmd_bench->add_option("--episodes", bench_episodes);
  cmd_bench->add_option("--seed", bench_seed);
  cmd_bench->add_option("--cap", bench_cap);
  cmd_bench->add_flag("--paths", bench_paths, "also count simple paths from the initial state");
  cmd_bench->add_option("--path-cap", bench_path_cap,
                        "stop counting paths beyond this many (reported as over cap)");
  cmd_bench->add_option("--model", bench_model_file, "greedy policy model (default: random)");
  cmd_bench->add_option("--pool", bench_pool, "proposition pool (default: env letters)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());  // CLI11 order
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    out << app.help() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kUserError;
  }

  try {
    if (*cmd_parse) {
      Formula f = parse(parse_formula_text);
      if (json_mode)
        detail::emit(out, {{"version", 1}, {"formula", render(f)}});
      else
        out << render(f) << "\n";
      return kOk;
    }

    if (*cmd_prog) {
      Formula f = parse(prog_formula_text);
      Formula g = prog(f, parse_letter(prog_letter_text));
      if (json_mode)
        detail::emit(out, {{"version", 1}, {"formula", render(g)}});
      else
        out << render(g) << "\n";
      return kOk;
    }

    if (*cmd_tr) {
      Trueness t = trueness(parse(tr_formula_text));
      if (json_mode)
        detail::emit(out, {{"version", 1},
                           {"numerator", t.sat},
                           {"denominator", t.total},
                           {"value", t.value()}});
      else
        out << t.sat << "/" << t.total << " (" << t.value() << ")\n";
      return kOk;
    }

    auto resolve_alphabet = [](const Formula& f, const std::string& inline_text,
                               const std::string& file, bool full) {
      if (full) return full_alphabet(atom_names(f));
      if (!file.empty()) return detail::alphabet_from_json(detail::load_json_file(file));
      if (!inline_text.empty()) return make_alphabet(parse_word(inline_text));
      throw std::invalid_argument("one of --alphabet, --alphabet-file, --full-ap is required");
    };

    if (*cmd_ob) {
      Formula f = parse(ob_formula_text);
      Alphabet alphabet = resolve_alphabet(f, ob_alphabet_text, ob_alphabet_file, ob_full_ap);
      ObligationSet obs = obligations(f, alphabet);
      if (json_mode) {
        nlohmann::json j{{"version", 1}, {"obligations", nlohmann::json::array()}};
        for (const Letter& sigma : obs) j["obligations"].push_back(sigma.props());
        detail::emit(out, j);
      } else {
        for (const Letter& sigma : obs) out << letter_text(sigma) << "\n";
        if (obs.empty()) out << "(empty)\n";
      }
      return kOk;
    }

    if (*cmd_emb) {
      EmbeddingConfig cfg = embedding_config_from_json(detail::load_json_file(emb_config_file));
      Formula m = parse(emb_formula_text);
      SemanticState q;
      if (!emb_breakpoint_text.empty()) {
        q = SemanticState{m, parse(emb_breakpoint_text), Component::Accepting, false};
      } else {
        q = initial_state(m);
      }
      std::vector<double> v = embed_state(q, cfg);
      nlohmann::json j{{"version", 1}, {"vector", v}, {"layout", nlohmann::json::array()}};
      for (const LayoutBlock& b : cfg.layout())
        j["layout"].push_back({{"name", b.name}, {"offset", b.offset}, {"length", b.length}});
      detail::emit(out, j);
      return kOk;
    }

    if (*cmd_aut) {
      Formula f = parse(aut_formula_text);
      Alphabet alphabet = resolve_alphabet(f, aut_alphabet_text, "", aut_full_ap);
      Automaton aut = build_full(f, alphabet, aut_cap);
      if (json_mode) {
        detail::emit(out, automaton_to_json(aut));
      } else {
        out << "states: " << aut.states.size() << "\n";
        out << "transitions: " << aut.transition_count() << "\n";
        for (std::size_t i = 0; i < aut.states.size(); ++i) {
          const SemanticState& s = aut.states[i];
          out << "  q" << i << (s.accepting ? " *" : "  ") << " ["
              << (s.component == Component::Initial ? "I" : "A") << "] M: " << render(s.main);
          if (s.breakpoint) out << "  B: " << render(*s.breakpoint);
          out << "\n";
        }
      }
      return kOk;
    }

    if (*cmd_acc) {
      Formula f = parse(acc_formula_text);
      LassoWord w(parse_word(acc_prefix_text), parse_word(acc_loop_text));
      std::vector<Letter> all = w.prefix;
      all.insert(all.end(), w.loop.begin(), w.loop.end());
      for (const std::string& a : atom_names(f)) all.push_back(Letter{a});
      all.push_back(Letter{});
      bool accepted = accepts_lasso(f, w, make_alphabet(std::move(all)));
      if (json_mode)
        detail::emit(out, {{"version", 1}, {"accepts", accepted}});
      else
        out << (accepted ? "true" : "false") << "\n";
      return kOk;
    }

    if (*cmd_smp) {
      if (smp_pool.empty())
        smp_pool = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"};
      Rng rng(smp_seed);
      TaskSpec spec = sample_task(family_from_name(smp_family), smp_k, smp_m, smp_pool, rng);
      if (json_mode)
        detail::emit(out, {{"version", 1},
                           {"family", family_name(spec.family)},
                           {"k", spec.k},
                           {"m", spec.m},
                           {"formula", render(spec.formula)},
                           {"guarantee", spec.guarantee}});
      else
        out << render(spec.formula) << "\n";
      return kOk;
    }

    if (*cmd_train) {
      nlohmann::json jc = detail::load_json_file(train_config_file);
      detail::EnvSettings env = detail::env_from_json(jc);
      TrainConfig cfg;
      cfg.product.env = env.env;
      cfg.product.episode_limit = env.episode_limit;
      cfg.ap = env.env.letters;
      cfg.sigma_env = env.env.label_set();
      cfg.q = detail::qconfig_from_json(jc);
      cfg.max_steps = jc.value("max_steps", 50000L);
      cfg.window = jc.value("window", std::size_t{256});
      cfg.seed = train_seed;
      cfg.use_curriculum = jc.value("curriculum", false);
      cfg.stage = jc.value("stage", 1);
      if (jc.contains("tasks")) {
        std::vector<TaskSpec> fixed;
        for (const auto& t : jc.at("tasks")) {
          TaskSpec spec;
          spec.formula = parse(t.get<std::string>());
          spec.guarantee = is_guarantee(spec.formula);
          spec.pool = cfg.ap;
          fixed.push_back(std::move(spec));
        }
        cfg.sampler = [fixed](Rng& rng) { return fixed[rng.pick(fixed.size())]; };
      }
      std::ofstream log_stream;
      if (!train_log_file.empty()) {
        log_stream.open(train_log_file);
        if (!log_stream) throw std::invalid_argument("cannot open log file");
        cfg.on_episode = [&log_stream](const EpisodeLog& e) {
          log_stream << episode_log_to_json(e).dump() << "\n";
        };
      }
      TrainResult r = train(cfg);
      EmbeddingConfig emb{cfg.ap, cfg.sigma_env};
      std::ofstream model_out(train_out_file);
      if (!model_out) throw std::invalid_argument("cannot open output file");
      model_out << model_to_json(r.model, emb, cfg.q, cfg.product.env).dump(2) << "\n";
      nlohmann::json j{{"version", 1},
                       {"steps", r.steps},
                       {"episodes", r.episodes},
                       {"stage", r.stage},
                       {"window_sr", r.window_sr},
                       {"model", train_out_file}};
      if (json_mode)
        detail::emit(out, j);
      else
        out << "trained " << r.steps << " steps over " << r.episodes
            << " episodes; window SR " << r.window_sr << "; model written to "
            << train_out_file << "\n";
      return kOk;
    }

    if (*cmd_eval) {
      if (eval_model_file.empty() == !eval_random_policy)
        throw std::invalid_argument("exactly one of --model or --random is required");
      nlohmann::json jt = detail::load_json_file(eval_tasks_file);
      detail::EnvSettings env = detail::env_from_json(jt);
      EvalOptions opt;
      opt.product.env = env.env;
      opt.ap = env.env.letters;
      opt.sigma_env = env.env.label_set();
      opt.guarantee_horizon = jt.value("guarantee_horizon", env.episode_limit);
      opt.infinite_horizon = jt.value("infinite_horizon", 300);
      opt.episodes = eval_episodes;
      opt.seeds = detail::parse_seed_list(eval_seeds_text);
      std::optional<ModelBundle> bundle;
      if (!eval_model_file.empty()) {
        bundle = model_from_json(detail::load_json_file(eval_model_file));
        opt.product.env = bundle->env;
        opt.ap = bundle->embedding.ap;
        opt.sigma_env = bundle->embedding.sigma_env;
        opt.interaction_features = bundle->qcfg.interaction_features;
      }
      std::vector<EvalTask> tasks;
      for (const auto& t : jt.at("tasks")) {
        EvalTask task;
        if (t.is_string()) {
          task.name = t.get<std::string>();
          task.formula = parse(task.name);
        } else {
          task.formula = parse(t.at("formula").get<std::string>());
          task.name = t.value("name", render(task.formula));
        }
        task.guarantee = is_guarantee(task.formula);
        tasks.push_back(std::move(task));
      }
      std::ofstream log_stream;
      if (!eval_log_file.empty()) {
        log_stream.open(eval_log_file);
        if (!log_stream) throw std::invalid_argument("cannot open log file");
        opt.on_episode = [&log_stream](const EpisodeLog& e) {
          log_stream << episode_log_to_json(e).dump() << "\n";
        };
      }
      EvalReport report = evaluate(bundle ? &bundle->model : nullptr, tasks, opt);
      nlohmann::json j = eval_report_to_json(report);
      if (!eval_out_file.empty()) {
        std::ofstream report_out(eval_out_file);
        report_out << j.dump(2) << "\n";
      }
      if (json_mode) {
        detail::emit(out, j);
      } else {
        for (const EvalTaskRow& row : report.tasks)
          out << row.name << ": SR " << row.sr_mean << " +- " << row.sr_std << ", mu_acc "
              << row.mu_acc_mean << " +- " << row.mu_acc_std << ", mu_states "
              << row.mu_states_mean << " +- " << row.mu_states_std << "\n";
        out << "aggregate: SR " << report.sr_mean << ", mu_acc " << report.mu_acc_mean
            << ", mu_states " << report.mu_states_mean << "\n";
      }
      return kOk;
    }

    if (*cmd_bench) {
      LetterWorldConfig env;  // 7x7, 12 letters
      if (!bench_pool.empty()) env.letters = bench_pool;
      std::optional<ModelBundle> bundle;
      if (!bench_model_file.empty()) {
        bundle = model_from_json(detail::load_json_file(bench_model_file));
        env = bundle->env;
      }
      Alphabet sigma_env = env.label_set();
      Rng rng(bench_seed);
      nlohmann::json rows = nlohmann::json::array();
      for (int t = 0; t < bench_tasks; ++t) {
        TaskSpec spec =
            sample_task(family_from_name(bench_family), bench_k, bench_m, env.letters, rng);
        Automaton aut = build_full(spec.formula, sigma_env, bench_cap);
        EvalOptions opt;
        opt.product.env = env;
        opt.ap = bundle ? bundle->embedding.ap : env.letters;
        opt.sigma_env = bundle ? bundle->embedding.sigma_env : sigma_env;
        opt.interaction_features = bundle && bundle->qcfg.interaction_features;
        opt.episodes = bench_episodes;
        opt.seeds = {bench_seed};
        EvalTask task{render(spec.formula), spec.formula, spec.guarantee};
        EvalReport rep = evaluate(bundle ? &bundle->model : nullptr, {task}, opt);
        nlohmann::json row{{"formula", render(spec.formula)},
                           {"full_states", aut.states.size()},
                           {"full_transitions", aut.transition_count()},
                           {"mu_states", rep.tasks[0].mu_states_mean},
                           {"policy", bundle ? "greedy" : "random"}};
        if (bench_paths) {
          try {
            row["simple_paths"] = count_simple_paths(aut, aut.initial, bench_path_cap);
          } catch (const CapError&) {
            row["simple_paths"] = nullptr;
            row["simple_paths_over"] = bench_path_cap;
          }
          // loose factorial bound on simple path counts in any digraph
          double bound = std::exp(1.0);
          for (std::size_t i = 2; i <= aut.states.size(); ++i)
            bound *= static_cast<double>(i);
          row["e_times_q_factorial"] = bound;
        }
        rows.push_back(std::move(row));
      }
      if (json_mode) {
        detail::emit(out, {{"version", 1}, {"tasks", rows}});
      } else {
        for (const auto& row : rows) {
          out << row.at("formula").get<std::string>() << "\n  |Q| = " << row.at("full_states")
              << ", |delta| = " << row.at("full_transitions")
              << ", mu_states = " << row.at("mu_states") << " (" << row.at("policy").get<std::string>()
              << " policy)";
          if (bench_paths) {
            if (row.at("simple_paths").is_null())
              out << ", simple paths > " << row.at("simple_paths_over");
            else
              out << ", simple paths = " << row.at("simple_paths");
            out << " (bound e*|Q|! = " << row.at("e_times_q_factorial").get<double>() << ")";
          }
          out << "\n";
        }
      }
      return kOk;
    }
  } catch (const CapError& e) {
    err << "limit exceeded: " << e.what() << "\n";
    return kCapExceeded;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUserError;
  }
  err << "no subcommand\n";
  return kUserError;
}

}  // namespace ltlsem::cli
