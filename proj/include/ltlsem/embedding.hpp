#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "ltlsem/automaton.hpp"
#include "ltlsem/formula.hpp"
#include "ltlsem/obligations.hpp"
#include "ltlsem/progression.hpp"
#include "ltlsem/trueness.hpp"
#include "ltlsem/word.hpp"

#include <json.hpp>

namespace ltlsem {

enum class Norm { Raw, MinMax, Extreme, ReachAvoid };

inline const char* norm_name(Norm n) {
  switch (n) {
    case Norm::Raw: return "raw";
    case Norm::MinMax: return "minmax";
    case Norm::Extreme: return "extreme";
    case Norm::ReachAvoid: return "reachavoid";
  }
  return "?";
}

struct LayoutBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t length = 0;
};

// Fixed per trained model: the proposition order, the environment label set
// and the normalisation variants determine the vector layout, and the
// reference counts (taken from the initial task formula) scale the
// complexity features.
struct EmbeddingConfig {
  std::vector<std::string> ap;
  Alphabet sigma_env;
  std::vector<Norm> normalizations{Norm::Raw, Norm::MinMax, Norm::Extreme, Norm::ReachAvoid};
  int ref_height = 1;
  int ref_conjuncts = 1;
  int ref_disjuncts = 1;

  static EmbeddingConfig for_task(const Formula& task, std::vector<std::string> ap,
                                  Alphabet sigma_env) {
    EmbeddingConfig cfg;
    cfg.ap = std::move(ap);
    cfg.sigma_env = std::move(sigma_env);
    cfg.ref_height = std::max(1, height(task));
    cfg.ref_conjuncts = std::max(1, conjunct_count(task));
    cfg.ref_disjuncts = std::max(1, disjunct_count(task));
    return cfg;
  }

  std::size_t formula_block_length() const {
    return normalizations.size() * sigma_env.size() + 2 * ap.size() * ap.size() + 4;
  }

  // Two formula blocks (Main, Breakpoint-or-tt) plus the presence flag.
  std::size_t dimension() const { return 2 * formula_block_length() + 1; }

  std::vector<LayoutBlock> layout() const {
    std::vector<LayoutBlock> blocks;
    std::size_t off = 0;
    for (const char* side : {"main", "breakpoint"}) {
      for (Norm n : normalizations) {
        blocks.push_back({std::string(side) + ".trueness." + norm_name(n), off, sigma_env.size()});
        off += sigma_env.size();
      }
      blocks.push_back({std::string(side) + ".attention.pos", off, ap.size() * ap.size()});
      off += ap.size() * ap.size();
      blocks.push_back({std::string(side) + ".attention.neg", off, ap.size() * ap.size()});
      off += ap.size() * ap.size();
      blocks.push_back({std::string(side) + ".complexity", off, 4});
      off += 4;
    }
    blocks.push_back({"breakpoint.flag", off, 1});
    return blocks;
  }
};

// Trueness delta of one letter: tr(prog(f, sigma)) - tr(f), in [-1, 1].
inline double f_trueness(const Formula& f, const Letter& sigma) {
  return trueness(prog(f, sigma)).value() - trueness(f).value();
}

// Normalisation variants over the per-letter trueness values.
inline std::vector<double> normalize(std::vector<double> values, Norm mode) {
  if (values.empty() || mode == Norm::Raw) return values;
  const double lo = *std::min_element(values.begin(), values.end());
  const double hi = *std::max_element(values.begin(), values.end());
  switch (mode) {
    case Norm::Raw:
      return values;
    case Norm::MinMax:
      for (double& x : values) x = (hi == lo) ? 0.5 : (x - lo) / (hi - lo);
      return values;
    case Norm::Extreme:
      if (hi == lo) return values;
      for (double& x : values)
        if (x != lo && x != hi) x = 0.0;
      return values;
    case Norm::ReachAvoid:
      for (double& x : values) {
        if (x > 0.0)
          x = x / hi;
        else if (x < 0.0)
          x = x / lo;
        else
          x = 0.0;
      }
      return values;
  }
  return values;
}

// Propositional attention for the ordered pair (p, q): the share of
// obligation letters of prog(f, {p}) that contain q (positive polarity) or
// exclude q (negative polarity); 0 when there are no obligations.
inline double f_attention(const Formula& f, const std::string& p, const std::string& q,
                          bool positive, const Alphabet& sigma_env) {
  Formula after = prog(f, Letter{p});
  ObligationSet obs = obligations(after, sigma_env);
  if (obs.empty()) return 0.0;
  std::size_t hits = 0;
  for (const Letter& o : obs)
    if (o.contains(q) == positive) ++hits;
  return static_cast<double>(hits) / static_cast<double>(obs.size());
}

// [height, conjuncts, disjuncts, plain trueness], the first three clamped
// against the reference counts of the initial task formula.
inline std::array<double, 4> complexity_features(const Formula& f, const EmbeddingConfig& cfg) {
  auto clamp01 = [](double x) { return std::min(x, 1.0); };
  return {clamp01(static_cast<double>(height(f)) / cfg.ref_height),
          clamp01(static_cast<double>(conjunct_count(f)) / cfg.ref_conjuncts),
          clamp01(static_cast<double>(disjunct_count(f)) / cfg.ref_disjuncts),
          trueness(f).value()};
}

namespace detail {

inline void embed_formula(const Formula& f, const EmbeddingConfig& cfg,
                          std::vector<double>& out) {
  std::vector<double> raw;
  raw.reserve(cfg.sigma_env.size());
  for (const Letter& sigma : cfg.sigma_env) raw.push_back(f_trueness(f, sigma));
  for (Norm mode : cfg.normalizations) {
    std::vector<double> block = normalize(raw, mode);
    out.insert(out.end(), block.begin(), block.end());
  }
  for (bool positive : {true, false})
    for (const std::string& p : cfg.ap)
      for (const std::string& q : cfg.ap)
        out.push_back(f_attention(f, p, q, positive, cfg.sigma_env));
  std::array<double, 4> cx = complexity_features(f, cfg);
  out.insert(out.end(), cx.begin(), cx.end());
}

}  // namespace detail

// Semantic embedding of an automaton state: the Main block, the Breakpoint
// block (tt stands in when absent) and a trailing presence flag.
inline std::vector<double> embed_state(const SemanticState& q, const EmbeddingConfig& cfg) {
  std::vector<double> out;
  out.reserve(cfg.dimension());
  detail::embed_formula(q.main, cfg, out);
  detail::embed_formula(q.breakpoint ? *q.breakpoint : Formula::tt(), cfg, out);
  out.push_back(q.breakpoint ? 1.0 : 0.0);
  return out;
}

inline nlohmann::json embedding_config_to_json(const EmbeddingConfig& cfg) {
  nlohmann::json j;
  j["ap"] = cfg.ap;
  j["sigma_env"] = nlohmann::json::array();
  for (const Letter& sigma : cfg.sigma_env) j["sigma_env"].push_back(sigma.props());
  j["normalizations"] = nlohmann::json::array();
  for (Norm n : cfg.normalizations) j["normalizations"].push_back(norm_name(n));
  j["ref_height"] = cfg.ref_height;
  j["ref_conjuncts"] = cfg.ref_conjuncts;
  j["ref_disjuncts"] = cfg.ref_disjuncts;
  return j;
}

inline EmbeddingConfig embedding_config_from_json(const nlohmann::json& j) {
  EmbeddingConfig cfg;
  cfg.ap = j.at("ap").get<std::vector<std::string>>();
  std::vector<Letter> letters;
  for (const auto& l : j.at("sigma_env"))
    letters.push_back(Letter(l.get<std::vector<std::string>>()));
  cfg.sigma_env = make_alphabet(std::move(letters));
  if (j.contains("normalizations")) {
    cfg.normalizations.clear();
    for (const auto& n : j.at("normalizations")) {
      std::string s = n.get<std::string>();
      if (s == "raw") cfg.normalizations.push_back(Norm::Raw);
      else if (s == "minmax") cfg.normalizations.push_back(Norm::MinMax);
      else if (s == "extreme") cfg.normalizations.push_back(Norm::Extreme);
      else if (s == "reachavoid") cfg.normalizations.push_back(Norm::ReachAvoid);
      else throw std::invalid_argument("unknown normalization '" + s + "'");
    }
  }
  cfg.ref_height = j.value("ref_height", 1);
  cfg.ref_conjuncts = j.value("ref_conjuncts", 1);
  cfg.ref_disjuncts = j.value("ref_disjuncts", 1);
  return cfg;
}

}  // namespace ltlsem
