#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ltlsem/cli.hpp"

using ltlsem::cli::run;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& content) {
  std::string path = std::string("cli_test_") + name;
  std::ofstream f(path);
  f << content;
  return path;
}

}  // namespace

TEST_CASE("cli letter and word syntax") {
  using ltlsem::cli::parse_letter;
  using ltlsem::cli::parse_word;
  REQUIRE(parse_letter("a,b") == ltlsem::Letter{"a", "b"});
  REQUIRE(parse_letter("") == ltlsem::Letter{});
  std::vector<ltlsem::Letter> w = parse_word("a,b;;c");
  REQUIRE(w.size() == 3);
  REQUIRE(w[0] == ltlsem::Letter{"a", "b"});
  REQUIRE(w[1] == ltlsem::Letter{});
  REQUIRE(w[2] == ltlsem::Letter{"c"});
  REQUIRE(parse_word("").empty());
  REQUIRE(parse_word("ab;;").size() == 3);
}

TEST_CASE("cli parse/progress/trueness/accepts golden") {
  CliResult r = cli({"progress", "F(r & F G y)", "--letter", "r"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out == "F G y\n");

  r = cli({"trueness", "F r & F G y"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out.find("1/4") == 0);
  REQUIRE(r.out.find("0.25") != std::string::npos);

  r = cli({"accepts", "F r & F G y", "--prefix", "r", "--loop", "y"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out == "true\n");

  r = cli({"accepts", "F r & F G y", "--prefix", "", "--loop", ";"});
  REQUIRE(r.out == "false\n");

  r = cli({"parse", "a -> b"});
  REQUIRE(r.out == "b | (!a)\n");  // canonical order: atoms before negations

  r = cli({"--json", "trueness", "F G y"});
  nlohmann::json j = nlohmann::json::parse(r.out);
  REQUIRE(j.at("numerator") == 1);
  REQUIRE(j.at("denominator") == 2);
}

TEST_CASE("cli obligations") {
  CliResult r = cli({"obligations", "F G y", "--alphabet", ";r;y"});
  REQUIRE(r.code == 0);
  REQUIRE(r.out == "{y}\n");
  r = cli({"--json", "obligations", "F a", "--full-ap"});
  nlohmann::json j = nlohmann::json::parse(r.out);
  REQUIRE(j.at("obligations").size() == 1);  // AP = {a}: only {a} satisfies
  r = cli({"obligations", "F a"});
  REQUIRE(r.code == 1);  // an alphabet source is required
}

TEST_CASE("cli automaton json validates against the export schema") {
  CliResult r = cli({"--json", "automaton", "F r & F G y", "--alphabet", ";r;y"});
  REQUIRE(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  REQUIRE(j.at("version") == 1);
  REQUIRE(j.at("alphabet").size() == 3);
  bool found_gy = false;
  for (const auto& s : j.at("states"))
    found_gy = found_gy || (s.at("main") == "G y" && s.at("accepting") == true);
  REQUIRE(found_gy);
  // cap errors exit with code 2
  r = cli({"automaton", "F a & F b & F c", "--full-ap", "--cap", "2"});
  REQUIRE(r.code == 2);
}

TEST_CASE("cli sample is deterministic per seed") {
  CliResult a = cli({"sample", "--family", "localsafety", "--k", "2", "--m", "1", "--seed", "3"});
  CliResult b = cli({"sample", "--family", "localsafety", "--k", "2", "--m", "1", "--seed", "3"});
  REQUIRE(a.code == 0);
  REQUIRE(a.out == b.out);
  CliResult j = cli({"--json", "sample", "--family", "reachstay", "--k", "1", "--seed", "0"});
  nlohmann::json js = nlohmann::json::parse(j.out);
  REQUIRE(js.at("family") == "reachstay");
  REQUIRE(js.at("guarantee") == false);
}

TEST_CASE("cli rejects unknown subcommands and bad formulas") {
  REQUIRE(cli({"frobnicate"}).code == 1);
  REQUIRE(cli({"parse", "a W b"}).code == 1);
  REQUIRE(cli({}).code == 1);
}

TEST_CASE("cli train/eval round trip on a tiny budget") {
  std::string cfg_path = write_temp("train.json", R"({
    "version": 1,
    "env": {"grid": 5, "letters": ["a", "b", "c", "d"], "copies": 2},
    "episode_limit": 75,
    "q": {"alpha": 0.005, "gamma": 0.94, "interaction_features": true},
    "max_steps": 3000,
    "tasks": ["F a", "F b"]
  })");
  std::string model_path = "cli_test_model.json";
  std::string log_path = "cli_test_train_log.jsonl";
  CliResult r = cli({"--json", "train", "--config", cfg_path, "--seed", "1", "--out", model_path,
                     "--log", log_path});
  REQUIRE(r.code == 0);
  nlohmann::json summary = nlohmann::json::parse(r.out);
  REQUIRE(summary.at("steps") == 3000);

  // the episode log is JSON lines with the documented fields
  std::ifstream log(log_path);
  std::string line;
  REQUIRE(std::getline(log, line));
  nlohmann::json e = nlohmann::json::parse(line);
  for (const char* key :
       {"episode", "task", "steps", "return", "accepted_visits", "constructed_states", "success"})
    REQUIRE(e.contains(key));

  std::string tasks_path = write_temp("tasks.json", R"({"version": 1, "tasks": ["F a"]})");
  CliResult ev = cli({"--json", "eval", "--model", model_path, "--tasks", tasks_path,
                      "--episodes", "10", "--seeds", "0,1"});
  REQUIRE(ev.code == 0);
  nlohmann::json rep = nlohmann::json::parse(ev.out);
  REQUIRE(rep.at("tasks").size() == 1);
  REQUIRE(rep.at("tasks")[0].at("per_seed").size() == 2);
  double sr = rep.at("tasks")[0].at("sr").at("mean").get<double>();
  REQUIRE(sr >= 0.0);
  REQUIRE(sr <= 1.0);

  CliResult rnd = cli({"--json", "eval", "--random", "--tasks", tasks_path, "--episodes", "5",
                       "--seeds", "0"});
  REQUIRE(rnd.code == 0);

  REQUIRE(cli({"eval", "--tasks", tasks_path}).code == 1);  // --model or --random

  std::remove(cfg_path.c_str());
  std::remove(model_path.c_str());
  std::remove(log_path.c_str());
  std::remove(tasks_path.c_str());
}

TEST_CASE("cli bench reports sizes and path counts") {
  CliResult r = cli({"--json", "bench", "--family", "localsafety", "--k", "1", "--m", "1",
                     "--tasks", "2", "--episodes", "3", "--seed", "0", "--paths", "--pool", "a",
                     "--pool", "b", "--pool", "c", "--pool", "d"});
  REQUIRE(r.code == 0);
  nlohmann::json j = nlohmann::json::parse(r.out);
  REQUIRE(j.at("tasks").size() == 2);
  for (const auto& row : j.at("tasks")) {
    REQUIRE(row.at("full_states").get<std::size_t>() >= 2);
    REQUIRE(row.at("mu_states").get<double>() >= 1.0);
    REQUIRE(row.at("simple_paths").get<std::uint64_t>() >= 1);
    REQUIRE(row.at("e_times_q_factorial").get<double>() >
            row.at("simple_paths").get<double>());
    REQUIRE(row.at("policy") == "random");
  }
}
