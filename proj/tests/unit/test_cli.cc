// Copyright 2026 The advhyp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"

#include "advhyp/cli.h"
#include "advhyp/errors.h"
#include "advhyp/exponents.h"
#include "support/oracles.h"

using namespace advhyp;
using Json = nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string write_config(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("advhyp_cli_" + name + ".json");
  std::ofstream(path) << text;
  return path.string();
}

Run run_with(const std::string& command, const std::string& name, const std::string& config,
             std::vector<std::string> extra = {}) {
  std::vector<std::string> args{command, "--config", write_config(name, config)};
  args.insert(args.end(), extra.begin(), extra.end());
  return run(args);
}

double number(const Json& v) {
  return v.is_string() ? std::stod(v.get<std::string>()) : v.get<double>();
}

const char* kBinary = R"({
  "game": "np", "p0": ["0.9", "0.1"], "p1": ["0.1", "0.9"],
  "distortion": {"kind": "hamming"},
  "delta0": "0.1", "delta1": "0.1", "lambda": "0.01"
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("cli documents carry the required fields") {
  const Run r = run_with("kl", "kl", R"({"p0": [0.8, 0.2], "p1": [0.3, 0.7]})");
  REQUIRE(r.code == kExitOk);
  const Json doc = Json::parse(r.out);
  for (const char* key : {"command", "config_echo", "result", "diagnostics", "version"}) {
    CHECK(doc.contains(key));
  }
  CHECK(doc["command"] == "kl");
  CHECK(doc["version"] == kVersion);
  CHECK(std::abs(number(doc["result"]["value"]) - 0.5341108087103075) <= 1e-15);
}

TEST_CASE("emd of identical pmfs is zero") {
  const Run r = run_with("emd", "emd", R"({"p0": [0.2, 0.5, 0.3], "p1": [0.2, 0.5, 0.3],
                                           "distortion": {"kind": "lp_power", "p": 2}})");
  REQUIRE(r.code == kExitOk);
  CHECK(number(Json::parse(r.out)["result"]["cost"]) == 0.0);
}

TEST_CASE("np exponent end to end matches the grid oracle") {
  const Run r = run_with("np-exponent", "np", kBinary);
  REQUIRE(r.code == kExitOk);
  const double value = number(Json::parse(r.out)["result"]["value"]);
  const double grid = oracle::binary_np_exponent_grid({0.9, 0.1}, {0.1, 0.9}, 0.1, 0.1, 0.01, 1e-4);
  CHECK(value <= grid + 1e-9);
  CHECK(grid - value <= 5e-4);
  const GameSpec spec{Pmf({0.9, 0.1}), Pmf({0.1, 0.9}), make_distortion(HammingDistortion{}, 2),
                      0.1, 0.1, 0.01, std::nullopt};
  CHECK(value == np_fn_exponent(spec).value);
}

TEST_CASE("flag overrides replace config fields") {
  const Run base = run_with("np-exponent", "override", kBinary);
  const Run over = run_with("np-exponent", "override", kBinary, {"--lambda", "0.2"});
  REQUIRE(base.code == kExitOk);
  REQUIRE(over.code == kExitOk);
  const Json doc = Json::parse(over.out);
  CHECK(number(doc["config_echo"]["lambda"]) == 0.2);
  CHECK(number(doc["result"]["value"]) < number(Json::parse(base.out)["result"]["value"]));
}

TEST_CASE("config echo reproduces the output bit for bit") {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"np-exponent", kBinary},
      {"bayes-exponent", R"({"game": "bayes", "p0": [0.8, 0.2], "p1": [0.3, 0.7],
                             "delta0": 0.05, "delta1": 0.05, "a": 0.02})"},
      {"limits", R"({"p0": [0.5, 0.3, 0.2], "p1": [0.2, 0.3, 0.5],
                     "distortion": {"kind": "matrix",
                                    "values": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]},
                     "delta0": "0.1", "delta1": "0.05"})"},
      {"simulate", R"({"p0": [0.8, 0.2], "p1": [0.3, 0.7], "delta0": 0.05, "delta1": 0.05,
                       "lambda": 0.05, "n_grid": [10, 20], "trials": 2000, "seed": 17})"},
      {"exact-error", R"({"game": "bayes", "p0": [0.8, 0.2], "p1": [0.3, 0.7], "a": 0,
                          "delta0": 0.1, "delta1": 0.1, "n": 9})"},
  };
  int idx = 0;
  for (const auto& [command, config] : cases) {
    const std::string name = "echo" + std::to_string(idx++);
    const Run first = run_with(command, name, config);
    REQUIRE_MESSAGE(first.code == kExitOk, command << ": " << first.err);
    const std::string echo = Json::parse(first.out)["config_echo"].dump();
    CHECK(parse_run_config(echo).seed == parse_run_config(config).seed);
    const Run second = run_with(command, name + "b", echo);
    REQUIRE(second.code == kExitOk);
    CHECK(second.out == first.out);
    CHECK(echo_run_config(parse_run_config(echo)) == echo_run_config(parse_run_config(config)));
  }
}

TEST_CASE("region sweep csv has one row per lattice point") {
  const std::string config = R"({"p0": [0.4, 0.2, 0.4], "distortion": {"kind": "lp_power", "p": 2},
                                 "delta0": 0, "delta1": 0, "grid_step": 0.2})";
  const Run r = run_with("region-sweep", "sweep", config, {"--output", "csv"});
  REQUIRE(r.code == kExitOk);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "pmf_0,pmf_1,pmf_2,member,inner_value,np_limit,bayes_limit");
  int rows = 0, members = 0;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 7);
    if (cells[3] == "true" || cells[3] == "1") {
      ++members;
      CHECK(std::abs(std::stod(cells[0]) - 0.4) <= 1e-12);
      CHECK(std::abs(std::stod(cells[1]) - 0.2) <= 1e-12);
    }
  }
  CHECK(rows == static_cast<int>(sweep_lattice(3, 0.2).size()));
  CHECK(members == 1);
}

TEST_CASE("cli exit codes") {
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({}).code == kExitValidation);
  CHECK(run({"frobnicate"}).code == kExitValidation);
  CHECK(run({"kl", "--config", "/nonexistent/advhyp.json"}).code == kExitValidation);

  const Run unknown = run_with("kl", "unknown", R"({"p0": [0.5, 0.5], "p1": [0.5, 0.5], "mu": 1})");
  CHECK(unknown.code == kExitValidation);
  CHECK(unknown.out.empty());
  CHECK_FALSE(unknown.err.empty());

  CHECK(run_with("kl", "badpmf", R"({"p0": [0.5, 0.4], "p1": [0.5, 0.5]})").code ==
        kExitValidation);
  CHECK(run_with("np-exponent", "nolambda", R"({"p0": [0.5, 0.5], "p1": [0.2, 0.8]})").code ==
        kExitValidation);
  CHECK(run_with("gendiv", "negdelta",
                 R"({"p0": [0.5, 0.5], "p1": [0.2, 0.8], "delta0": -0.1})").code ==
        kExitValidation);
  CHECK(run_with("kl", "badjson", "{\"p0\": [0.5,").code == kExitValidation);

  const Run big = run_with("exact-error", "budget",
                           R"({"p0": [0.25, 0.25, 0.25, 0.25], "p1": [0.1, 0.2, 0.3, 0.4],
                               "delta0": 0.5, "delta1": 0.5, "lambda": 0.1, "n": 60})");
  CHECK(big.code == kExitResource);
  CHECK(big.out.empty());
}

TEST_CASE("config parsing") {
  const RunConfig c = parse_run_config(R"({"game": "bayes", "p0": ["0.25", 0.75], "a": "0.1",
                                           "n_grid": [5, 10], "seed": 18446744073709551615,
                                           "output": "csv"})");
  CHECK(c.game == "bayes");
  CHECK((*c.p0)[0] == 0.25);
  CHECK(*c.a == 0.1);
  CHECK(*c.n_grid == std::vector<int>{5, 10});
  CHECK(*c.seed == 18446744073709551615ull);
  CHECK(c.output == "csv");
  CHECK_THROWS_AS(parse_run_config(R"({"game": "minimax"})"), ValidationError);
  CHECK_THROWS_AS(parse_run_config(R"({"output": "xml"})"), ValidationError);
  CHECK_THROWS_AS(parse_run_config(R"({"distortion": {"kind": "hamming", "q": 1}})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_run_config(R"({"n": 1.5})"), ValidationError);
  CHECK_THROWS_AS(parse_run_config(R"({"delta0": "abc"})"), ValidationError);
}

}  // TEST_SUITE
