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

#ifndef ADVHYP_CLI_H_
#define ADVHYP_CLI_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace advhyp {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitResource = 3;

struct DistortionConfig {
  std::string kind = "hamming";  // hamming | lp_power | matrix
  std::optional<double> p;
  std::optional<std::vector<std::vector<double>>> values;
};

struct RunConfig {
  std::string game = "np";  // np | bayes
  std::optional<std::vector<double>> p0;
  std::optional<std::vector<double>> p1;
  DistortionConfig distortion;
  double delta0 = 0.0;
  double delta1 = 0.0;
  std::optional<double> lambda;
  std::optional<double> a;
  std::optional<int> n;
  std::optional<std::vector<int>> n_grid;
  std::optional<std::int64_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<double> grid_step;
  std::string output = "json";  // json | csv
  // Symbol sequences for defense-eval (y) and attack-sample (x).
  std::optional<std::vector<int>> x;
  std::optional<std::vector<int>> y;
};

// Parses the JSON config text. Numbers may be JSON numbers or decimal
// strings; unknown keys are rejected. Throws ValidationError.
RunConfig parse_run_config(const std::string& text);

// Canonical JSON for a config; numbers are written as 17-digit decimal
// strings so parsing the echo reproduces the config exactly.
std::string echo_run_config(const RunConfig& config);

// Entry point of the command-line tool. Writes one complete document to
// `out` on success, a diagnostic to `err` on failure; returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace advhyp

#endif  // ADVHYP_CLI_H_
