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

#include "advhyp/cli.h"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "advhyp/errors.h"
#include "advhyp/exponents.h"
#include "advhyp/game.h"
#include "advhyp/gendiv.h"
#include "advhyp/rng.h"
#include "advhyp/transport.h"
#include "advhyp/types.h"

namespace advhyp {
namespace {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Output formatting

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_string(std::ostream& os, const std::string& s) {
  os << Json(s).dump();
}

// Doubles always carry 17 significant digits; non-finite values become the
// strings "inf", "-inf", "nan" since JSON has no literal for them.
void write_json(std::ostream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad;
        write_string(os, it.key());
        os << ": ";
        write_json(os, it.value(), indent, depth + 1);
      }
      os << "\n" << close_pad << "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      bool scalars = true;
      for (const auto& e : j) scalars = scalars && !e.is_structured();
      if (scalars) {
        os << "[";
        for (size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          write_json(os, j[i], indent, depth + 1);
        }
        os << "]";
        return;
      }
      os << "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_json(os, j[i], indent, depth + 1);
      }
      os << "\n" << close_pad << "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) {
        os << format_double(v);
      } else {
        write_string(os, format_double(v));
      }
      return;
    }
    default:
      os << j.dump();
  }
}

std::string to_json_text(const Json& j) {
  std::ostringstream os;
  write_json(os, j, 2, 0);
  os << "\n";
  return os.str();
}

// field,value rows for a nested document, keys joined by '.'.
void flatten(const Json& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
    }
  } else if (j.is_array()) {
    for (size_t i = 0; i < j.size(); ++i) {
      flatten(j[i], prefix + "." + std::to_string(i), rows);
    }
  } else if (j.is_number_float()) {
    rows.emplace_back(prefix, format_double(j.get<double>()));
  } else if (j.is_string()) {
    rows.emplace_back(prefix, j.get<std::string>());
  } else {
    rows.emplace_back(prefix, j.dump());
  }
}

Json vec_json(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Json pmf_json(const Pmf& p) { return vec_json(p.probs()); }

Json coupling_json(const Coupling& c) {
  Json rows = Json::array();
  const int k = c.alphabet_size();
  for (int i = 0; i < k; ++i) rows.push_back(vec_json(c.joint().subspan(i * k, k)));
  return rows;
}

// ---------------------------------------------------------------------------
// Config parsing

double parse_decimal(const std::string& s, const std::string& field) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw ValidationError("config: field '" + field + "' is not a decimal number");
  }
  return v;
}

double get_real(const Json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_decimal(j.get<std::string>(), field);
  throw ValidationError("config: field '" + field + "' must be a number");
}

std::int64_t get_integer(const Json& j, const std::string& field) {
  if (j.is_number_integer()) return j.get<std::int64_t>();
  const double v = get_real(j, field);
  if (!(std::abs(v) < 9.0e15) || v != std::floor(v)) {
    throw ValidationError("config: field '" + field + "' must be an integer");
  }
  return static_cast<std::int64_t>(v);
}

std::vector<double> get_real_list(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError("config: field '" + field + "' must be a list");
  std::vector<double> out;
  for (const auto& e : j) out.push_back(get_real(e, field));
  return out;
}

std::vector<int> get_int_list(const Json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError("config: field '" + field + "' must be a list");
  std::vector<int> out;
  for (const auto& e : j) {
    const std::int64_t v = get_integer(e, field);
    if (v < INT32_MIN || v > INT32_MAX) {
      throw ValidationError("config: field '" + field + "' is out of range");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::string get_string(const Json& j, const std::string& field) {
  if (!j.is_string()) throw ValidationError("config: field '" + field + "' must be a string");
  return j.get<std::string>();
}

void reject_unknown(const Json& j, const std::set<std::string>& known,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) {
      throw ValidationError("config: unknown key '" + it.key() + "'" + where);
    }
  }
}

// ---------------------------------------------------------------------------
// Command execution

struct Options {
  std::string command;
  std::optional<std::string> config_path;
  std::optional<std::string> output;
  int threads = 0;
  std::optional<std::uint64_t> seed;
  std::optional<double> lambda;
  std::optional<double> a;
  std::optional<int> n;
  std::optional<std::int64_t> trials;
  std::optional<double> grid_step;
};

Pmf require_pmf(const std::optional<std::vector<double>>& v, const char* name) {
  if (!v) throw ValidationError(std::string("config: '") + name + "' is required");
  return Pmf(*v);
}

DistortionMatrix build_distortion(const DistortionConfig& c, int k) {
  if (c.kind == "hamming") {
    if (c.p || c.values) throw ValidationError("config: hamming takes no parameters");
    return make_distortion(HammingDistortion{}, k);
  }
  if (c.kind == "lp_power") {
    if (!c.p) throw ValidationError("config: lp_power needs 'p'");
    return make_distortion(LpPowerDistortion{*c.p}, k);
  }
  if (c.kind == "matrix") {
    if (!c.values) throw ValidationError("config: matrix distortion needs 'values'");
    return make_distortion(ExplicitDistortion{*c.values}, k);
  }
  throw ValidationError("config: unknown distortion kind '" + c.kind + "'");
}

void require_budget(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ValidationError(std::string("config: '") + name + "' must be finite and >= 0");
  }
}

GameSpec build_spec(const RunConfig& c) {
  const Pmf p0 = require_pmf(c.p0, "p0");
  const Pmf p1 = require_pmf(c.p1, "p1");
  if (p0.alphabet_size() != p1.alphabet_size()) {
    throw DimensionError("config: p0 and p1 have different alphabet sizes");
  }
  require_budget(c.delta0, "delta0");
  require_budget(c.delta1, "delta1");
  GameSpec spec{p0, p1, build_distortion(c.distortion, p0.alphabet_size()),
                c.delta0, c.delta1, c.lambda, c.a};
  spec.Validate();
  return spec;
}

Json exponent_json(const ExponentResult& r) {
  Json j;
  j["value"] = r.value;
  j["argmin_py"] = pmf_json(r.argmin_py);
  j["witness_couplings"] = Json::array(
      {coupling_json(r.witness_couplings.first), coupling_json(r.witness_couplings.second)});
  return j;
}

Json exponent_diagnostics(const ExponentDiagnostics& d) {
  Json j;
  j["converged"] = d.converged;
  j["newton_steps"] = d.newton_steps;
  j["lp_solves"] = d.lp_solves;
  j["gap"] = d.gap;
  j["d0_at_argmin"] = d.d0_at_argmin;
  j["d1_at_argmin"] = d.d1_at_argmin;
  j["boundary_active"] = d.boundary_active;
  return j;
}

Json defense_json(const Composition& y, const DefenseEval& e) {
  Json j;
  j["y_type"] = y.counts();
  j["accept_h1_prob"] = e.accept_h1_prob;
  j["score"] = e.score;
  return j;
}

Defense defense_for(const RunConfig& c, const GameSpec& spec, int n) {
  if (c.game == "np") return make_np_defense(spec);
  if (!spec.a) throw ValidationError("config: bayes game needs 'a'");
  return make_bayes_defense(spec, n, BayesMode::kExact);
}

void require_game_params(const RunConfig& c) {
  if (c.game == "np" && !c.lambda) throw ValidationError("config: np game needs 'lambda'");
  if (c.game == "bayes" && !c.a) throw ValidationError("config: bayes game needs 'a'");
}

int require_n(const RunConfig& c) {
  if (!c.n) throw ValidationError("config: 'n' is required");
  if (*c.n < 1) throw ValidationError("config: 'n' must be >= 1");
  return *c.n;
}

struct CommandOutput {
  Json result;
  Json diagnostics = Json::object();
  // region-sweep only: header and rows for CSV.
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
};

CommandOutput execute(const std::string& cmd, const RunConfig& c, int threads) {
  CommandOutput out;
  if (cmd == "kl") {
    const Pmf p0 = require_pmf(c.p0, "p0");
    const Pmf p1 = require_pmf(c.p1, "p1");
    out.result["value"] = kl_divergence(p0, p1);
  } else if (cmd == "emd") {
    const Pmf p0 = require_pmf(c.p0, "p0");
    const Pmf p1 = require_pmf(c.p1, "p1");
    const TransportResult t = emd(p0, p1, build_distortion(c.distortion, p0.alphabet_size()));
    out.result["cost"] = t.cost;
    out.result["plan"] = coupling_json(t.plan);
    out.diagnostics["iterations"] = t.diagnostics.iterations;
    out.diagnostics["dual_gap"] = t.diagnostics.dual_gap;
  } else if (cmd == "gendiv") {
    const GameSpec spec = build_spec(c);
    const GenDivResult g = gen_divergence(spec.p1, spec.p0, spec.d, spec.delta0);
    out.result["value"] = g.value;
    out.result["argmin_px"] = pmf_json(g.argmin_px);
    out.result["coupling"] = coupling_json(g.coupling);
    out.diagnostics["iterations"] = g.diagnostics.iterations;
    out.diagnostics["primal_dual_gap"] = g.diagnostics.primal_dual_gap;
    out.diagnostics["converged"] = g.diagnostics.converged;
    out.diagnostics["infinite_reason"] = g.diagnostics.infinite_reason;
  } else if (cmd == "np-exponent" || cmd == "np-exponent-metric") {
    if (!c.lambda) throw ValidationError("config: '" + cmd + "' needs 'lambda'");
    const GameSpec spec = build_spec(c);
    const ExponentResult r =
        cmd == "np-exponent" ? np_fn_exponent(spec) : np_fn_exponent_metric_form(spec);
    out.result = exponent_json(r);
    out.diagnostics = exponent_diagnostics(r.diagnostics);
    out.diagnostics["metric"] = spec.d.is_metric();
  } else if (cmd == "bayes-exponent") {
    if (!c.a) throw ValidationError("config: 'bayes-exponent' needs 'a'");
    const GameSpec spec = build_spec(c);
    const BayesExponents b = bayes_exponent(spec);
    out.result["payoff_exponent"] = exponent_json(b.payoff_exponent);
    out.result["fn_exponent"] = b.fn_exponent;
    out.result["fp_exponent"] = b.fp_exponent;
    if (b.fp_argmin) out.result["fp_argmin_py"] = pmf_json(*b.fp_argmin);
    out.diagnostics = exponent_diagnostics(b.payoff_exponent.diagnostics);
    out.diagnostics["fp_rays"] = b.fp_rays;
    out.diagnostics["fp_heuristic"] = b.fp_heuristic;
  } else if (cmd == "limits") {
    const GameSpec spec = build_spec(c);
    const LimitExponents l = limit_exponents(spec);
    out.result["np_limit"] = l.np_limit;
    out.result["bayes_limit"] = l.bayes_limit;
  } else if (cmd == "region") {
    const GameSpec spec = build_spec(c);
    const Indistinguishability ind =
        indistinguishability(spec.p0, spec.p1, spec.d, spec.delta0, spec.delta1);
    out.result["member"] = ind.member;
    out.result["inner_value"] = ind.inner_value;
    out.result["emd_p0_p"] = ind.emd_p0_p;
    if (ind.alpha) out.result["alpha"] = *ind.alpha;
    out.diagnostics["metric"] = spec.d.is_metric();
    if (ind.closed_form_error) out.diagnostics["closed_form_error"] = *ind.closed_form_error;
  } else if (cmd == "region-sweep") {
    const Pmf p0 = require_pmf(c.p0, "p0");
    if (!c.grid_step) throw ValidationError("config: 'grid_step' is required");
    require_budget(c.delta0, "delta0");
    require_budget(c.delta1, "delta1");
    const DistortionMatrix d = build_distortion(c.distortion, p0.alphabet_size());
    const std::vector<SweepRow> rows =
        region_sweep(p0, d, c.delta0, c.delta1, *c.grid_step, threads);
    const int k = p0.alphabet_size();
    for (int i = 0; i < k; ++i) out.csv_header.push_back("pmf_" + std::to_string(i));
    for (const char* h : {"member", "inner_value", "np_limit", "bayes_limit"}) {
      out.csv_header.push_back(h);
    }
    Json arr = Json::array();
    int members = 0;
    for (const SweepRow& r : rows) {
      Json j;
      j["pmf"] = pmf_json(r.pmf);
      j["member"] = r.member;
      j["inner_value"] = r.inner_value;
      j["np_limit"] = r.np_limit;
      j["bayes_limit"] = r.bayes_limit;
      arr.push_back(std::move(j));
      std::vector<std::string> row;
      for (int i = 0; i < k; ++i) row.push_back(format_double(r.pmf[i]));
      row.push_back(r.member ? "true" : "false");
      row.push_back(format_double(r.inner_value));
      row.push_back(format_double(r.np_limit));
      row.push_back(format_double(r.bayes_limit));
      out.csv_rows.push_back(std::move(row));
      members += r.member ? 1 : 0;
    }
    out.result["rows"] = std::move(arr);
    out.diagnostics["lattice_points"] = static_cast<int>(rows.size());
    out.diagnostics["members"] = members;
  } else if (cmd == "defense-eval") {
    require_game_params(c);
    const GameSpec spec = build_spec(c);
    const int k = spec.p0.alphabet_size();
    if (c.y) {
      const Composition y = Composition::Of(*c.y, k);
      if (c.n && *c.n != y.n()) throw ValidationError("config: 'n' disagrees with 'y'");
      out.result = defense_json(y, defense_for(c, spec, y.n())(y));
    } else {
      const int n = require_n(c);
      const Defense def = defense_for(c, spec, n);
      Json arr = Json::array();
      for (const Composition& y : all_compositions(n, k)) arr.push_back(defense_json(y, def(y)));
      out.result["types"] = std::move(arr);
    }
    out.diagnostics["mode"] = c.game == "np" ? "np" : "bayes_exact";
  } else if (cmd == "exact-error") {
    require_game_params(c);
    const GameSpec spec = build_spec(c);
    const int n = require_n(c);
    const ErrorProbs e = exact_error_probs(defense_for(c, spec, n), spec, n);
    out.result["fp"] = e.fp;
    out.result["fn"] = e.fn;
    if (c.game == "bayes") out.result["payoff"] = e.fn + std::exp(*c.a * n) * e.fp;
  } else if (cmd == "simulate") {
    require_game_params(c);
    const GameSpec spec = build_spec(c);
    std::vector<int> grid;
    if (c.n_grid) {
      grid = *c.n_grid;
    } else if (c.n) {
      grid = {*c.n};
    } else {
      throw ValidationError("config: 'simulate' needs 'n_grid' or 'n'");
    }
    if (!c.trials) throw ValidationError("config: 'trials' is required");
    if (!c.seed) throw ValidationError("config: 'seed' is required");
    const SimulationReport rep = monte_carlo_simulate(
        spec, c.game == "np" ? DefenseMode::kNp : DefenseMode::kBayesSingleLetter, grid,
        *c.trials, *c.seed, threads);
    Json per = Json::array();
    for (const SimulationPoint& p : rep.per_n) {
      Json j;
      j["n"] = p.n;
      j["trials"] = p.trials;
      j["fp_errors"] = p.fp_errors;
      j["fn_errors"] = p.fn_errors;
      j["fp_hat"] = p.fp_hat;
      j["fn_hat"] = p.fn_hat;
      j["fp_ci95"] = Json::array({p.fp_ci95.first, p.fp_ci95.second});
      j["fn_ci95"] = Json::array({p.fn_ci95.first, p.fn_ci95.second});
      per.push_back(std::move(j));
    }
    out.result["per_n"] = std::move(per);
    out.result["fitted"] = {{"fn_slope", rep.fn_fit.slope},
                            {"fn_slope_stderr", rep.fn_fit.standard_error},
                            {"fp_slope", rep.fp_fit.slope},
                            {"fp_slope_stderr", rep.fp_fit.standard_error}};
    out.result["seed"] = rep.seed;
    out.diagnostics["fn_points_used"] = rep.fn_fit.points_used;
    out.diagnostics["fp_points_used"] = rep.fp_fit.points_used;
    out.diagnostics["min_error_events"] = kMinErrorEvents;
  } else if (cmd == "attack-sample") {
    if (!c.x) throw ValidationError("config: 'attack-sample' needs 'x'");
    if (!c.seed) throw ValidationError("config: 'seed' is required");
    const Pmf p0 = require_pmf(c.p0, "p0");
    require_budget(c.delta0, "delta0");
    require_budget(c.delta1, "delta1");
    const DistortionMatrix d = build_distortion(c.distortion, p0.alphabet_size());
    Composition::Of(*c.x, p0.alphabet_size());
    Rng r0 = Rng::Stream(*c.seed, {0});
    Rng r1 = Rng::Stream(*c.seed, {1});
    out.result["y_h0"] = sample_attack_output(*c.x, d, c.delta0, r0);
    out.result["y_h1"] = sample_attack_output(*c.x, d, c.delta1, r1);
  } else {
    throw ValidationError("unknown command '" + cmd + "'");
  }
  return out;
}

std::string csv_text(const CommandOutput& o) {
  std::ostringstream os;
  if (!o.csv_header.empty()) {
    for (size_t i = 0; i < o.csv_header.size(); ++i) os << (i ? "," : "") << o.csv_header[i];
    os << "\n";
    for (const auto& row : o.csv_rows) {
      for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
      os << "\n";
    }
    return os.str();
  }
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(o.result, "", rows);
  os << "field,value\n";
  for (const auto& [k, v] : rows) os << k << "," << v << "\n";
  return os.str();
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("config: not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("config: top level must be an object");
  reject_unknown(j,
                 {"game", "p0", "p1", "distortion", "delta0", "delta1", "lambda", "a",
                  "n", "n_grid", "trials", "seed", "grid_step", "output", "x", "y"},
                 "");
  RunConfig c;
  if (j.contains("game")) c.game = get_string(j["game"], "game");
  if (c.game != "np" && c.game != "bayes") {
    throw ValidationError("config: 'game' must be 'np' or 'bayes'");
  }
  if (j.contains("p0")) c.p0 = get_real_list(j["p0"], "p0");
  if (j.contains("p1")) c.p1 = get_real_list(j["p1"], "p1");
  if (j.contains("distortion")) {
    const Json& d = j["distortion"];
    if (!d.is_object()) throw ValidationError("config: 'distortion' must be an object");
    reject_unknown(d, {"kind", "p", "values"}, " in 'distortion'");
    if (d.contains("kind")) c.distortion.kind = get_string(d["kind"], "distortion.kind");
    if (d.contains("p")) c.distortion.p = get_real(d["p"], "distortion.p");
    if (d.contains("values")) {
      if (!d["values"].is_array()) {
        throw ValidationError("config: 'distortion.values' must be a matrix");
      }
      std::vector<std::vector<double>> m;
      for (const auto& row : d["values"]) m.push_back(get_real_list(row, "distortion.values"));
      c.distortion.values = std::move(m);
    }
  }
  if (j.contains("delta0")) c.delta0 = get_real(j["delta0"], "delta0");
  if (j.contains("delta1")) c.delta1 = get_real(j["delta1"], "delta1");
  if (j.contains("lambda")) c.lambda = get_real(j["lambda"], "lambda");
  if (j.contains("a")) c.a = get_real(j["a"], "a");
  if (j.contains("n")) {
    const std::int64_t n = get_integer(j["n"], "n");
    if (n < 1 || n > 1'000'000) throw ValidationError("config: 'n' out of range");
    c.n = static_cast<int>(n);
  }
  if (j.contains("n_grid")) c.n_grid = get_int_list(j["n_grid"], "n_grid");
  if (j.contains("trials")) c.trials = get_integer(j["trials"], "trials");
  if (j.contains("seed")) {
    const Json& s = j["seed"];
    if (s.is_number_unsigned()) {
      c.seed = s.get<std::uint64_t>();
    } else {
      const std::int64_t v = get_integer(s, "seed");
      if (v < 0) throw ValidationError("config: 'seed' must be >= 0");
      c.seed = static_cast<std::uint64_t>(v);
    }
  }
  if (j.contains("grid_step")) c.grid_step = get_real(j["grid_step"], "grid_step");
  if (j.contains("output")) c.output = get_string(j["output"], "output");
  if (c.output != "json" && c.output != "csv") {
    throw ValidationError("config: 'output' must be 'json' or 'csv'");
  }
  if (j.contains("x")) c.x = get_int_list(j["x"], "x");
  if (j.contains("y")) c.y = get_int_list(j["y"], "y");
  return c;
}

namespace {

Json echo_json(const RunConfig& c) {
  auto num = [](double v) { return format_double(v); };
  auto list = [&](const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(num(x));
    return a;
  };
  Json j;
  j["game"] = c.game;
  if (c.p0) j["p0"] = list(*c.p0);
  if (c.p1) j["p1"] = list(*c.p1);
  Json d;
  d["kind"] = c.distortion.kind;
  if (c.distortion.p) d["p"] = num(*c.distortion.p);
  if (c.distortion.values) {
    Json m = Json::array();
    for (const auto& row : *c.distortion.values) m.push_back(list(row));
    d["values"] = std::move(m);
  }
  j["distortion"] = std::move(d);
  j["delta0"] = num(c.delta0);
  j["delta1"] = num(c.delta1);
  if (c.lambda) j["lambda"] = num(*c.lambda);
  if (c.a) j["a"] = num(*c.a);
  if (c.n) j["n"] = *c.n;
  if (c.n_grid) j["n_grid"] = *c.n_grid;
  if (c.trials) j["trials"] = *c.trials;
  if (c.seed) j["seed"] = *c.seed;
  if (c.grid_step) j["grid_step"] = num(*c.grid_step);
  j["output"] = c.output;
  if (c.x) j["x"] = *c.x;
  if (c.y) j["y"] = *c.y;
  return j;
}

}  // namespace

std::string echo_run_config(const RunConfig& config) {
  return to_json_text(echo_json(config));
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  static const std::vector<std::string> kCommands = {
      "kl",     "emd",          "gendiv",       "np-exponent", "np-exponent-metric",
      "bayes-exponent", "limits", "region",     "region-sweep", "defense-eval",
      "exact-error", "simulate", "attack-sample"};
  Options opt;
  CLI::App app{"Adversarial hypothesis-testing games: exponents, regions, simulation",
               "advhyp"};
  std::string commands_help = "one of:";
  for (const auto& c : kCommands) commands_help += " " + c;
  app.add_option("command", opt.command, commands_help)
      ->required()
      ->check(CLI::IsMember(kCommands));
  std::string config_path, output, seed_text;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--output", output, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", opt.threads, "worker cap (0: all cores)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed", seed_text, "random seed");
  std::string lambda_text, a_text, grid_text;
  app.add_option("--lambda", lambda_text, "FP exponent constraint");
  app.add_option("--a", a_text, "Bayes payoff exponent weight");
  int n_value = 0;
  std::int64_t trials_value = 0;
  auto* n_opt = app.add_option("--n", n_value, "sequence length");
  auto* trials_opt = app.add_option("--trials", trials_value, "Monte Carlo trials per n");
  app.add_option("--grid-step", grid_text, "region sweep lattice spacing");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ValidationError("cannot read config file '" + config_path + "'");
      std::stringstream buf;
      buf << in.rdbuf();
      config = parse_run_config(buf.str());
    }
    if (!output.empty()) config.output = output;
    if (!seed_text.empty()) {
      const double s = parse_decimal(seed_text, "--seed");
      if (s < 0 || s != std::floor(s) || s > 1.8e19) {
        throw ValidationError("--seed must be a nonnegative integer");
      }
      config.seed = std::stoull(seed_text);
    }
    if (!lambda_text.empty()) config.lambda = parse_decimal(lambda_text, "--lambda");
    if (!a_text.empty()) config.a = parse_decimal(a_text, "--a");
    if (n_opt->count() > 0) config.n = n_value;
    if (trials_opt->count() > 0) config.trials = trials_value;
    if (!grid_text.empty()) config.grid_step = parse_decimal(grid_text, "--grid-step");

    const CommandOutput result = execute(opt.command, config, opt.threads);
    std::string text;
    if (config.output == "csv") {
      text = csv_text(result);
    } else {
      Json doc;
      doc["command"] = opt.command;
      doc["config_echo"] = echo_json(config);
      doc["result"] = result.result;
      doc["diagnostics"] = result.diagnostics;
      doc["version"] = kVersion;
      text = to_json_text(doc);
    }
    out << text;
    out.flush();
    return kExitOk;
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << "\n";
    return kExitResource;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace advhyp
