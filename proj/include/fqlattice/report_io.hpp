// Copyright 2026 The fqlattice Authors
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

#pragma once

// Report tables and their CSV / JSON renderings.  A report is a header
// (schema version, build, config echo), one table of rows, a summary and a
// list of warnings.  CSV puts header, summary and warnings on '#' lines.

#include "harness.hpp"

#include "json.hpp"

#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#ifndef FQLATTICE_GIT_DESCRIBE
#define FQLATTICE_GIT_DESCRIBE "unknown"
#endif

namespace fqlattice {

inline constexpr int kSchemaVersion = 1;

enum class Format { CSV, JSON };

using Cell = std::variant<std::monostate, std::string, std::int64_t, std::uint64_t, double, bool, Rational>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::pair<std::string, Cell>> summary;
  std::vector<std::string> warnings;
};

inline std::string format_double(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", d);
  return buf;
}

inline std::string cell_text(const Cell& c) {
  struct V {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(std::uint64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const Rational& r) const { return to_string(r); }
  };
  return std::visit(V{}, c);
}

inline nlohmann::ordered_json cell_json(const Cell& c) {
  struct V {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    nlohmann::ordered_json operator()(std::int64_t i) const { return i; }
    nlohmann::ordered_json operator()(std::uint64_t i) const { return i; }
    nlohmann::ordered_json operator()(double d) const { return d; }
    nlohmann::ordered_json operator()(bool b) const { return b; }
    nlohmann::ordered_json operator()(const Rational& r) const {
      // Digits as strings: numerators outgrow 64 bits at moderate n.
      return {{"num", to_string(numerator_of(r))}, {"den", to_string(denominator_of(r))}, {"approx", to_double(r)}};
    }
  };
  return std::visit(V{}, c);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline nlohmann::ordered_json config_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["experiment"] = experiment_name(cfg.experiment);
  j["q"] = cfg.q;
  j["modulus"] = cfg.modulus;
  j["n_min"] = cfg.n_min;
  j["n_max"] = cfg.n_max;
  j["depth_m"] = cfg.depth_m;
  j["depth_mp"] = cfg.depth_mp;
  j["ideal"] = cfg.ideal;
  j["guard"] = cfg.guard;
  j["cell_floor"] = cfg.cell_floor;
  // The worker count is left out on purpose so reports are byte-identical
  // across worker counts.
  return j;
}

inline void write_table(std::ostream& os, const Table& t, const RunConfig& cfg, Format fmt) {
  if (fmt == Format::JSON) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["git_describe"] = FQLATTICE_GIT_DESCRIBE;
    j["config"] = config_json(cfg);
    j["columns"] = t.columns;
    auto& rows = j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
      nlohmann::ordered_json o;
      for (std::size_t i = 0; i < t.columns.size(); ++i) o[t.columns[i]] = cell_json(r[i]);
      rows.push_back(std::move(o));
    }
    nlohmann::ordered_json s = nlohmann::ordered_json::object();
    for (const auto& [k, v] : t.summary) s[k] = cell_json(v);
    j["summary"] = std::move(s);
    j["warnings"] = t.warnings;
    os << j.dump(2) << "\n";
    return;
  }
  os << "# schema_version=" << kSchemaVersion << "\n";
  os << "# git_describe=" << FQLATTICE_GIT_DESCRIBE << "\n";
  os << "# config=" << config_json(cfg).dump() << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_escape(cell_text(r[i]));
    os << "\n";
  }
  for (const auto& [k, v] : t.summary) os << "# " << k << "=" << cell_text(v) << "\n";
  for (const auto& w : t.warnings) os << "# warning: " << w << "\n";
}

inline Cell opt_time(const std::optional<double>& t) { return t ? Cell(*t) : Cell(); }
inline Cell opt_tau(const std::optional<double>& t) { return t ? Cell(*t) : Cell(std::string("n/a")); }

inline Table to_table(const CountReport& r, bool timing) {
  Table t;
  t.columns = {"n", "count", "sharp", "non_sharp", "boundary_points", "main_term", "relative_error", "regime"};
  if (timing) t.columns.push_back("wall_time");
  for (const auto& row : r.rows) {
    std::vector<Cell> c{std::int64_t(row.n), row.count, row.sharp, row.non_sharp, row.boundary,
                        row.main_term, row.relative_error, std::string(row.n >= 2 ? "asymptotic" : "boundary")};
    if (timing) c.push_back(opt_time(row.wall_time));
    t.rows.push_back(std::move(c));
  }
  t.summary = {{"fitted_tau", opt_tau(r.fitted_tau)}, {"fit_status", r.fit_status}};
  return t;
}

inline Table to_table(const EquidistReport& r, bool timing) {
  Table t;
  t.columns = {"n", "direction_cell", "solution_cell", "sharp", "empirical", "expected", "ratio"};
  for (const auto& lv : r.levels)
    for (const auto& c : lv.cells)
      t.rows.push_back({std::int64_t(lv.n), c.dir, c.sol, c.sharp, c.empirical, c.expected, c.ratio});
  for (const auto& lv : r.levels) {
    const std::string p = "n" + std::to_string(lv.n) + ".";
    t.summary.push_back({p + "total", lv.total});
    t.summary.push_back({p + "main_term", lv.main_term});
    t.summary.push_back({p + "sup_discrepancy", lv.sup_discrepancy});
    t.summary.push_back({p + "mean_discrepancy", lv.mean_discrepancy});
    t.summary.push_back({p + "z_exceptions", lv.exceptions});
    t.summary.push_back({p + "boundary_points", lv.boundary});
    if (lv.test_fn) {
      t.summary.push_back({p + "test_fn_empirical", lv.test_fn->empirical});
      t.summary.push_back({p + "test_fn_expected", lv.test_fn->expected});
      t.summary.push_back({p + "test_fn_ratio", lv.test_fn->ratio});
    }
    if (timing) t.summary.push_back({p + "wall_time", opt_time(lv.wall_time)});
  }
  t.summary.push_back({"trend", r.trend});
  t.summary.push_back({"final_below_first", r.final_below_first});
  t.summary.push_back({"marginals_consistent", r.marginals_consistent});
  t.summary.push_back({"fitted_tau", opt_tau(r.fitted_tau)});
  t.warnings = r.warnings;
  return t;
}

inline Table to_table(const CfeReport& r, bool timing) {
  Table t;
  t.columns = {"n", "cell", "empirical", "expected", "expected_alt_prefactor", "ratio"};
  for (const auto& lv : r.levels)
    for (const auto& c : lv.cells)
      t.rows.push_back({std::int64_t(lv.n), c.cell, c.empirical, c.expected, c.alt_expected, c.ratio});
  t.summary.push_back({"normalization", r.normalization});
  t.summary.push_back({"alt_prefactor", r.alt_prefactor});
  for (const auto& lv : r.levels) {
    const std::string p = "n" + std::to_string(lv.n) + ".";
    t.summary.push_back({p + "total", lv.total});
    t.summary.push_back({p + "sup_discrepancy", lv.sup_discrepancy});
    if (timing) t.summary.push_back({p + "wall_time", opt_time(lv.wall_time)});
  }
  return t;
}

inline Table to_table(const VerifyReport& r) {
  Table t;
  t.columns = {"name", "relation", "inputs", "exact", "oracle", "match"};
  for (const auto& row : r.rows) t.rows.push_back({row.name, row.relation, row.inputs, row.exact, row.oracle, row.match});
  std::uint64_t bad = 0;
  for (const auto& row : r.rows)
    if (!row.match) ++bad;
  t.summary = {{"rows", std::uint64_t(r.rows.size())}, {"failures", bad}};
  return t;
}

inline Table to_table(const std::vector<BijectionGridRow>& rows) {
  Table t;
  t.columns = {"n",        "ideal",      "theta_cell",  "dprime_cell",         "lattice_count", "matrix_count",
               "injective", "surjective", "equivalence", "equivalence_checked", "ok",            "detail"};
  std::uint64_t bad = 0;
  for (const auto& r : rows) {
    const auto& b = r.report;
    t.rows.push_back({std::int64_t(r.n), r.ideal, r.theta, r.dprime, b.lattice_count, b.matrix_count, b.injective,
                      b.surjective, b.equivalence, b.equivalence_checked, b.ok, b.detail});
    if (!b.ok) ++bad;
  }
  t.summary = {{"rows", std::uint64_t(rows.size())}, {"failures", bad}};
  return t;
}

inline Table to_table(const std::vector<PointRow>& pts) {
  Table t;
  t.columns = {"a", "b", "w_x", "w_y", "norm_exp", "direction_cell", "solution_cell"};
  for (const auto& p : pts)
    t.rows.push_back({to_digits(p.v.a), to_digits(p.v.b), to_digits(p.w.a), to_digits(p.w.b),
                      std::int64_t(p.norm_exp), p.dir_cell, p.sol_cell});
  return t;
}

}  // namespace fqlattice
