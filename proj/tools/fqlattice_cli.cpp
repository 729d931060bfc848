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

// fqlattice: counting and equidistribution experiments for primitive
// vectors of F_q[Y]^2.
//
// Exit status: 0 when every assertion of the run holds, 1 when one fails,
// 2 on a configuration error.

#include "fqlattice/fqlattice.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace fqlattice;

constexpr int kExitOk = 0;
constexpr int kExitAssert = 1;
constexpr int kExitConfig = 2;

std::vector<std::uint32_t> parse_modulus(const std::string& s) {
  std::vector<std::uint32_t> out;
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const unsigned long v = std::stoul(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(static_cast<std::uint32_t>(v));
    } catch (const std::exception&) {
      throw ConfigError("bad modulus digit '" + tok + "'");
    }
  }
  return out;
}

void load_test_function(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open test function file " + path);
  nlohmann::json j;
  try {
    in >> j;
    if (j.contains("f")) cfg.f_values = j.at("f").get<std::vector<double>>();
    if (j.contains("g")) cfg.g_values = j.at("g").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("test function file: ") + e.what());
  }
}

struct Options {
  RunConfig cfg;
  std::string modulus;
  std::string format = "csv";
  std::string out;
  std::string test_fn;
  bool dump = false;
};

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--q", o.cfg.q, "field order (prime power)");
  sub->add_option("--modulus", o.modulus, "GF(p) coefficients of the field modulus, low to high, comma separated");
  sub->add_option("--n-min", o.cfg.n_min, "first level");
  sub->add_option("--n-max", o.cfg.n_max, "last level");
  sub->add_option("--depth-m", o.cfg.depth_m, "direction cylinder depth");
  sub->add_option("--depth-mp", o.cfg.depth_mp, "solution cylinder depth");
  sub->add_option("--ideal", o.cfg.ideal, "ideal generator, e.g. 'Y^2+1' or '1,0,1'");
  sub->add_option("--workers", o.cfg.workers, "worker threads");
  sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", o.out, "output path (default stdout)");
  sub->add_option("--guard", o.cfg.guard, "refuse runs with q^(2 n_max + 2) above this");
  sub->add_option("--cell-floor", o.cfg.cell_floor, "warn when a cell expects fewer points");
  sub->add_flag("--timing", o.cfg.timing, "include wall times (reports are then not reproducible)");
}

int run(Experiment e, Options& o) {
  RunConfig& cfg = o.cfg;
  cfg.experiment = e;
  cfg.modulus = parse_modulus(o.modulus);
  if (!o.test_fn.empty()) load_test_function(cfg, o.test_fn);
  const Format fmt = o.format == "json" ? Format::JSON : Format::CSV;

  std::ofstream file;
  if (!o.out.empty()) {
    file.open(o.out);
    if (!file) throw ConfigError("cannot open " + o.out);
  }
  std::ostream& os = o.out.empty() ? std::cout : file;

  if (o.dump) {
    cfg.validate();
    std::vector<PointRow> all;
    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
      auto pts = dump_points(cfg, n);
      all.insert(all.end(), pts.begin(), pts.end());
    }
    write_table(os, to_table(all), cfg, fmt);
    return kExitOk;
  }

  switch (e) {
    case Experiment::COUNT: {
      const CountReport r = run_count(cfg);
      write_table(os, to_table(r, cfg.timing), cfg, fmt);
      return kExitOk;
    }
    case Experiment::JOINT: {
      const EquidistReport r = run_joint(cfg);
      write_table(os, to_table(r, cfg.timing), cfg, fmt);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
      if (r.trend == "warn") std::cerr << "warning: sliding-window discrepancy increased\n";
      bool ok = r.marginals_consistent;
      if (!r.final_below_first) {
        std::cerr << "assertion failed: final-level sup discrepancy not below the first asymptotic level\n";
        ok = false;
      }
      return ok ? kExitOk : kExitAssert;
    }
    case Experiment::CFE: {
      const CfeReport r = run_cfe(cfg);
      Table t = to_table(r, cfg.timing);
      bool ok = true;
      for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
        const CrossCheck c = cfe_joint_crosscheck(cfg.field(), n, cfg.ideal_spec(), cfg.depth_mp, cfg.workers);
        t.summary.push_back({"n" + std::to_string(n) + ".joint_crosscheck", c.ok});
        if (!c.ok) {
          std::cerr << "assertion failed: " << c.detail << "\n";
          ok = false;
        }
      }
      write_table(os, t, cfg, fmt);
      return ok ? kExitOk : kExitAssert;
    }
    case Experiment::VERIFY: {
      const VerifyReport r = run_verify(cfg);
      write_table(os, to_table(r), cfg, fmt);
      for (const auto& row : r.rows)
        if (!row.match)
          std::cerr << "mismatch: " << row.name << " [" << row.inputs << "] exact " << row.exact << " oracle "
                    << row.oracle << "\n";
      return r.all_pass() ? kExitOk : kExitAssert;
    }
    case Experiment::BIJECTION: {
      const auto rows = run_bijection(cfg);
      write_table(os, to_table(rows), cfg, fmt);
      bool ok = true;
      for (const auto& r : rows)
        if (!r.report.ok) ok = false;
      return ok ? kExitOk : kExitAssert;
    }
  }
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counting and equidistribution experiments for primitive vectors over F_q[Y]"};
  app.require_subcommand(1);
  Options o;

  auto* count = app.add_subcommand("count", "exact counts by norm level against the main term");
  add_common(count, o);
  count->add_flag("--dump", o.dump, "write the point list instead (n <= 4)");

  auto* joint = app.add_subcommand("joint", "joint (direction, solution) cell histogram");
  add_common(joint, o);
  joint->add_flag("--dump", o.dump, "write the point list instead (n <= 4)");
  joint->add_option("--test-fn", o.test_fn, "JSON file {\"f\": [...], \"g\": [...]} of cell values");

  auto* cfe = app.add_subcommand("cfe", "continued-fraction statistic histogram");
  add_common(cfe, o);

  auto* verify = app.add_subcommand("verify", "closed forms against independent oracles");
  add_common(verify, o);
  verify->add_option("--inject-fault", o.cfg.inject_fault, "perturb one formula (negative control)")
      ->check(CLI::IsMember({"", "hecke"}));

  auto* bij = app.add_subcommand("bijection", "lattice side against matrix side over the cell grid");
  add_common(bij, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (count->parsed()) return run(Experiment::COUNT, o);
    if (joint->parsed()) return run(Experiment::JOINT, o);
    if (cfe->parsed()) return run(Experiment::CFE, o);
    if (verify->parsed()) return run(Experiment::VERIFY, o);
    if (bij->parsed()) return run(Experiment::BIJECTION, o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
