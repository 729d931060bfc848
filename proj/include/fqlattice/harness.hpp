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

/*
 * Experiment drivers: counting by norm level, joint equidistribution of
 * (direction, z_w/z_v mod R), the continued-fraction statistic, the oracle
 * table and the exhaustive bijection grid.  All runs are deterministic; the
 * worker count only changes wall time.
 */

#include "cf_engine.hpp"
#include "lattice_enum.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fqlattice {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment { COUNT, JOINT, CFE, VERIFY, BIJECTION };

inline const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::COUNT: return "count";
    case Experiment::JOINT: return "joint";
    case Experiment::CFE: return "cfe";
    case Experiment::VERIFY: return "verify";
    case Experiment::BIJECTION: return "bijection";
  }
  return "?";
}

struct RunConfig {
  std::uint32_t q = 2;
  std::vector<std::uint32_t> modulus;  // GF(p) coefficients low to high; empty = built-in
  int n_min = 1;
  int n_max = 4;
  int depth_m = 1;
  int depth_mp = 2;
  std::string ideal = "1";
  Experiment experiment = Experiment::COUNT;
  unsigned workers = 1;
  std::uint64_t guard = std::uint64_t(1) << 32;  // max of q^{2 n_max + 2}
  std::uint64_t cell_floor = 8;
  bool timing = false;
  std::string inject_fault;       // "hecke": off-by-one in one oracle row (negative control)
  std::vector<double> f_values;   // joint test function on sphere cells
  std::vector<double> g_values;   // joint test function on domain cells
  std::vector<std::uint32_t> verify_qs{2, 3};

  const GaloisField& field() const {
    try {
      return GaloisField::get(q, modulus);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  IdealSpec ideal_spec() const {
    try {
      return IdealSpec(parse_poly(field(), ideal));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("ideal: ") + e.what());
    }
  }
  /// q^{2 n_max + 2}, the size of the level-n_max search space.
  BigInt work_estimate() const { return ipow(BigInt(q), static_cast<unsigned>(2 * std::max(n_max, 0) + 2)); }

  void validate() const {
    field();
    if (n_min > n_max) throw ConfigError("empty level range");
    if (n_min < 0) throw ConfigError("levels must be >= 0");
    if (depth_m < 1 || depth_mp < 1) throw ConfigError("cylinder depths must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (work_estimate() > BigInt(guard))
      throw ConfigError("work estimate q^(2n+2) = " + work_estimate().str() + " exceeds guard " + std::to_string(guard));
    ideal_spec();
    if (experiment == Experiment::JOINT) {
      const auto& F = field();
      if (!f_values.empty() && f_values.size() != SphereCells(F, depth_m).count())
        throw ConfigError("test function f needs one value per sphere cell");
      if (!g_values.empty() && g_values.size() != DomainCells(F, depth_mp).count())
        throw ConfigError("test function g needs one value per domain cell");
    }
  }
};

/// Seconds elapsed while running fn.
template <class Fn>
double timed(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Least-squares slope of log(err) against 2n log q, negated: the decay rate
/// tau in err ~ q^{-2 n tau}.  Needs two levels with nonzero error.
inline std::optional<double> fit_decay_exponent(const std::vector<std::pair<int, double>>& level_err, std::uint32_t q) {
  std::vector<std::pair<double, double>> pts;
  for (auto [n, e] : level_err)
    if (e > 0) pts.emplace_back(2.0 * n * std::log(double(q)), std::log(e));
  if (pts.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double k = double(pts.size());
  const double den = k * sxx - sx * sx;
  if (den == 0) return std::nullopt;
  return -(k * sxy - sx * sy) / den;
}

// ---------------------------------------------------------------------------
// Counting.

struct CountRow {
  int n = 0;
  std::uint64_t count = 0;
  std::uint64_t sharp = 0;
  std::uint64_t non_sharp = 0;
  std::uint64_t boundary = 0;  // v = (0, unit), non-sharp by the tie rule
  Rational main_term;
  Rational relative_error;
  std::optional<double> wall_time;
};

struct CountReport {
  std::vector<CountRow> rows;
  std::optional<double> fitted_tau;
  bool exact_beyond_boundary = false;  // observation only
  std::string fit_status;
};

struct LevelCounts {
  std::uint64_t sharp = 0, non_sharp = 0, boundary = 0;
};

inline LevelCounts count_level(const GaloisField& F, int n, const IdealSpec& I, unsigned workers) {
  EnumFilter flt;
  flt.level = n;
  flt.ideal = I;
  return parallel_blocks<LevelCounts>(
      make_blocks(poly_count(F, n)), workers, {},
      [&](const Block& b) {
        LevelCounts c;
        enumerate_primitive(F, flt, b, [&](const LatticeVec& v) {
          if (is_sharp(v)) {
            ++c.sharp;
          } else {
            ++c.non_sharp;
            if (v.a.is_zero()) ++c.boundary;
          }
        });
        return c;
      },
      [](LevelCounts& acc, const LevelCounts& p) {
        acc.sharp += p.sharp;
        acc.non_sharp += p.non_sharp;
        acc.boundary += p.boundary;
      });
}

inline CountReport run_count(const RunConfig& cfg) {
  cfg.validate();
  const auto& F = cfg.field();
  const IdealSpec I = cfg.ideal_spec();
  CountReport rep;
  std::vector<std::pair<int, double>> errs;
  bool exact = true, any_asymptotic = false;
  for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
    CountRow row;
    row.n = n;
    LevelCounts c;
    const double t = timed([&] { c = count_level(F, n, I, cfg.workers); });
    if (cfg.timing) row.wall_time = t;
    row.sharp = c.sharp;
    row.non_sharp = c.non_sharp;
    row.boundary = c.boundary;
    row.count = c.sharp + c.non_sharp;
    row.main_term = counting_main_term(I, n);
    row.relative_error = abs(Rational(BigInt(row.count)) / row.main_term - 1);
    if (n >= 2) {
      any_asymptotic = true;
      errs.emplace_back(n, to_double(row.relative_error));
      if (row.relative_error != 0) exact = false;
    }
    rep.rows.push_back(row);
  }
  rep.exact_beyond_boundary = any_asymptotic && exact;
  rep.fitted_tau = fit_decay_exponent(errs, F.q());
  if (rep.exact_beyond_boundary)
    rep.fit_status = "exact: relative error 0 at every level >= 2, exponent not identifiable";
  else if (rep.fitted_tau)
    rep.fit_status = *rep.fitted_tau >= 0.125 ? "fitted: tau at least 1/8, consistent with every exponent in ]0, 1/8]"
                     : *rep.fitted_tau > 0    ? "fitted: tau inside ]0, 1/8["
                                              : "fitted: no decay";
  else
    rep.fit_status = "insufficient levels with nonzero error";
  return rep;
}

// ---------------------------------------------------------------------------
// Joint equidistribution.

struct JointCell {
  std::uint64_t dir = 0;
  std::uint64_t sol = 0;
  bool sharp = false;
  std::uint64_t empirical = 0;
  Rational expected;
  Rational ratio;
};

struct TestFnResult {
  double empirical = 0;  // c_I q^{-2n} sum f(dir) g(sol)
  double expected = 0;   // (int f) (int g)
  double ratio = 0;
};

struct JointLevel {
  int n = 0;
  std::uint64_t total = 0;
  Rational main_term;
  std::vector<JointCell> cells;
  Rational sup_discrepancy;
  Rational mean_discrepancy;
  std::uint64_t exceptions = 0;  // sharp v with z_w/z_v != x_w/x_v
  std::uint64_t boundary = 0;
  std::optional<TestFnResult> test_fn;
  std::optional<double> wall_time;
  bool depth_warning = false;
};

struct EquidistReport {
  std::vector<JointLevel> levels;
  std::string trend;           // "pass" or "warn"
  bool final_below_first = false;
  bool marginals_consistent = false;
  std::optional<double> fitted_tau;
  std::vector<std::string> warnings;
};

struct JointHistogram {
  std::vector<std::uint64_t> counts;
  std::uint64_t exceptions = 0;
  std::uint64_t boundary = 0;
};

/// Histogram over (sphere cell, domain cell) of primitive v at level n with
/// z'_v in I, domain cell taken of z_w/z_v mod R.
inline JointHistogram joint_histogram(const GaloisField& F, int n, const IdealSpec& I, const SphereCells& sc,
                                      const DomainCells& dc, unsigned workers, Hemisphere h = Hemisphere::ANY) {
  EnumFilter flt;
  flt.level = n;
  flt.ideal = I;
  flt.hemisphere = h;
  const std::uint64_t ncells = sc.count() * dc.count();
  JointHistogram init;
  init.counts.assign(ncells, 0);
  return parallel_blocks<JointHistogram>(
      make_blocks(poly_count(F, n)), workers, init,
      [&](const Block& b) {
        JointHistogram hist;
        hist.counts.assign(ncells, 0);
        enumerate_primitive(F, flt, b, [&](const LatticeVec& v) {
          const LatticeVec w = companion_of(v);
          const std::uint64_t d = sc.id_of_lattice(v, n);
          const std::uint64_t s = dc.id_of(z_ratio(v, w));
          ++hist.counts[d * dc.count() + s];
          if (is_z_exception(v, w)) ++hist.exceptions;
          if (v.a.is_zero()) ++hist.boundary;
        });
        return hist;
      },
      [](JointHistogram& acc, const JointHistogram& p) {
        for (std::size_t i = 0; i < acc.counts.size(); ++i) acc.counts[i] += p.counts[i];
        acc.exceptions += p.exceptions;
        acc.boundary += p.boundary;
      });
}

inline EquidistReport run_joint(const RunConfig& cfg) {
  cfg.validate();
  const auto& F = cfg.field();
  const std::uint32_t q = F.q();
  const IdealSpec I = cfg.ideal_spec();
  const SphereCells sc(F, cfg.depth_m);
  const DomainCells dc(F, cfg.depth_mp);
  const Rational cI = c_I(I);
  const Rational theta_mass = qpow(q, -2 * cfg.depth_m);
  const Rational dprime_mass = qpow(q, -cfg.depth_mp);
  EquidistReport rep;
  std::vector<std::pair<int, double>> sups;

  for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
    JointLevel lv;
    lv.n = n;
    JointHistogram hist;
    const double t = timed([&] { hist = joint_histogram(F, n, I, sc, dc, cfg.workers); });
    if (cfg.timing) lv.wall_time = t;
    lv.exceptions = hist.exceptions;
    lv.boundary = hist.boundary;
    lv.main_term = counting_main_term(I, n);
    const Rational expected = qpow(q, 2 * n) * theta_mass * dprime_mass / cI;
    if (expected < Rational(BigInt(cfg.cell_floor))) lv.depth_warning = true;
    Rational sup = 0, sum = 0;
    for (std::uint64_t d = 0; d < sc.count(); ++d) {
      const bool sharp = sc.is_sharp(d);
      for (std::uint64_t s = 0; s < dc.count(); ++s) {
        JointCell c{d, s, sharp, hist.counts[d * dc.count() + s], expected, 0};
        c.ratio = Rational(BigInt(c.empirical)) / expected;
        const Rational disc = abs(c.ratio - 1);
        sup = std::max(sup, disc);
        sum += disc;
        lv.total += c.empirical;
        lv.cells.push_back(c);
      }
    }
    lv.sup_discrepancy = sup;
    lv.mean_discrepancy = sum / Rational(BigInt(lv.cells.size()));
    if (!cfg.f_values.empty() || !cfg.g_values.empty()) {
      TestFnResult tf;
      auto fv = [&](std::uint64_t d) { return cfg.f_values.empty() ? 1.0 : cfg.f_values[d]; };
      auto gv = [&](std::uint64_t s) { return cfg.g_values.empty() ? 1.0 : cfg.g_values[s]; };
      double acc = 0, int_f = 0, int_g = 0;
      for (const auto& c : lv.cells) acc += fv(c.dir) * gv(c.sol) * double(c.empirical);
      for (std::uint64_t d = 0; d < sc.count(); ++d) int_f += fv(d) * to_double(theta_mass);
      for (std::uint64_t s = 0; s < dc.count(); ++s) int_g += gv(s) * to_double(dprime_mass);
      tf.empirical = to_double(cI * qpow(q, -2 * n)) * acc;
      tf.expected = int_f * int_g;
      tf.ratio = tf.expected != 0 ? tf.empirical / tf.expected : 0;
      lv.test_fn = tf;
    }
    if (lv.depth_warning)
      rep.warnings.push_back("level " + std::to_string(n) + ": expected count per cell " + to_string(expected) +
                             " below floor " + std::to_string(cfg.cell_floor));
    if (n >= 2) sups.emplace_back(n, to_double(sup));
    rep.levels.push_back(std::move(lv));
  }

  // Marginals: cell totals equal the plain filtered count.
  rep.marginals_consistent = true;
  for (const auto& lv : rep.levels) {
    EnumFilter flt;
    flt.level = lv.n;
    flt.ideal = I;
    if (count_primitive(F, flt, cfg.workers) != lv.total) rep.marginals_consistent = false;
  }

  // Trend over asymptotic levels (n >= 2): two-level sliding averages of the
  // sup discrepancy should not increase; the hard requirement is that the
  // last level improves strictly on the first.
  std::vector<Rational> sup_vals;
  for (const auto& lv : rep.levels)
    if (lv.n >= 2) sup_vals.push_back(lv.sup_discrepancy);
  rep.trend = "pass";
  for (std::size_t i = 2; i < sup_vals.size(); ++i)
    if (sup_vals[i] + sup_vals[i - 1] > sup_vals[i - 1] + sup_vals[i - 2]) rep.trend = "warn";
  rep.final_below_first = sup_vals.size() >= 2 && sup_vals.back() < sup_vals.front();
  rep.fitted_tau = fit_decay_exponent(sups, q);
  return rep;
}

// ---------------------------------------------------------------------------
// Continued-fraction statistic.

struct CfeCell {
  std::uint64_t cell = 0;
  std::uint64_t empirical = 0;
  Rational expected;        // from the joint normalization
  Rational alt_expected;    // with the competing prefactor below
  Rational ratio;
};

struct CfeLevel {
  int n = 0;
  std::uint64_t total = 0;
  std::vector<CfeCell> cells;
  Rational sup_discrepancy;
  std::optional<double> wall_time;
};

struct CfeReport {
  Rational normalization;    // q N(I) prod(1 + 1/N(p)) / (q-1)^2
  Rational alt_prefactor;    // q^{deg P'} prod(1 - q^{-deg p}) / (q^2 (q-1)), reported for comparison
  std::vector<CfeLevel> levels;
};

/// (-1)^n Q_{n-1} / Q_n for the expansion of a/b.
inline RationalFn cfe_statistic(const Poly& a, const Poly& b) {
  const CfExpansion e = cf_expand(RationalFn(a, b));
  const ConvergentTable t = convergents(e);
  const int n = t.n();
  const RationalFn r(t.Q(n - 1), t.Q(n));
  return n % 2 == 0 ? r : -r;
}

/// Histogram over depth-m' cells of the statistic for v = (P, Q) primitive,
/// deg P < deg Q = n, P' | P.
inline std::vector<std::uint64_t> cfe_histogram(const GaloisField& F, int n, const IdealSpec& I,
                                                const DomainCells& dc, unsigned workers) {
  EnumFilter flt;
  flt.level = n;
  flt.ideal = I;  // z'_v = P on this hemisphere
  flt.hemisphere = Hemisphere::NON_SHARP;
  std::vector<std::uint64_t> init(dc.count(), 0);
  return parallel_blocks<std::vector<std::uint64_t>>(
      make_blocks(poly_count(F, n)), workers, init,
      [&](const Block& b) {
        std::vector<std::uint64_t> h(dc.count(), 0);
        enumerate_primitive(F, flt, b, [&](const LatticeVec& v) { ++h[dc.id_of(cfe_statistic(v.a, v.b))]; });
        return h;
      },
      [](std::vector<std::uint64_t>& acc, const std::vector<std::uint64_t>& p) {
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += p[i];
      });
}

inline CfeReport run_cfe(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.n_min < 1) throw ConfigError("cfe levels must be >= 1");
  const auto& F = cfg.field();
  const std::uint32_t q = F.q();
  const IdealSpec I = cfg.ideal_spec();
  const DomainCells dc(F, cfg.depth_mp);
  CfeReport rep;
  const BigInt Q = q;
  rep.normalization = Rational(Q) * hecke_factor(I) / Rational((Q - 1) * (Q - 1));
  Rational pp = Rational(ideal_norm(I));
  for (const auto& p : I.primes()) pp *= 1 - qpow(q, -p.degree().value());
  rep.alt_prefactor = pp / Rational(Q * Q * (Q - 1));
  const Rational cell_prob = qpow(q, -(cfg.depth_mp - 1));
  for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
    CfeLevel lv;
    lv.n = n;
    std::vector<std::uint64_t> h;
    const double t = timed([&] { h = cfe_histogram(F, n, I, dc, cfg.workers); });
    if (cfg.timing) lv.wall_time = t;
    const Rational expected = qpow(q, 2 * n) / rep.normalization * cell_prob;
    const Rational alt_expected = qpow(q, 2 * n) / rep.alt_prefactor * cell_prob;
    Rational sup = 0;
    for (std::uint64_t c = 0; c < dc.count(); ++c) {
      CfeCell cell{c, h[c], expected, alt_expected, Rational(BigInt(h[c])) / expected};
      sup = std::max(sup, Rational(abs(cell.ratio - 1)));
      lv.total += h[c];
      lv.cells.push_back(cell);
    }
    lv.sup_discrepancy = sup;
    rep.levels.push_back(std::move(lv));
  }
  return rep;
}

struct CrossCheck {
  bool ok = true;
  std::string detail;
};

/// The statistic histogram equals the joint histogram restricted to the
/// non-sharp half, read through f -> -f.
inline CrossCheck cfe_joint_crosscheck(const GaloisField& F, int n, const IdealSpec& I, int mp, unsigned workers) {
  const SphereCells sc(F, 1);
  const DomainCells dc(F, mp);
  const auto cfe = cfe_histogram(F, n, I, dc, workers);
  const auto joint = joint_histogram(F, n, I, sc, dc, workers);
  std::vector<std::uint64_t> restricted(dc.count(), 0);
  for (std::uint64_t d = 0; d < sc.count(); ++d) {
    if (sc.is_sharp(d)) continue;
    for (std::uint64_t s = 0; s < dc.count(); ++s) restricted[s] += joint.counts[d * dc.count() + s];
  }
  CrossCheck out;
  for (std::uint64_t s = 0; s < dc.count(); ++s) {
    if (cfe[s] != restricted[dc.negate(s)]) {
      out.ok = false;
      out.detail = "level " + std::to_string(n) + " cell " + std::to_string(s) + ": statistic " +
                   std::to_string(cfe[s]) + " vs joint " + std::to_string(restricted[dc.negate(s)]);
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Oracle table.

struct VerifyRow {
  std::string name;
  std::string relation;
  std::string inputs;
  std::string exact;
  std::string oracle;
  bool match = false;
};

struct VerifyReport {
  std::vector<VerifyRow> rows;
  bool all_pass() const {
    for (const auto& r : rows)
      if (!r.match) return false;
    return true;
  }
};

/// Every monic polynomial of degree 1..max_deg over F plus the unit ideal.
inline std::vector<IdealSpec> small_ideals(const GaloisField& F, int max_deg) {
  std::vector<IdealSpec> out{IdealSpec::unit(F)};
  for (int d = 1; d <= max_deg; ++d) {
    const std::uint64_t base = poly_count(F, d - 1);
    for (std::uint64_t low = 0; low < base; ++low) out.emplace_back(Poly::from_rank(F, base + low));
  }
  return out;
}

struct CfSuiteResult {
  std::uint64_t expansions = 0;
  std::uint64_t failures = 0;
  std::uint64_t hypotheses = 0;
  std::string first_failure;
};

/// CF identities on every a/b with 0 <= deg a, deg b <= max_deg, b not
/// dividing a: reconstruction, recurrences, determinant, approximation and
/// the good-approximation characterization.
inline CfSuiteResult cf_identity_suite(const GaloisField& F, int max_deg, bool characterization = true) {
  CfSuiteResult r;
  const std::uint64_t top = poly_count(F, max_deg);
  for (std::uint64_t br = 1; br < top; ++br) {
    const Poly b = Poly::from_rank(F, br);
    for (std::uint64_t ar = 0; ar < top; ++ar) {
      const Poly a = Poly::from_rank(F, ar);
      const RationalFn f(a, b);
      if (f.is_poly()) continue;
      ++r.expansions;
      const CfExpansion e = cf_expand(f);
      const ConvergentTable t = convergents(e);
      std::string bad;
      if (reconstruct(e) != f) bad = "reconstruction";
      else if (!check_recurrence(e, t)) bad = "recurrence";
      else if (!check_determinant(t)) bad = "determinant";
      else if (!check_approx(e, t)) bad = "approximation";
      else if (RationalFn(t.P(t.n()), t.Q(t.n())) != f) bad = "final convergent";
      if (bad.empty() && characterization) {
        const ApproxCheck c = check_characterization(e, t);
        r.hypotheses += c.hypotheses;
        if (!c.ok) bad = "characterization " + c.failure;
      }
      if (!bad.empty()) {
        ++r.failures;
        if (r.first_failure.empty()) r.first_failure = bad + " at " + to_pretty(f);
      }
    }
  }
  return r;
}

struct ShortestSuiteResult {
  std::uint64_t pairs = 0;
  std::uint64_t mismatches = 0;
  std::uint64_t non_unique = 0;       // pairs whose minimal norm is attained more than once
  std::uint64_t unexpected_ties = 0;  // ties outside deg a, deg b <= 0
  std::string first_mismatch;
};

/// shortest_solution against the exhaustive scan on coprime pairs of degree
/// <= max_deg.  The closed form must be one of the optima, equal to the
/// unique optimum whenever the optimum is unique.
inline ShortestSuiteResult shortest_suite(const GaloisField& F, int max_deg) {
  ShortestSuiteResult r;
  const std::uint64_t top = poly_count(F, max_deg);
  for (std::uint64_t ar = 0; ar < top; ++ar) {
    const Poly a = Poly::from_rank(F, ar);
    for (std::uint64_t br = 0; br < top; ++br) {
      const Poly b = Poly::from_rank(F, br);
      if (!coprime(a, b)) continue;
      ++r.pairs;
      const LatticeVec s = shortest_solution(a, b);
      const int bound = std::max({0, a.is_zero() ? 0 : a.degree().value(), b.is_zero() ? 0 : b.degree().value()}) + 1;
      const BruteShortest bf = brute_force_shortest(a, b, bound);
      const bool degenerate = a.degree() <= 0 && b.degree() <= 0;
      if (bf.optima > 1) {
        ++r.non_unique;
        if (!degenerate) ++r.unexpected_ties;
      }
      const bool among = std::find(bf.all_optima.begin(), bf.all_optima.end(), s) != bf.all_optima.end();
      const bool ok = (a * s.a + b * s.b == Poly::constant(F, F.one())) && among && (bf.optima > 1 || s == bf.best);
      if (!ok) {
        ++r.mismatches;
        if (r.first_mismatch.empty())
          r.first_mismatch = "(" + to_pretty(a) + ", " + to_pretty(b) + "): closed form (" + to_pretty(s.a) + ", " +
                             to_pretty(s.b) + ") vs scan (" + to_pretty(bf.best.a) + ", " + to_pretty(bf.best.b) + ")";
      }
    }
  }
  return r;
}

struct LuSuiteResult {
  std::uint64_t matrices = 0;
  std::uint64_t failures = 0;
};

/// Refined LU reconstruction and integrality of p_g over gamma_v, n <= max_n.
inline LuSuiteResult lu_suite(const GaloisField& F, int max_n) {
  LuSuiteResult r;
  for (int n = 0; n <= max_n; ++n) {
    EnumFilter flt;
    flt.level = n;
    flt.hemisphere = Hemisphere::SHARP;
    enumerate_primitive(F, flt, [&](const LatticeVec& v) {
      const Mat2 g = gamma_of(v);
      const RefinedLU lu = refined_lu(g);
      ++r.matrices;
      if (!g.is_unimodular() || lu.product() != g || !lu.p().in_unit_ball()) ++r.failures;
    });
  }
  return r;
}

struct BijectionGridRow {
  int n = 0;
  std::string ideal;
  std::uint64_t theta = 0;
  std::uint64_t dprime = 0;
  BijectionReport report;
};

/// Every sharp depth-m cell times every depth-m' cell at each level.
inline std::vector<BijectionGridRow> bijection_grid(const GaloisField& F, int n_min, int n_max, int m, int mp,
                                                    const std::vector<IdealSpec>& ideals, WHook hook = {}) {
  std::vector<BijectionGridRow> rows;
  const SphereCells sc(F, m);
  const DomainCells dc(F, mp);
  std::vector<std::uint64_t> sharp_ids;
  for (std::uint64_t d = 0; d < sc.count(); ++d)
    if (sc.is_sharp(d)) sharp_ids.push_back(d);
  for (int n = n_min; n <= n_max; ++n) {
    BijectionContext ctx(F, n, std::max(m, mp), hook);
    for (const auto& I : ideals)
      for (auto t : sharp_ids) {
        const Cylinder theta = sc.cylinder(t);
        for (std::uint64_t s = 0; s < dc.count(); ++s) {
          const Cylinder dp = dc.cylinder(s);
          rows.push_back({n, to_pretty(I.gen()), t, s, ctx.verify(&theta, &dp, I)});
        }
      }
  }
  return rows;
}

struct StabilitySuiteResult {
  StabilityReport totals;
  int kernel_level = 0;
  std::uint64_t kernel_size = 0;
};

/// Box stability at q, levels 0..max_n, every sharp depth-m cell and every
/// depth-m' cell, kernel level N.
inline StabilitySuiteResult stability_suite(const GaloisField& F, int max_n, int m, int mp, int N, int extra = 1,
                                            bool two_sided = true) {
  StabilitySuiteResult out;
  out.kernel_level = N;
  const auto kernel = kernel_representatives(F, N, extra);
  out.kernel_size = kernel.size();
  const SphereCells sc(F, m);
  const DomainCells dc(F, mp);
  for (int n = 0; n <= max_n; ++n) {
    const CandidateSet cs = build_candidates(F, n, std::max(m, mp));
    for (std::uint64_t t = 0; t < sc.count(); ++t) {
      if (!sc.is_sharp(t)) continue;
      const Cylinder theta = sc.cylinder(t);
      for (std::uint64_t s = 0; s < dc.count(); ++s) {
        const Cylinder dp = dc.cylinder(s);
        const StabilityReport r = check_box_stability(cs, &theta, &dp, kernel, two_sided);
        out.totals.members += r.members;
        out.totals.non_members += r.non_members;
        out.totals.perturbations += r.perturbations;
        out.totals.flips += r.flips;
        if (out.totals.first_flip.empty()) out.totals.first_flip = r.first_flip;
      }
    }
  }
  return out;
}

inline VerifyReport run_verify(const RunConfig& cfg) {
  VerifyReport rep;
  auto add = [&](std::string name, std::string relation, std::string inputs, std::string exact, std::string oracle) {
    const bool m = exact == oracle;
    rep.rows.push_back({std::move(name), std::move(relation), std::move(inputs), std::move(exact), std::move(oracle), m});
  };
  const bool fault_hecke = cfg.inject_fault == "hecke";
  for (std::uint32_t q : cfg.verify_qs) {
    const auto& F = GaloisField::get(q);
    const std::string qs = "q=" + std::to_string(q);
    const BigInt Q = q;
    // Zeta value from the Euler product 1/((1 - q^-s)(1 - q^{1-s})) at s = -1.
    {
      const Rational euler = Rational(1) / ((Rational(1) - Rational(Q)) * (Rational(1) - Rational(Q * Q)));
      add("zeta_minus1", "Euler product at s=-1", qs, to_string(zeta_minus1(q)), to_string(euler));
    }
    add("sphere_mass", "two unit-ball slabs minus overlap", qs, to_string(sphere_mass(q)),
        to_string(Rational(2) * (1 - Rational(1, Q)) - (1 - Rational(1, Q)) * (1 - Rational(1, Q))));
    for (int m = 1; m <= 2; ++m) {
      const SphereCells sc(F, m);
      // Count digit pairs directly.
      std::uint64_t valid = 0;
      const std::uint64_t qm = poly_count(F, m - 1);
      for (std::uint64_t X = 0; X < qm; ++X)
        for (std::uint64_t Yk = 0; Yk < qm; ++Yk)
          if (X >= qm / q || Yk >= qm / q) ++valid;
      add("sphere_mass", "sum of depth-m cell masses", qs + " m=" + std::to_string(m), to_string(sphere_mass(q)),
          to_string(Rational(BigInt(valid)) * qpow(q, -2 * m)));
      add("sphere_cells", "cell count (q^2-1)q^(2m-2)", qs + " m=" + std::to_string(m), std::to_string(sc.count()),
          std::to_string(valid));
    }
    add("quotient_mass", "mass of Y^-1 O", qs, to_string(quotient_mass(q)), to_string(qpow(q, -1)));
    add("sharp_split", "sharp + non-sharp = sphere", qs, to_string(sharp_mass(q) + nonsharp_mass(q)),
        to_string(sphere_mass(q)));

    for (const auto& I : small_ideals(F, 2)) {
      BigInt exact = hecke_index(I);
      if (fault_hecke && q == 2 && I.gen() == Poly::Y(F)) exact += 1;
      const std::string in = qs + " I=(" + to_pretty(I.gen()) + ")";
      add("hecke_index", "orbit of [1:0] in P^1(R/I)", in, to_string(exact), to_string(hecke_index_bruteforce(I)));
      const Rational lhs = sphere_mass(q) * quotient_mass(q) * qpow(q, 4) / c_I(I);
      add("counting_main_term", "sphere*quotient*q^2n/c_I at n=2", in, to_string(counting_main_term(I, 2)),
          to_string(lhs));
    }
    for (int N = 1; N <= 3; ++N) {
      const std::string in = qs + " N=" + std::to_string(N);
      if (poly_count(F, N - 1) <= 9 && (q == 2 || N == 1))
        add("sl2_order_mod", "determinant-one count", in, to_string(sl2_order_mod(q, N)),
            to_string(sl2_order_mod_bruteforce(F, N, 9)));
      add("kernel_measure", "index form vs LU product", in, to_string(kernel_measure_by_index(q, N)),
          to_string(kernel_measure_by_lu(q, N)));
    }
    {
      // Box additivity over the depth (1, 2) partition of sharp x D.
      const SphereCells sc(F, 1);
      const DomainCells dc(F, 2);
      Rational parts = 0;
      for (std::uint64_t t = 0; t < sc.count(); ++t)
        if (sc.is_sharp(t))
          for (std::uint64_t s = 0; s < dc.count(); ++s)
            parts += box_measure(q, {sc.cylinder(t).mass(), 1, dc.cylinder(s).mass()});
      add("box_measure", "finite additivity over cells", qs + " n=1",
          to_string(box_measure(q, {sharp_mass(q), 1, quotient_mass(q)})), to_string(parts));
    }
    {
      EnumFilter flt;
      flt.level = 1;
      add("count_n1", "q(q-1)^2(q+1)", qs, std::to_string(count_primitive(F, flt, cfg.workers)),
          to_string(BigInt(Q * (Q - 1) * (Q - 1) * (Q + 1))));
    }
    const int lu_n = q == 2 ? 3 : 2;
    const LuSuiteResult lu = lu_suite(F, lu_n);
    add("refined_lu", "reconstruction and integral p_g, failures", qs + " n<=" + std::to_string(lu_n),
        std::to_string(lu.failures), "0");
    const int cf_deg = q == 2 ? 4 : 3;
    const CfSuiteResult cf = cf_identity_suite(F, cf_deg);
    add("cf_identities", "expansion identities, failures", qs + " deg<=" + std::to_string(cf_deg),
        std::to_string(cf.failures), "0");
    const ShortestSuiteResult sh = shortest_suite(F, q == 2 ? 3 : 2);
    add("shortest_solution", "exhaustive scan, mismatches", qs, std::to_string(sh.mismatches), "0");
    const auto grid = bijection_grid(F, 0, 2, 1, 2, {IdealSpec::unit(F), IdealSpec(Poly::Y(F))});
    std::uint64_t bad = 0;
    for (const auto& row : grid)
      if (!row.report.ok) ++bad;
    add("bijection", "lattice side vs matrix side, failing cells", qs + " n<=2", std::to_string(bad), "0");
    if (q == 2) {
      const auto st = stability_suite(F, 2, 1, 2, 3, 1, false);
      add("box_stability", "kernel perturbations, flips", qs + " n<=2 N=3", std::to_string(st.totals.flips), "0");
    }
  }
  return rep;
}

inline std::vector<BijectionGridRow> run_bijection(const RunConfig& cfg) {
  cfg.validate();
  const auto& F = cfg.field();
  std::vector<IdealSpec> ideals{cfg.ideal_spec()};
  return bijection_grid(F, cfg.n_min, cfg.n_max, cfg.depth_m, cfg.depth_mp, ideals);
}

// ---------------------------------------------------------------------------
// Point lists.

struct PointRow {
  LatticeVec v;
  LatticeVec w;
  int norm_exp = 0;
  std::uint64_t dir_cell = 0;
  std::uint64_t sol_cell = 0;
};

inline std::vector<PointRow> dump_points(const RunConfig& cfg, int n) {
  if (n > 4) throw ConfigError("point dumps are limited to n <= 4");
  const auto& F = cfg.field();
  const SphereCells sc(F, cfg.depth_m);
  const DomainCells dc(F, cfg.depth_mp);
  EnumFilter flt;
  flt.level = n;
  flt.ideal = cfg.ideal_spec();
  std::vector<PointRow> out;
  enumerate_primitive(F, flt, [&](const LatticeVec& v) {
    const LatticeVec w = companion_of(v);
    out.push_back({v, w, n, sc.id_of_lattice(v, n), dc.id_of(z_ratio(v, w))});
  });
  return out;
}

}  // namespace fqlattice
