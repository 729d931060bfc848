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

// Artin continued fractions of rational functions and the shortest solution
// of ax + by = 1.

#include "laurent_plane.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fqlattice {

struct CfExpansion {
  Poly a0;
  std::vector<Poly> coeffs;  // a_1 .. a_n
  RationalFn source;

  std::size_t length() const { return coeffs.size(); }
  /// a_i for 0 <= i <= n.
  const Poly& a(std::size_t i) const { return i == 0 ? a0 : coeffs.at(i - 1); }
};

/// Rows (P_i, Q_i) for i = -1 .. n.
class ConvergentTable {
 public:
  ConvergentTable() = default;
  explicit ConvergentTable(std::vector<std::pair<Poly, Poly>> rows) : rows_(std::move(rows)) {}

  int n() const { return static_cast<int>(rows_.size()) - 2; }
  const Poly& P(int i) const { return rows_.at(static_cast<std::size_t>(i + 1)).first; }
  const Poly& Q(int i) const { return rows_.at(static_cast<std::size_t>(i + 1)).second; }
  Poly& P(int i) { return rows_.at(static_cast<std::size_t>(i + 1)).first; }
  Poly& Q(int i) { return rows_.at(static_cast<std::size_t>(i + 1)).second; }
  const std::vector<std::pair<Poly, Poly>>& rows() const { return rows_; }

 private:
  std::vector<std::pair<Poly, Poly>> rows_;
};

/// f -> {1/f} on Y^{-1}O - {0}.
inline RationalFn artin_step(const RationalFn& f) {
  if (f.is_zero() || f.valuation() < 1) throw std::domain_error("artin_step requires a nonzero strictly proper fraction");
  return fractional_part(f.inverse());
}

inline CfExpansion cf_expand(const RationalFn& f) {
  if (f.is_poly()) throw std::domain_error("expansion length zero");
  CfExpansion e{integral_part(f), {}, f};
  RationalFn g = fractional_part(f);
  while (!g.is_zero()) {
    const RationalFn inv = g.inverse();
    e.coeffs.push_back(integral_part(inv));
    g = fractional_part(inv);
  }
  return e;
}

inline ConvergentTable convergents(const CfExpansion& e) {
  const auto& F = e.source.field();
  const Poly one = Poly::constant(F, F.one()), zero(F);
  std::vector<std::pair<Poly, Poly>> rows{{one, zero}, {e.a0, one}};
  for (const auto& ai : e.coeffs) {
    const auto& r1 = rows[rows.size() - 1];
    const auto& r2 = rows[rows.size() - 2];
    rows.emplace_back(r1.first * ai + r2.first, r1.second * ai + r2.second);
  }
  return ConvergentTable(std::move(rows));
}

/// Folds a_0 + 1/(a_1 + 1/(... + 1/a_n)) back into a rational function.
inline RationalFn reconstruct(const CfExpansion& e) {
  if (e.coeffs.empty()) return RationalFn(e.a0);
  RationalFn acc(e.coeffs.back());
  for (std::size_t i = e.coeffs.size() - 1; i-- > 0;) acc = RationalFn(e.coeffs[i]) + acc.inverse();
  return RationalFn(e.a0) + acc.inverse();
}

/// omega(f - P_i/Q_i) = deg Q_i + deg Q_{i+1} for 0 <= i < n.
inline bool check_approx(const CfExpansion& e, const ConvergentTable& t) {
  if (t.n() != static_cast<int>(e.length())) return false;
  for (int i = 0; i < t.n(); ++i) {
    if (t.Q(i).is_zero() || t.Q(i + 1).is_zero()) return false;
    const RationalFn diff = e.source - RationalFn(t.P(i), t.Q(i));
    const int expected = t.Q(i).degree().value() + t.Q(i + 1).degree().value();
    if (!(diff.valuation() == expected)) return false;
  }
  return true;
}

/// Q_{i+1} P_i - P_{i+1} Q_i = (-1)^{i+1} for -1 <= i < n.
inline bool check_determinant(const ConvergentTable& t) {
  if (t.rows().empty()) return false;
  const auto& F = t.P(-1).field();
  for (int i = -1; i < t.n(); ++i) {
    const Poly lhs = t.Q(i + 1) * t.P(i) - t.P(i + 1) * t.Q(i);
    const FieldElem sign = ((i + 1) % 2 == 0) ? F.one() : F.neg(F.one());
    if (lhs != Poly::constant(F, sign)) return false;
  }
  return true;
}

/// Initial rows, both three-term recurrences, degree growth of Q_i and
/// |P_i| < |Q_i| for i >= 1 when the source is strictly proper.
inline bool check_recurrence(const CfExpansion& e, const ConvergentTable& t) {
  const auto& F = e.source.field();
  const Poly one = Poly::constant(F, F.one()), zero(F);
  if (t.n() != static_cast<int>(e.length())) return false;
  if (t.P(-1) != one || t.Q(-1) != zero || t.P(0) != e.a0 || t.Q(0) != one) return false;
  for (int i = 1; i <= t.n(); ++i) {
    const Poly& ai = e.a(static_cast<std::size_t>(i));
    if (ai.degree() < 1) return false;
    if (t.P(i) != t.P(i - 1) * ai + t.P(i - 2)) return false;
    if (t.Q(i) != t.Q(i - 1) * ai + t.Q(i - 2)) return false;
    if (!(t.Q(i).degree() > t.Q(i - 1).degree())) return false;
    if (e.a0.is_zero() && !(t.P(i).degree() < t.Q(i).degree())) return false;
  }
  return true;
}

inline bool is_convergent(const ConvergentTable& t, const Poly& P, const Poly& Q) {
  if (Q.is_zero()) throw std::invalid_argument("is_convergent with Q = 0");
  const RationalFn target(P, Q);
  for (int i = 0; i <= t.n(); ++i)
    if (RationalFn(t.P(i), t.Q(i)) == target) return true;
  return false;
}

inline bool is_convergent(const RationalFn& f, const Poly& P, const Poly& Q) {
  return is_convergent(convergents(cf_expand(f)), P, Q);
}

/// Good approximation test |f - P/Q| < 1/|Q|^2.
inline bool is_good_approximation(const RationalFn& f, const Poly& P, const Poly& Q) {
  const RationalFn diff = f - RationalFn(P, Q);
  return diff.valuation() > 2 * Q.degree().value();
}

struct ApproxCheck {
  bool ok = true;
  std::size_t hypotheses = 0;  // pairs meeting |f - P/Q| < 1/|Q|^2
  std::string failure;
};

/// Every P/Q with 0 < deg Q + 1 <= deg Q_n and |f - P/Q| < 1/|Q|^2 is a
/// convergent.  For fixed Q only P = [fQ] can satisfy the hypothesis,
/// since it forces |fQ - P| < 1.
inline ApproxCheck check_characterization(const CfExpansion& e, const ConvergentTable& t) {
  ApproxCheck out;
  const auto& F = e.source.field();
  const int dn = t.Q(t.n()).degree().value();
  const std::uint64_t limit = poly_count(F, dn - 1);
  for (std::uint64_t r = 1; r < limit; ++r) {
    const Poly Q = Poly::from_rank(F, r);
    const Poly P = integral_part(e.source * RationalFn(Q));
    if (!is_good_approximation(e.source, P, Q)) continue;
    ++out.hypotheses;
    if (!is_convergent(t, P, Q)) {
      out.ok = false;
      out.failure = "P/Q=" + to_pretty(RationalFn(P, Q)) + " for f=" + to_pretty(e.source);
      return out;
    }
  }
  return out;
}

/// The shortest (x, y) with ax + by = 1.  When several solutions share the
/// minimal norm (only possible if a and b both have degree <= 0) the one
/// returned is (a^-1, 0) for a unit a and (0, b^-1) for a = 0.
inline LatticeVec shortest_solution(const Poly& a, const Poly& b) {
  a.check_field(b);
  const auto& F = a.field();
  if (!coprime(a, b)) throw std::invalid_argument("shortest_solution requires coprime input");
  if (a.is_unit()) return {Poly::constant(F, F.inv(a.lead())), Poly(F)};
  if (a.is_zero()) return {Poly(F), Poly::constant(F, F.inv(b.lead()))};
  if (a.degree() > b.degree()) {
    LatticeVec s = shortest_solution(b, a);
    return {s.b, s.a};
  }
  if (a.degree() == b.degree()) {
    const FieldElem lam = F.div(a.lead(), b.lead());
    const Poly a2 = a - b.scaled(lam);
    LatticeVec s = shortest_solution(a2, b);
    return {s.a, s.b - s.a.scaled(lam)};
  }
  // deg a < deg b, a not constant: a/b is strictly proper.
  const CfExpansion e = cf_expand(RationalFn(a, b));
  const ConvergentTable t = convergents(e);
  const int n = t.n();
  const FieldElem lam_inv = F.div(t.Q(n).lead(), b.lead());
  const FieldElem sign = (n % 2 == 0) ? F.one() : F.neg(F.one());
  const FieldElem c = F.mul(sign, lam_inv);
  return {-t.Q(n - 1).scaled(c), t.P(n - 1).scaled(c)};
}

struct BruteShortest {
  LatticeVec best;         // minimal norm, ties broken by the canonical order
  std::size_t optima = 0;  // number of solutions attaining the minimal norm
  std::vector<LatticeVec> all_optima;
};

/// Exhaustive scan over x with deg x < degree_bound.
inline BruteShortest brute_force_shortest(const Poly& a, const Poly& b, int degree_bound) {
  a.check_field(b);
  const auto& F = a.field();
  if (!coprime(a, b)) throw std::invalid_argument("brute_force_shortest requires coprime input");
  const Poly one = Poly::constant(F, F.one());
  const std::uint64_t limit = poly_count(F, degree_bound - 1);
  std::optional<int> best_norm;
  BruteShortest out{{Poly(F), Poly(F)}, 0, {}};
  auto offer = [&](const Poly& x, const Poly& y) {
    const int nx = x.is_zero() ? INT32_MIN : x.degree().value();
    const int ny = y.is_zero() ? INT32_MIN : y.degree().value();
    const int norm = std::max(nx, ny);
    if (!best_norm || norm < *best_norm) {
      best_norm = norm;
      out.all_optima.clear();
    }
    if (norm == *best_norm) out.all_optima.push_back({x, y});
  };
  for (std::uint64_t r = 0; r < limit; ++r) {
    const Poly x = Poly::from_rank(F, r);
    const Poly rest = one - a * x;
    if (b.is_zero()) {
      if (!rest.is_zero()) continue;
      for (std::uint64_t s = 0; s < limit; ++s) offer(x, Poly::from_rank(F, s));
      continue;
    }
    auto [y, rem] = divmod(rest, b);
    if (!rem.is_zero() || y.degree() >= degree_bound) continue;
    offer(x, y);
  }
  if (out.all_optima.empty()) throw std::runtime_error("no solution within degree bound");
  std::sort(out.all_optima.begin(), out.all_optima.end());
  out.best = out.all_optima.front();
  out.optima = out.all_optima.size();
  return out;
}

/// "[a0; a1, a2, ...]"
inline std::string to_string(const CfExpansion& e) {
  std::string s = "[" + to_pretty(e.a0) + ";";
  for (std::size_t i = 0; i < e.coeffs.size(); ++i) s += (i ? ", " : " ") + to_pretty(e.coeffs[i]);
  return s + "]";
}

}  // namespace fqlattice
