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
 * Closed-form measure constants for F_q(Y) at the place at infinity (genus
 * 0, residue field order q), the Hecke index, SL2 orders over truncated
 * power series rings, and the refined LU decomposition.  Every closed form
 * has a brute-force counterpart here so tests can compare the two.
 */

#include "mat2.hpp"
#include "rational.hpp"

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

namespace fqlattice {

inline void require_field_order(std::uint32_t q) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
}

inline Rational zeta_minus1(std::uint32_t q) {
  require_field_order(q);
  const BigInt Q = q;
  return Rational(BigInt(1), (Q - 1) * (Q * Q - 1));
}

/// Total mass of the unit sphere of the plane.
inline Rational sphere_mass(std::uint32_t q) {
  require_field_order(q);
  const BigInt Q = q;
  return Rational(Q * Q - 1, Q * Q);
}

/// Total mass of K_w / R_w.
inline Rational quotient_mass(std::uint32_t q) {
  require_field_order(q);
  return Rational(BigInt(1), BigInt(q));
}

/// Mass of the sharp half {|x| = 1 >= |y|} of the sphere, and of its complement.
inline Rational sharp_mass(std::uint32_t q) { return Rational(BigInt(q) - 1, BigInt(q)); }
inline Rational nonsharp_mass(std::uint32_t q) { return Rational(BigInt(q) - 1, BigInt(q) * q); }

struct MeasureConstants {
  std::uint32_t q = 2;
  int genus = 0;
  Rational sphere;
  Rational quotient;
  Rational zeta;

  static MeasureConstants of(std::uint32_t q) { return {q, 0, sphere_mass(q), quotient_mass(q), zeta_minus1(q)}; }
};

/// N(I) * prod over distinct primes of (1 + 1/N(p)), as a rational.
inline Rational hecke_factor(const IdealSpec& I) {
  Rational r = Rational(ideal_norm(I));
  const BigInt q = I.field().q();
  for (const auto& p : I.primes()) {
    const BigInt np = ipow(q, static_cast<unsigned>(p.degree().value()));
    r *= Rational(np + 1, np);
  }
  return r;
}

inline BigInt hecke_index(const IdealSpec& I) {
  const Rational r = hecke_factor(I);
  if (denominator_of(r) != 1) throw std::logic_error("Hecke index not integral");
  return numerator_of(r);
}

/// Orbit count oracle: the number of lines in (R/I)^2 reachable from [1:0]
/// by elementary transvections, i.e. |orbit of the column (1,0)| / |(R/I)^x|.
inline BigInt hecke_index_bruteforce(const IdealSpec& I, std::uint64_t max_norm = 1024) {
  const auto& F = I.field();
  const Poly& m = I.gen();
  if (m.is_unit()) return 1;
  const int d = m.degree().value();
  const std::uint64_t N = poly_count(F, d - 1);
  if (N > max_norm) throw std::out_of_range("oracle range exceeded");

  std::vector<Poly> elems;
  elems.reserve(N);
  for (std::uint64_t r = 0; r < N; ++r) elems.push_back(Poly::from_rank(F, r));
  std::uint64_t units = 0;
  for (std::uint64_t r = 1; r < N; ++r)
    if (coprime(elems[r], m)) ++units;

  // Transvections by c*Y^i with c ranging over F_q^x and i < d generate
  // SL2(R/I), since R/I is a finite product of local rings.
  std::vector<Poly> steps;
  for (int i = 0; i < d; ++i)
    for (std::uint32_t c = 1; c < F.q(); ++c) steps.push_back(Poly::monomial(F, FieldElem{c}, static_cast<std::size_t>(i)));

  std::vector<char> seen(N * N, 0);
  std::deque<std::pair<std::uint64_t, std::uint64_t>> frontier;
  frontier.emplace_back(1, 0);
  seen[1 * N + 0] = 1;
  std::uint64_t orbit = 1;
  while (!frontier.empty()) {
    auto [u, v] = frontier.front();
    frontier.pop_front();
    for (const auto& s : steps) {
      const std::uint64_t nu = ((elems[u] + s * elems[v]) % m).rank();
      const std::uint64_t nv = ((elems[v] + s * elems[u]) % m).rank();
      for (auto [x, y] : {std::pair{nu, v}, std::pair{u, nv}}) {
        if (seen[x * N + y]) continue;
        seen[x * N + y] = 1;
        ++orbit;
        frontier.emplace_back(x, y);
      }
    }
  }
  if (orbit % units != 0) throw std::logic_error("orbit not a union of unit classes");
  return BigInt(orbit / units);
}

struct BoxSpec {
  Rational theta_mass;
  int n = 0;
  Rational dprime_mass;
};

/// Haar measure of P_Theta A_n U_D'.
inline Rational box_measure(std::uint32_t q, const BoxSpec& b) {
  const BigInt Q = q;
  return qpow(q, 2 * b.n + 2) / Rational(Q * Q - 1) * b.theta_mass * b.dprime_mass;
}

inline Rational c_I(const IdealSpec& I) {
  const std::uint32_t q = I.field().q();
  const BigInt Q = q;
  return Rational(Q * Q - 1) * zeta_minus1(q) * hecke_factor(I) / Rational(Q * Q);
}

/// Main term of the count of primitive v with ||v|| = q^n and z'_v in I.
inline Rational counting_main_term(const IdealSpec& I, int n) {
  const std::uint32_t q = I.field().q();
  return qpow(q, 2 * n - 1) / (zeta_minus1(q) * hecke_factor(I));
}

/// |SL2(F_q[t]/(t^N))|.
inline BigInt sl2_order_mod(std::uint32_t q, int N) {
  if (N < 1) throw std::invalid_argument("level must be >= 1");
  const BigInt Q = q;
  return ipow(Q, static_cast<unsigned>(3 * N - 2)) * (Q * Q - 1);
}

/// Determinant-one count over F_q[t]/(t^N) by enumeration of all q^{4N}
/// matrices.
inline BigInt sl2_order_mod_bruteforce(const GaloisField& F, int N, std::uint64_t max_ring = 27) {
  if (N < 1) throw std::invalid_argument("level must be >= 1");
  const std::uint64_t size = poly_count(F, N - 1);
  if (size > max_ring) throw std::out_of_range("oracle range exceeded");
  std::vector<Poly> elems;
  for (std::uint64_t r = 0; r < size; ++r) elems.push_back(Poly::from_rank(F, r));
  const std::size_t n = static_cast<std::size_t>(N);
  // products[i*size+j] = rank(e_i * e_j mod t^N)
  std::vector<std::uint64_t> prod(size * size);
  for (std::uint64_t i = 0; i < size; ++i)
    for (std::uint64_t j = 0; j < size; ++j) prod[i * size + j] = (elems[i] * elems[j]).truncated(n).rank();
  const std::uint64_t one = Poly::constant(F, F.one()).rank();
  std::uint64_t total = 0;
  for (std::uint64_t a = 0; a < size; ++a)
    for (std::uint64_t d = 0; d < size; ++d)
      for (std::uint64_t b = 0; b < size; ++b)
        for (std::uint64_t c = 0; c < size; ++c) {
          const Poly det = elems[prod[a * size + d]] - elems[prod[b * size + c]];
          if (det.rank() == one) ++total;
        }
  return BigInt(total);
}

/// Haar measure of the level-N congruence kernel with G(O) of mass 1.
inline Rational kernel_measure_by_index(std::uint32_t q, int N) { return Rational(BigInt(1), sl2_order_mod(q, N)); }

/// The same measure assembled through the LU product: the constant q/(q+1)
/// times the masses of pi^N O (twice) and of 1 + pi^N O inside O^x.
inline Rational kernel_measure_by_lu(std::uint32_t q, int N) {
  if (N < 1) throw std::invalid_argument("level must be >= 1");
  const BigInt Q = q;
  const Rational lu_constant(Q, Q + 1);
  const Rational unipotent = qpow(q, -N);
  const Rational torus = Rational(BigInt(1), (Q - 1) * ipow(Q, static_cast<unsigned>(N - 1)));
  return lu_constant * unipotent * torus * unipotent;
}

/// g = u_minus * m * a * u_plus.
struct RefinedLU {
  Mat2 u_minus;
  Mat2 m;
  Mat2 a;
  Mat2 u_plus;
  int omega_alpha = 0;

  Mat2 product() const { return u_minus * m * a * u_plus; }
  /// p_g = u_minus * m.
  Mat2 p() const { return u_minus * m; }
};

inline RefinedLU refined_lu(const Mat2& g) {
  if (g.alpha.is_zero()) throw std::domain_error("LU undefined");
  const auto& F = g.field();
  const int w = g.alpha.valuation().value();
  const RationalFn yw = y_power(F, w);
  const RationalFn ymw = y_power(F, -w);
  return {Mat2::lower(g.beta / g.alpha), Mat2::diag(g.alpha * yw, g.alpha.inverse() * ymw), Mat2::diag(ymw, yw),
          Mat2::upper(g.gamma / g.alpha), w};
}

}  // namespace fqlattice
