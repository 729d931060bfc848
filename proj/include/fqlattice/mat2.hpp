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

#include "laurent_plane.hpp"

#include <compare>
#include <string>

namespace fqlattice {

/// 2x2 matrix over K laid out as
///   [ alpha  gamma ]
///   [ beta   delta ]
/// so the first column is (alpha, beta).
struct Mat2 {
  RationalFn alpha, gamma, beta, delta;

  static Mat2 identity(const GaloisField& f) {
    const RationalFn one(Poly::constant(f, f.one()));
    return {one, RationalFn(f), RationalFn(f), one};
  }
  static Mat2 from_columns(const LatticeVec& v, const LatticeVec& w) {
    return {RationalFn(v.a), RationalFn(w.a), RationalFn(v.b), RationalFn(w.b)};
  }
  static Mat2 diag(const RationalFn& d1, const RationalFn& d2) {
    return {d1, RationalFn(d1.field()), RationalFn(d1.field()), d2};
  }
  static Mat2 upper(const RationalFn& u) {
    const RationalFn one(Poly::constant(u.field(), u.field().one()));
    return {one, u, RationalFn(u.field()), one};
  }
  static Mat2 lower(const RationalFn& l) {
    const RationalFn one(Poly::constant(l.field(), l.field().one()));
    return {one, RationalFn(l.field()), l, one};
  }

  const GaloisField& field() const { return alpha.field(); }
  RationalFn det() const { return alpha * delta - gamma * beta; }
  bool is_unimodular() const { return det() == RationalFn(Poly::constant(field(), field().one())); }
  bool is_integral() const { return alpha.is_poly() && beta.is_poly() && gamma.is_poly() && delta.is_poly(); }
  /// All entries in the valuation ring O.
  bool in_unit_ball() const {
    return alpha.valuation() >= 0 && beta.valuation() >= 0 && gamma.valuation() >= 0 && delta.valuation() >= 0;
  }

  /// Inverse of a determinant-one matrix.
  Mat2 inverse_sl2() const { return {delta, -gamma, -beta, alpha}; }

  friend Mat2 operator*(const Mat2& l, const Mat2& r) {
    return {l.alpha * r.alpha + l.gamma * r.beta, l.alpha * r.gamma + l.gamma * r.delta,
            l.beta * r.alpha + l.delta * r.beta, l.beta * r.gamma + l.delta * r.delta};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
  friend std::strong_ordering operator<=>(const Mat2& a, const Mat2& b) {
    if (auto c = a.alpha <=> b.alpha; c != 0) return c;
    if (auto c = a.beta <=> b.beta; c != 0) return c;
    if (auto c = a.gamma <=> b.gamma; c != 0) return c;
    return a.delta <=> b.delta;
  }
};

inline std::string to_string(const Mat2& g) {
  return "[[" + to_pretty(g.alpha) + ", " + to_pretty(g.gamma) + "], [" + to_pretty(g.beta) + ", " +
         to_pretty(g.delta) + "]]";
}

}  // namespace fqlattice
