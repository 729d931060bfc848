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

#include "fqlattice/lattice_enum.hpp"

#include "catch_amalgamated.hpp"

#include <set>

using namespace fqlattice;

namespace {

Poly P(const GaloisField& F, const char* s) { return parse_poly(F, s); }

// Primitive pairs of norm exponent n by a plain double loop over every pair
// of polynomials of degree <= n.
std::vector<LatticeVec> brute_primitive(const GaloisField& F, int n) {
  std::vector<LatticeVec> out;
  const std::uint64_t top = poly_count(F, n);
  for (std::uint64_t i = 0; i < top; ++i)
    for (std::uint64_t j = 0; j < top; ++j) {
      const Poly a = Poly::from_rank(F, i), b = Poly::from_rank(F, j);
      if (a.is_zero() && b.is_zero()) continue;
      if (std::max(a.degree(), b.degree()) != Degree(n)) continue;
      if (gcd(a, b) != Poly::constant(F, F.one())) continue;
      out.push_back({a, b});
    }
  std::sort(out.begin(), out.end());
  return out;
}

EnumFilter level(int n, Hemisphere h = Hemisphere::ANY) {
  EnumFilter f;
  f.level = n;
  f.hemisphere = h;
  return f;
}

}  // namespace

TEST_CASE("primitivity", "[enum]") {
  const auto& F = GaloisField::get(2);
  CHECK(is_primitive({P(F, "Y"), P(F, "Y+1")}));
  CHECK(is_primitive({P(F, "1"), Poly(F)}));
  CHECK_FALSE(is_primitive({P(F, "Y"), P(F, "Y^2")}));
  CHECK_FALSE(is_primitive({Poly(F), P(F, "Y")}));
  CHECK_FALSE(is_primitive({Poly(F), Poly(F)}));
  const auto& F3 = GaloisField::get(3);
  CHECK(is_primitive({P(F3, "2"), P(F3, "Y^2")}));
  CHECK_FALSE(is_primitive({P(F3, "Y+1"), P(F3, "Y^2+2Y+1")}));
}

TEST_CASE("enumeration counts", "[enum]") {
  const auto& F = GaloisField::get(2);
  const auto v0 = enumerate_primitive(F, level(0));
  CHECK(v0.size() == 3);
  CHECK(enumerate_primitive(F, level(1)).size() == 6);
  CHECK(count_primitive(GaloisField::get(3), level(1)) == 48);
  CHECK(enumerate_primitive(F, level(-1)).empty());
  CHECK(std::is_sorted(v0.begin(), v0.end()));
}

TEST_CASE("enumeration agrees with a double loop", "[enum]") {
  for (std::uint32_t q : {2u, 3u, 4u}) {
    const auto& F = GaloisField::get(q);
    for (int n = 0; n <= (q == 2 ? 4 : 2); ++n) {
      auto got = enumerate_primitive(F, level(n));
      std::sort(got.begin(), got.end());
      CAPTURE(q, n);
      CHECK(got == brute_primitive(F, n));
    }
  }
}

TEST_CASE("hemispheres partition each level", "[enum]") {
  for (std::uint32_t q : {2u, 3u}) {
    const auto& F = GaloisField::get(q);
    for (int n = 0; n <= 3; ++n) {
      const auto all = enumerate_primitive(F, level(n));
      const auto sh = enumerate_primitive(F, level(n, Hemisphere::SHARP));
      const auto ns = enumerate_primitive(F, level(n, Hemisphere::NON_SHARP));
      CHECK(sh.size() + ns.size() == all.size());
      for (const auto& v : sh) REQUIRE(is_sharp(v));
      for (const auto& v : ns) REQUIRE_FALSE(is_sharp(v));
      // Swapping coordinates maps the non-sharp half into the sharp half.
      std::set<LatticeVec> shs(sh.begin(), sh.end());
      for (const auto& v : ns) REQUIRE(shs.count(LatticeVec{v.b, v.a}) == 1);
    }
  }
}

TEST_CASE("levels are closed under perp", "[enum]") {
  for (std::uint32_t q : {2u, 3u}) {
    const auto& F = GaloisField::get(q);
    for (int n = 0; n <= 2; ++n) {
      auto vs = enumerate_primitive(F, level(n));
      std::vector<LatticeVec> ps;
      for (const auto& v : vs) {
        const LatticeVec p{v.b, -v.a};
        REQUIRE(is_primitive(p));
        REQUIRE(norm_exponent(p) == norm_exponent(v));
        ps.push_back(p);
      }
      std::sort(vs.begin(), vs.end());
      std::sort(ps.begin(), ps.end());
      CHECK(ps == vs);
    }
  }
}

TEST_CASE("w_of examples", "[enum]") {
  const auto& F = GaloisField::get(2);
  CHECK(w_of({P(F, "1"), Poly(F)}) == LatticeVec{Poly(F), P(F, "1")});
  CHECK(w_of({P(F, "Y"), P(F, "1")}) == LatticeVec{P(F, "1"), Poly(F)});
  CHECK_THROWS(w_of({P(F, "1"), P(F, "Y")}));
  CHECK_THROWS(w_of({P(F, "Y"), P(F, "Y")}));
  CHECK_THROWS(w_of({Poly(F), P(F, "1")}));
}

TEST_CASE("w_of is the unique normalized solution", "[enum]") {
  // Scan every x_w of degree < deg a and solve for y_w.
  for (std::uint32_t q : {2u, 3u}) {
    const auto& F = GaloisField::get(q);
    const Poly one = Poly::constant(F, F.one());
    for (int n = 0; n <= (q == 2 ? 3 : 2); ++n) {
      for (const auto& v : enumerate_primitive(F, level(n, Hemisphere::SHARP))) {
        const int da = v.a.degree().value();
        std::vector<LatticeVec> sols;
        const std::uint64_t top = da == 0 ? 1 : poly_count(F, da - 1);
        for (std::uint64_t r = 0; r < top; ++r) {
          const Poly x = Poly::from_rank(F, r);
          auto [y, rem] = divmod(one + v.b * x, v.a);
          if (rem.is_zero()) sols.push_back({x, y});
        }
        REQUIRE(sols.size() == 1);
        REQUIRE(sols.front() == w_of(v));
        REQUIRE(gamma_of(v).is_unimodular());
        REQUIRE(gamma_of(v).is_integral());
      }
    }
  }
}

TEST_CASE("companion covers both hemispheres", "[enum]") {
  for (std::uint32_t q : {2u, 3u}) {
    const auto& F = GaloisField::get(q);
    for (int n = 0; n <= 2; ++n)
      for (const auto& v : enumerate_primitive(F, level(n))) {
        const LatticeVec w = companion_of(v);
        REQUIRE(v.a * w.b - v.b * w.a == Poly::constant(F, F.one()));
        if (is_sharp(v)) {
          REQUIRE(RationalFn(w.a, v.a).is_zero() | (RationalFn(w.a, v.a).valuation() >= 1));
        } else {
          REQUIRE(RationalFn(w.b, v.b).is_zero() | (RationalFn(w.b, v.b).valuation() >= 1));
        }
      }
  }
}

TEST_CASE("z ratio does not depend on the choice of w", "[enum]") {
  for (std::uint32_t q : {2u, 3u}) {
    const auto& F = GaloisField::get(q);
    for (int n = 1; n <= 2; ++n)
      for (const auto& v : enumerate_primitive(F, level(n))) {
        const LatticeVec w = companion_of(v);
        const RationalFn base = z_ratio(v, w);
        for (std::uint64_t r = 0; r < poly_count(F, 2); ++r) {
          const Poly t = Poly::from_rank(F, r);
          REQUIRE(z_ratio(v, {w.a + t * v.a, w.b + t * v.b}) == base);
        }
      }
  }
}

TEST_CASE("z ratio equals x ratio on the sharp half", "[enum]") {
  for (std::uint32_t q : {2u, 3u}) {
    const auto& F = GaloisField::get(q);
    std::uint64_t exceptions = 0;
    for (int n = 1; n <= (q == 2 ? 4 : 3); ++n)
      for (const auto& v : enumerate_primitive(F, level(n, Hemisphere::SHARP))) {
        const LatticeVec w = w_of(v);
        if (is_z_exception(v, w)) ++exceptions;
        REQUIRE(solution_statistic(v, SolutionStat::Z_RATIO) == solution_statistic(v, SolutionStat::X_RATIO));
      }
    CHECK(exceptions == 0);
  }
  // At n = 0 both coordinates of w may be units, and z picks the wrong one.
  const auto& F = GaloisField::get(2);
  const LatticeVec v{P(F, "1"), P(F, "1")};
  const LatticeVec w = w_of(v);
  CHECK(w == LatticeVec{Poly(F), P(F, "1")});
  CHECK(is_z_exception(v, w));
}

TEST_CASE("sphere cells", "[cells]") {
  for (std::uint32_t q : {2u, 3u}) {
    const auto& F = GaloisField::get(q);
    for (int m = 1; m <= 3; ++m) {
      const SphereCells sc(F, m);
      CHECK(sc.count() == (q * q - 1) * static_cast<std::uint64_t>(std::pow(q, 2 * (m - 1))));
      Rational total = 0;
      for (std::uint64_t id = 0; id < sc.count(); ++id) {
        const Cylinder c = sc.cylinder(id);
        REQUIRE(sc.id_of(c.center_x(), c.center_y()) == id);
        total += c.mass();
      }
      CHECK(total * qpow(q, 2) == BigInt(q) * q - 1);
    }
  }
  const auto& F = GaloisField::get(2);
  CHECK_THROWS(SphereCells(F, 0));
  CHECK_THROWS(Cylinder::sphere(parse_window(F, "1:1", 2), parse_window(F, "1:1", 2), 2));
  CHECK_THROWS(Cylinder::domain(parse_window(F, "0:1", 2), 2));
  CHECK_THROWS(Cylinder::sphere(parse_window(F, "0:1", 1), parse_window(F, "", 1), 2));
}

TEST_CASE("domain cells", "[cells]") {
  for (std::uint32_t q : {2u, 3u}) {
    const auto& F = GaloisField::get(q);
    for (int mp = 1; mp <= 4; ++mp) {
      const DomainCells dc(F, mp);
      CHECK(dc.count() == static_cast<std::uint64_t>(std::pow(q, mp - 1)));
      for (std::uint64_t id = 0; id < dc.count(); ++id) {
        const Cylinder c = dc.cylinder(id);
        REQUIRE(dc.id_of(c.center()) == id);
        REQUIRE(dc.negate(dc.negate(id)) == id);
        REQUIRE(dc.id_of(-c.center().resum()) == dc.negate(id));
      }
    }
  }
  CHECK_THROWS(DomainCells(GaloisField::get(2), 1).id_of(RationalFn(P(GaloisField::get(2), "1"))));
}

TEST_CASE("direction cells partition a level", "[cells]") {
  const auto& F = GaloisField::get(2);
  for (int m = 1; m <= 2; ++m) {
    const SphereCells sc(F, m);
    std::uint64_t total = 0;
    EnumFilter flt = level(3);
    for (std::uint64_t id = 0; id < sc.count(); ++id) {
      flt.direction_cell = sc.cylinder(id);
      const std::uint64_t c = count_primitive(F, flt);
      total += c;
      for (const auto& v : enumerate_primitive(F, flt)) REQUIRE(sc.id_of_lattice(v, 3) == id);
    }
    CHECK(total == count_primitive(F, level(3)));
  }
}

TEST_CASE("joint cells at q=2, n=2", "[cells]") {
  const auto& F = GaloisField::get(2);
  const SphereCells sc(F, 1);
  const DomainCells dc(F, 2);
  CHECK(sc.count() * dc.count() == 6);
  std::uint64_t total = 0;
  EnumFilter flt = level(2);
  for (std::uint64_t s = 0; s < sc.count(); ++s)
    for (std::uint64_t d = 0; d < dc.count(); ++d) {
      flt.direction_cell = sc.cylinder(s);
      flt.solution_cell = dc.cylinder(d);
      total += count_primitive(F, flt);
    }
  CHECK(total == 24);
}

TEST_CASE("ideal filter", "[enum]") {
  const auto& F = GaloisField::get(2);
  EnumFilter flt = level(1, Hemisphere::SHARP);
  flt.ideal = IdealSpec(P(F, "Y"));
  // Sharp, norm 2, b divisible by Y: (Y, 0) is not primitive, so only
  // (Y, Y)... which is not primitive either; the survivor is (Y+1, Y).
  const auto vs = enumerate_primitive(F, flt);
  CHECK(vs == std::vector<LatticeVec>{{P(F, "Y+1"), P(F, "Y")}});
}

TEST_CASE("counts do not depend on the worker count", "[enum]") {
  const auto& F = GaloisField::get(3);
  EnumFilter flt = level(3, Hemisphere::SHARP);
  flt.direction_cell = SphereCells(F, 1).cylinder(2);
  const std::uint64_t one = count_primitive(F, flt, 1);
  CHECK(one > 0);
  CHECK(count_primitive(F, flt, 2) == one);
  CHECK(count_primitive(F, flt, 4) == one);
}

TEST_CASE("matrix side cardinalities", "[box]") {
  const auto& F = GaloisField::get(2);
  const IdealSpec unit = IdealSpec::unit(F);
  CHECK(matrix_side_enumerate(F, 1, nullptr, nullptr, unit).size() == 4);
  // Full sharp set at depth 1 equals the whole box.
  const SphereCells sc(F, 1);
  std::size_t sharp_total = 0;
  for (std::uint64_t id = 0; id < sc.count(); ++id) {
    const Cylinder c = sc.cylinder(id);
    const std::size_t k = matrix_side_enumerate(F, 1, &c, nullptr, unit).size();
    if (!sc.is_sharp(id)) CHECK(k == 0);
    sharp_total += k;
  }
  CHECK(sharp_total == 4);
  for (const auto& g : matrix_side_enumerate(F, 2, nullptr, nullptr, unit)) {
    REQUIRE(g.is_unimodular());
    REQUIRE(in_box(g, 2, nullptr, nullptr));
    REQUIRE_FALSE(in_box(g, 1, nullptr, nullptr));
  }
}

TEST_CASE("bijection with the matrix side", "[box]") {
  for (std::uint32_t q : {2u, 3u}) {
    const auto& F = GaloisField::get(q);
    const SphereCells sc(F, 1);
    const DomainCells dc(F, 2);
    for (const char* g : {"1", "Y"}) {
      const IdealSpec I(P(F, g));
      for (int n = 0; n <= 2; ++n) {
        BijectionContext ctx(F, n, 2);
        for (std::uint64_t s = 0; s < sc.count(); ++s) {
          if (!sc.is_sharp(s)) continue;
          const Cylinder th = sc.cylinder(s);
          for (std::uint64_t d = 0; d < dc.count(); ++d) {
            const Cylinder dp = dc.cylinder(d);
            const BijectionReport r = ctx.verify(&th, &dp, I);
            CAPTURE(q, g, n, s, d, r.detail);
            REQUIRE(r.ok);
            REQUIRE(r.lattice_count == r.matrix_count);
          }
        }
        const BijectionReport full = ctx.verify(nullptr, nullptr, I);
        CAPTURE(q, g, n, full.detail);
        CHECK(full.ok);
      }
    }
  }
}

TEST_CASE("bijection negative controls", "[box]") {
  const auto& F = GaloisField::get(2);
  const IdealSpec unit = IdealSpec::unit(F);
  // w + v: still determinant one, but x_w / a leaves Y^{-1}O.
  const BijectionReport shifted = verify_bijection(
      F, 2, nullptr, nullptr, unit, [](const LatticeVec& v, const LatticeVec& w) {
        return LatticeVec{w.a + v.a, w.b + v.b};
      });
  CHECK_FALSE(shifted.ok);
  // w + v_perp breaks the determinant.
  const BijectionReport tilted = verify_bijection(
      F, 2, nullptr, nullptr, unit, [](const LatticeVec& v, const LatticeVec& w) {
        return LatticeVec{w.a + v.b, w.b - v.a};
      });
  CHECK_FALSE(tilted.ok);
  CHECK(verify_bijection(F, 2, nullptr, nullptr, unit).ok);
  const BijectionReport zero = verify_bijection(F, 0, nullptr, nullptr, unit);
  CHECK(zero.ok);
  CHECK(zero.lattice_count == 2);
}

TEST_CASE("box stability under the congruence kernel", "[box]") {
  const auto& F = GaloisField::get(2);
  const SphereCells sc(F, 1);
  const DomainCells dc(F, 2);
  const auto k3 = kernel_representatives(F, 3);
  const auto k1 = kernel_representatives(F, 1);
  CHECK(k3.size() == 8);
  for (const auto& k : k3) {
    REQUIRE(k.is_unimodular());
    REQUIRE(k.in_unit_ball());
  }
  std::uint64_t coarse_flips = 0, members = 0;
  for (int n = 1; n <= 2; ++n) {
    const CandidateSet cs = build_candidates(F, n, 2);
    for (std::uint64_t s = 0; s < sc.count(); ++s) {
      if (!sc.is_sharp(s)) continue;
      const Cylinder th = sc.cylinder(s);
      for (std::uint64_t d = 0; d < dc.count(); ++d) {
        const Cylinder dp = dc.cylinder(d);
        const StabilityReport r = check_box_stability(cs, &th, &dp, k3, false);
        CAPTURE(n, s, d, r.first_flip);
        REQUIRE(r.flips == 0);
        members += r.members;
        coarse_flips += check_box_stability(cs, &th, &dp, k1, false).flips;
      }
    }
  }
  CHECK(members > 0);
  // A kernel no finer than the cells moves matrices across cell walls.
  CHECK(coarse_flips > 0);
  CHECK_THROWS(kernel_representatives(F, 0));
}
