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
 * Primitive lattice points of F_q[Y]^2 by norm level, their gcd companions
 * w_v, the matrices gamma_v = (v | w_v), and the matrix-side description of
 * the same sets through the refined LU decomposition.
 *
 * Cells.  A sphere cell of depth m fixes the Laurent coefficients of indices
 * 0..m-1 of both components of a direction; a domain cell of depth m' fixes
 * indices 1..m'-1 of an element of Y^{-1}O.
 */

#include "haar_model.hpp"
#include "parallel.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace fqlattice {

enum class CellSpace { SPHERE, DOMAIN };

/// Ball of radius q^{-depth} in the unit sphere of the plane or in Y^{-1}O.
class Cylinder {
 public:
  static Cylinder sphere(LaurentWindow x, LaurentWindow y, int depth) {
    if (depth < 1) throw std::invalid_argument("cylinder depth must be >= 1");
    if (x.prec() < depth || y.prec() < depth) throw std::invalid_argument("cylinder center precision below depth");
    const Valuation lead = std::min(x.lead(), y.lead());
    if (!(lead == 0)) throw std::invalid_argument("sphere cylinder center must have norm 1");
    return Cylinder(CellSpace::SPHERE, std::move(x), std::move(y), depth);
  }
  static Cylinder domain(LaurentWindow c, int depth) {
    if (depth < 1) throw std::invalid_argument("cylinder depth must be >= 1");
    if (c.prec() < depth) throw std::invalid_argument("cylinder center precision below depth");
    if (c.lead() < 1) throw std::invalid_argument("domain cylinder center must lie in Y^-1 O");
    LaurentWindow dummy = c;
    return Cylinder(CellSpace::DOMAIN, std::move(c), std::move(dummy), depth);
  }

  CellSpace space() const { return space_; }
  int depth() const { return depth_; }
  const LaurentWindow& center_x() const { return x_; }
  const LaurentWindow& center_y() const {
    if (space_ != CellSpace::SPHERE) throw std::logic_error("domain cylinder has one center");
    return y_;
  }
  const LaurentWindow& center() const { return x_; }

  /// Haar mass with the sphere of total mass (q^2-1)/q^2 and K of unit
  /// mass on O.
  Rational mass() const {
    const std::uint32_t q = x_.field().q();
    return space_ == CellSpace::SPHERE ? qpow(q, -2 * depth_) : qpow(q, -depth_);
  }

  /// Coefficient agreement below depth; windows need prec >= depth.
  bool matches(const LaurentWindow& w) const { return agree(w, x_); }
  bool matches(const LaurentWindow& wx, const LaurentWindow& wy) const {
    if (space_ != CellSpace::SPHERE) throw std::logic_error("domain cylinder takes one window");
    return agree(wx, x_) && agree(wy, y_);
  }
  bool contains(const RationalFn& f) const {
    if (space_ != CellSpace::DOMAIN) throw std::logic_error("sphere cylinder takes a vector");
    return in_ball(f, x_, depth_);
  }
  /// Membership of a point of the sphere.
  bool contains(const PlaneVec& u) const {
    if (space_ != CellSpace::SPHERE) throw std::logic_error("domain cylinder takes a scalar");
    return in_ball(u.x, x_, depth_) && in_ball(u.y, y_, depth_);
  }

 private:
  Cylinder(CellSpace s, LaurentWindow x, LaurentWindow y, int depth)
      : space_(s), x_(std::move(x)), y_(std::move(y)), depth_(depth) {}

  bool agree(const LaurentWindow& w, const LaurentWindow& c) const {
    if (w.prec() < depth_) throw std::invalid_argument("window precision below cylinder depth");
    const int lo = std::min(w.start(), c.start());
    for (int i = lo; i < depth_; ++i)
      if (w.coeff(i) != c.coeff(i)) return false;
    return true;
  }

  CellSpace space_;
  LaurentWindow x_;
  LaurentWindow y_;
  int depth_;
};

/// The partition of the unit sphere into depth-m cells.
class SphereCells {
 public:
  SphereCells(const GaloisField& f, int m) : f_(&f), m_(m) {
    if (m < 1) throw std::invalid_argument("cell depth must be >= 1");
    qm_ = poly_count(f, m - 1);
    b_ = qm_ / f.q();
    if (qm_ > (1u << 15)) throw std::out_of_range("sphere cell grid too large");
  }

  int depth() const { return m_; }
  /// (q^2 - 1) q^{2(m-1)}
  std::uint64_t count() const { return qm_ * qm_ - b_ * b_; }

  /// Cell id from the Laurent digits of indices 0..m-1 (Y^0 first).
  std::optional<std::uint64_t> id_of_digits(std::span<const FieldElem> xd, std::span<const FieldElem> yd) const {
    const std::uint64_t X = pack(xd), Yk = pack(yd);
    if (X < b_ && Yk < b_) return std::nullopt;
    return X * qm_ + Yk - std::min(X, b_) * b_ - (X < b_ ? std::min(Yk, b_) : 0);
  }
  std::uint64_t id_of(const LaurentWindow& wx, const LaurentWindow& wy) const {
    auto id = id_of_digits(digits(wx), digits(wy));
    if (!id) throw std::invalid_argument("direction not on the unit sphere");
    return *id;
  }
  /// Direction cell of a lattice vector of norm exponent n, read directly
  /// off its coefficients.
  std::uint64_t id_of_lattice(const LatticeVec& v, int n) const {
    std::vector<FieldElem> xd(static_cast<std::size_t>(m_)), yd(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) {
      xd[static_cast<std::size_t>(i)] = n - i >= 0 ? v.a.coeff(static_cast<std::size_t>(n - i)) : f_->zero();
      yd[static_cast<std::size_t>(i)] = n - i >= 0 ? v.b.coeff(static_cast<std::size_t>(n - i)) : f_->zero();
    }
    auto id = id_of_digits(xd, yd);
    if (!id) throw std::invalid_argument("vector not of norm exponent n");
    return *id;
  }

  std::pair<std::vector<FieldElem>, std::vector<FieldElem>> digits_of(std::uint64_t id) const {
    if (id >= count()) throw std::out_of_range("sphere cell id");
    // Invert the packing: ids below b_*(qm_-b_) have X < b_.
    std::uint64_t X, Yk;
    const std::uint64_t low_block = b_ * (qm_ - b_);
    if (id < low_block) {
      X = id / (qm_ - b_);
      Yk = b_ + id % (qm_ - b_);
    } else {
      const std::uint64_t r = id - low_block;
      X = b_ + r / qm_;
      Yk = r % qm_;
    }
    return {unpack(X), unpack(Yk)};
  }
  bool is_sharp(std::uint64_t id) const { return !digits_of(id).first[0].is_zero(); }

  Cylinder cylinder(std::uint64_t id) const {
    auto [xd, yd] = digits_of(id);
    return Cylinder::sphere(window(xd), window(yd), m_);
  }

 private:
  std::vector<FieldElem> digits(const LaurentWindow& w) const {
    std::vector<FieldElem> d;
    for (int i = 0; i < m_; ++i) d.push_back(w.coeff(i));
    return d;
  }
  std::uint64_t pack(std::span<const FieldElem> d) const {
    std::uint64_t k = 0;
    for (auto c : d) k = k * f_->q() + c.code;
    return k;
  }
  std::vector<FieldElem> unpack(std::uint64_t k) const {
    std::vector<FieldElem> d(static_cast<std::size_t>(m_));
    for (int i = m_; i-- > 0;) {
      d[static_cast<std::size_t>(i)] = FieldElem{static_cast<std::uint32_t>(k % f_->q())};
      k /= f_->q();
    }
    return d;
  }
  LaurentWindow window(const std::vector<FieldElem>& d) const {
    std::vector<std::pair<int, FieldElem>> e;
    for (int i = 0; i < m_; ++i) e.emplace_back(i, d[static_cast<std::size_t>(i)]);
    return LaurentWindow::from_entries(*f_, e, m_);
  }

  const GaloisField* f_;
  int m_;
  std::uint64_t qm_ = 0;  // q^m
  std::uint64_t b_ = 0;   // q^{m-1}
};

/// The partition of Y^{-1}O into depth-m' cells.
class DomainCells {
 public:
  DomainCells(const GaloisField& f, int mp) : f_(&f), m_(mp) {
    if (mp < 1) throw std::invalid_argument("cell depth must be >= 1");
    count_ = poly_count(f, mp - 2);
    if (count_ > (1u << 20)) throw std::out_of_range("domain cell grid too large");
  }

  int depth() const { return m_; }
  std::uint64_t count() const { return count_; }

  std::uint64_t id_of(const LaurentWindow& w) const {
    if (w.lead() < 1) throw std::invalid_argument("element outside Y^-1 O");
    std::uint64_t k = 0;
    for (int i = 1; i < m_; ++i) k = k * f_->q() + w.coeff(i).code;
    return k;
  }
  std::uint64_t id_of(const RationalFn& f) const { return id_of(expand(f, m_)); }

  std::vector<FieldElem> digits_of(std::uint64_t id) const {
    if (id >= count_) throw std::out_of_range("domain cell id");
    std::vector<FieldElem> d(static_cast<std::size_t>(std::max(m_ - 1, 0)));
    for (std::size_t i = d.size(); i-- > 0;) {
      d[i] = FieldElem{static_cast<std::uint32_t>(id % f_->q())};
      id /= f_->q();
    }
    return d;
  }
  /// Cell containing -f for f in cell id.
  std::uint64_t negate(std::uint64_t id) const {
    auto d = digits_of(id);
    std::uint64_t k = 0;
    for (auto c : d) k = k * f_->q() + f_->neg(c).code;
    return k;
  }
  Cylinder cylinder(std::uint64_t id) const {
    auto d = digits_of(id);
    std::vector<std::pair<int, FieldElem>> e;
    for (std::size_t i = 0; i < d.size(); ++i) e.emplace_back(static_cast<int>(i) + 1, d[i]);
    return Cylinder::domain(LaurentWindow::from_entries(*f_, e, m_), m_);
  }

 private:
  const GaloisField* f_;
  int m_;
  std::uint64_t count_ = 0;
};

// ---------------------------------------------------------------------------
// Points and their companions.

inline bool is_primitive(const LatticeVec& v) { return coprime(v.a, v.b); }

/// |a| >= |b|
inline bool is_sharp(const LatticeVec& v) { return v.a.degree() >= v.b.degree(); }

/// Norm exponent of a nonzero lattice vector.
inline int norm_exponent(const LatticeVec& v) {
  const Degree d = std::max(v.a.degree(), v.b.degree());
  if (d.is_neg_inf()) throw std::invalid_argument("zero vector");
  return d.value();
}

/// For sharp primitive v = (a, b): the unique w with det(v | w) = 1 and
/// x_w / a in Y^{-1}O.
inline LatticeVec w_of(const LatticeVec& v) {
  if (v.a.is_zero()) throw std::invalid_argument("w_of requires a != 0");
  if (!is_sharp(v)) throw std::invalid_argument("w_of requires a sharp vector");
  if (!is_primitive(v)) throw std::invalid_argument("w_of requires a primitive vector");
  // Seed solution a*x0 + b*y0 = 1; then w0 = (-y0, x0) and every other
  // choice is w0 + lambda*v.
  const XgcdResult s = xgcd(v.a, v.b);
  auto [quo, rem] = divmod(-s.v, v.a);
  return {rem, s.u - quo * v.b};
}

/// For any primitive v the w with det(v | w) = 1 whose z-coordinate ratio is
/// reduced: x_w / a in Y^{-1}O when v is sharp, y_w / b in Y^{-1}O otherwise.
inline LatticeVec companion_of(const LatticeVec& v) {
  if (is_sharp(v)) return w_of(v);
  const LatticeVec t = w_of({v.b, v.a});
  return {-t.b, -t.a};
}

inline Mat2 gamma_of(const LatticeVec& v) { return Mat2::from_columns(v, w_of(v)); }

enum class Hemisphere { ANY, SHARP, NON_SHARP };
enum class SolutionStat {
  Z_RATIO,  // z_w / z_v mod R with w = companion_of(v)
  X_RATIO,  // x_w / x_v with w = w_of(v), sharp v only
};

/// z_w / z_v reduced mod R.
inline RationalFn z_ratio(const LatticeVec& v, const LatticeVec& w) {
  return reduce_mod_R(z_of(PlaneVec(w)) / z_of(PlaneVec(v)));
}

inline RationalFn solution_statistic(const LatticeVec& v, SolutionStat kind) {
  if (kind == SolutionStat::X_RATIO) {
    const LatticeVec w = w_of(v);
    return RationalFn(w.a, v.a);
  }
  return z_ratio(v, companion_of(v));
}

/// Sharp v for which z_w / z_v differs from x_w / x_v as elements of K.
inline bool is_z_exception(const LatticeVec& v, const LatticeVec& w) {
  if (!is_sharp(v)) return false;
  return z_of(PlaneVec(w)) / z_of(PlaneVec(v)) != RationalFn(w.a, v.a);
}

struct EnumFilter {
  int level = 0;
  std::optional<IdealSpec> ideal;
  Hemisphere hemisphere = Hemisphere::ANY;
  std::optional<Cylinder> direction_cell;
  std::optional<Cylinder> solution_cell;
  SolutionStat stat = SolutionStat::Z_RATIO;

  void validate() const {
    if (direction_cell && direction_cell->space() != CellSpace::SPHERE)
      throw std::invalid_argument("direction cell must be a sphere cylinder");
    if (solution_cell && solution_cell->space() != CellSpace::DOMAIN)
      throw std::invalid_argument("solution cell must be a domain cylinder");
    if (solution_cell && stat == SolutionStat::X_RATIO && hemisphere != Hemisphere::SHARP)
      throw std::invalid_argument("x_w/x_v statistic is defined on the sharp hemisphere only");
  }
  int precision() const {
    int p = 1;
    if (direction_cell) p = std::max(p, direction_cell->depth());
    if (solution_cell) p = std::max(p, solution_cell->depth());
    return p;
  }
};

/// Every clause of the filter except primitivity and the level itself.
inline bool filter_clauses_hold(const EnumFilter& flt, const LatticeVec& v) {
  const bool sharp = is_sharp(v);
  if (flt.hemisphere == Hemisphere::SHARP && !sharp) return false;
  if (flt.hemisphere == Hemisphere::NON_SHARP && sharp) return false;
  if (flt.ideal && !flt.ideal->contains(sharp ? v.b : v.a)) return false;
  const int prec = flt.precision();
  if (flt.direction_cell) {
    DirectionWindows d = direction(PlaneVec(v), prec);
    if (!flt.direction_cell->matches(d.x, d.y)) return false;
  }
  if (flt.solution_cell) {
    const RationalFn s = solution_statistic(v, flt.stat);
    if (!flt.solution_cell->matches(expand(s, prec))) return false;
  }
  return true;
}

/// Range of a-ranks scanned at level n under a hemisphere restriction.
inline Block a_rank_range(const GaloisField& F, int n, Hemisphere h) {
  const std::uint64_t top = poly_count(F, n);
  const std::uint64_t low = poly_count(F, n - 1);
  if (h == Hemisphere::SHARP) return {low, top};
  if (h == Hemisphere::NON_SHARP) return {0, low};
  return {0, top};
}

/// Visits, in lexicographic (a, b) order, every primitive v of norm q^n with
/// a-rank in [block.lo, block.hi) satisfying the filter.
template <class Visitor>
void enumerate_primitive(const GaloisField& F, const EnumFilter& flt, Block block, Visitor&& visit) {
  flt.validate();
  const int n = flt.level;
  if (n < 0) return;
  const std::uint64_t top = poly_count(F, n);
  const std::uint64_t low = poly_count(F, n - 1);
  const Block range = a_rank_range(F, n, flt.hemisphere);
  block.lo = std::max(block.lo, range.lo);
  block.hi = std::min(block.hi, range.hi);
  for (std::uint64_t ar = block.lo; ar < block.hi; ++ar) {
    const Poly a = Poly::from_rank(F, ar);
    const bool a_full = ar >= low;
    const std::uint64_t b0 = a_full ? 0 : low;
    for (std::uint64_t br = b0; br < top; ++br) {
      LatticeVec v{a, Poly::from_rank(F, br)};
      if (!is_primitive(v)) continue;
      if (!filter_clauses_hold(flt, v)) continue;
      visit(v);
    }
  }
}

template <class Visitor>
void enumerate_primitive(const GaloisField& F, const EnumFilter& flt, Visitor&& visit) {
  enumerate_primitive(F, flt, Block{0, poly_count(F, std::max(flt.level, 0))}, std::forward<Visitor>(visit));
}

inline std::vector<LatticeVec> enumerate_primitive(const GaloisField& F, const EnumFilter& flt) {
  std::vector<LatticeVec> out;
  enumerate_primitive(F, flt, [&](const LatticeVec& v) { out.push_back(v); });
  return out;
}

inline std::uint64_t count_primitive(const GaloisField& F, const EnumFilter& flt, unsigned workers = 1) {
  if (flt.level < 0) return 0;
  const auto blocks = make_blocks(poly_count(F, flt.level));
  return parallel_blocks<std::uint64_t>(
      blocks, workers, 0,
      [&](const Block& b) {
        std::uint64_t c = 0;
        enumerate_primitive(F, flt, b, [&](const LatticeVec&) { ++c; });
        return c;
      },
      [](std::uint64_t& acc, std::uint64_t part) { acc += part; });
}

// ---------------------------------------------------------------------------
// Matrix side.

/// What the box predicates need to know about a matrix, computed once from
/// its refined LU decomposition.
struct BoxData {
  bool lu_defined = false;
  bool a_is_level = false;  // a_g = diag(Y^n, Y^-n) for the recorded n
  int level = 0;            // -omega(alpha)
  bool p_integral = false;  // p_g has all entries in O
  std::optional<LaurentWindow> p_col_x, p_col_y, u_plus;
};

inline BoxData box_data(const Mat2& g, int prec) {
  BoxData d;
  if (g.alpha.is_zero()) return d;
  const RefinedLU lu = refined_lu(g);
  d.lu_defined = true;
  d.level = -lu.omega_alpha;
  const auto& F = g.field();
  d.a_is_level = lu.a == Mat2::diag(y_power(F, d.level), y_power(F, -d.level));
  const Mat2 p = lu.p();
  d.p_integral = p.in_unit_ball();
  d.p_col_x = expand(p.alpha, prec);
  d.p_col_y = expand(p.beta, prec);
  d.u_plus = expand(lu.u_plus.gamma, prec);
  return d;
}

/// g in P_Theta A_n U_D'.  A missing Theta means the whole sphere; a missing
/// D' means the whole fundamental domain Y^{-1}O.
inline bool box_member(const BoxData& d, int n, const Cylinder* theta, const Cylinder* dprime) {
  if (!d.lu_defined || !d.a_is_level || d.level != n || !d.p_integral) return false;
  if (theta && !theta->matches(*d.p_col_x, *d.p_col_y)) return false;
  if (!(d.u_plus->lead() >= 1)) return false;
  if (dprime && !dprime->matches(*d.u_plus)) return false;
  return true;
}

inline int box_precision(const Cylinder* theta, const Cylinder* dprime) {
  return std::max({1, theta ? theta->depth() : 1, dprime ? dprime->depth() : 1});
}

inline bool in_box(const Mat2& g, int n, const Cylinder* theta, const Cylinder* dprime) {
  return box_member(box_data(g, box_precision(theta, dprime)), n, theta, dprime);
}

/// Lower-left entry in I, for an integral unimodular matrix.
inline bool in_gamma0(const Mat2& g, const IdealSpec& I) {
  return g.is_integral() && g.is_unimodular() && I.contains(g.beta.num());
}

/// Every integral determinant-one matrix with entries alpha, beta, gamma of
/// degree <= n (alpha != 0).  This contains every matrix of Gamma lying in
/// P^- A_n U^+_D, since membership forces deg beta <= deg alpha = n and
/// deg gamma < n.
inline std::vector<Mat2> gamma_candidates(const GaloisField& F, int n) {
  std::vector<Mat2> out;
  if (n < 0) return out;
  const std::uint64_t top = poly_count(F, n);
  const Poly one = Poly::constant(F, F.one());
  std::vector<Poly> polys;
  for (std::uint64_t r = 0; r < top; ++r) polys.push_back(Poly::from_rank(F, r));
  for (std::uint64_t ar = 1; ar < top; ++ar) {
    const Poly& a = polys[ar];
    for (std::uint64_t br = 0; br < top; ++br) {
      const Poly& b = polys[br];
      if (!coprime(a, b)) continue;
      for (std::uint64_t gr = 0; gr < top; ++gr) {
        const Poly& c = polys[gr];
        auto [d, rem] = divmod(one + b * c, a);
        if (!rem.is_zero()) continue;
        out.push_back({RationalFn(a), RationalFn(c), RationalFn(b), RationalFn(d)});
      }
    }
  }
  return out;
}

/// Integral matrices with precomputed box data, reusable across cells.
struct CandidateSet {
  int n = 0;
  int prec = 1;
  std::vector<Mat2> mats;
  std::vector<BoxData> data;
};

inline CandidateSet build_candidates(const GaloisField& F, int n, int prec) {
  CandidateSet cs{n, prec, gamma_candidates(F, n), {}};
  cs.data.reserve(cs.mats.size());
  for (const auto& g : cs.mats) cs.data.push_back(box_data(g, prec));
  return cs;
}

/// Gamma_0[I] matrices in P_Theta A_n U_D', sorted.
inline std::vector<Mat2> matrix_side_enumerate(const CandidateSet& cs, const Cylinder* theta, const Cylinder* dprime,
                                               const IdealSpec& I) {
  std::vector<Mat2> out;
  for (std::size_t i = 0; i < cs.mats.size(); ++i) {
    if (!box_member(cs.data[i], cs.n, theta, dprime)) continue;
    if (!in_gamma0(cs.mats[i], I)) continue;
    out.push_back(cs.mats[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Mat2> matrix_side_enumerate(const GaloisField& F, int n, const Cylinder* theta,
                                               const Cylinder* dprime, const IdealSpec& I) {
  return matrix_side_enumerate(build_candidates(F, n, box_precision(theta, dprime)), theta, dprime, I);
}

// ---------------------------------------------------------------------------
// Bijection check.

/// Optional corruption of w before gamma_v is formed (negative controls).
using WHook = std::function<LatticeVec(const LatticeVec& v, const LatticeVec& w)>;

struct BijectionReport {
  bool ok = false;
  std::uint64_t lattice_count = 0;
  std::uint64_t matrix_count = 0;
  bool injective = false;
  bool surjective = false;  // image equals the matrix side
  bool equivalence = false; // (1) <=> (2) elementwise on neighbouring levels
  std::uint64_t equivalence_checked = 0;
  std::uint64_t equivalence_failures = 0;
  std::string detail;
};

/// Lattice points at one level with everything the two predicates need.
struct LevelPoint {
  LatticeVec v;
  Mat2 gamma;
  BoxData box;
  LaurentWindow dir_x, dir_y, x_ratio;
};

/// Shared state for many bijection checks at a fixed (q, n).
class BijectionContext {
 public:
  BijectionContext(const GaloisField& F, int n, int prec, WHook hook = {})
      : F_(&F), n_(n), prec_(prec), hook_(std::move(hook)), cands_(build_candidates(F, n, prec)) {
    for (int lv = std::max(0, n - 1); lv <= n + 1; ++lv) levels_[lv] = collect(lv);
  }

  int level() const { return n_; }
  const CandidateSet& candidates() const { return cands_; }

  BijectionReport verify(const Cylinder* theta, const Cylinder* dprime, const IdealSpec& I) const {
    if (box_precision(theta, dprime) > prec_) throw std::invalid_argument("cell depth exceeds context precision");
    BijectionReport r;
    std::vector<Mat2> image;
    for (const auto& pt : levels_.at(n_))
      if (lattice_side(pt, n_, theta, dprime, I)) image.push_back(pt.gamma);
    r.lattice_count = image.size();
    std::sort(image.begin(), image.end());
    r.injective = std::adjacent_find(image.begin(), image.end()) == image.end();
    const std::vector<Mat2> mats = matrix_side_enumerate(cands_, theta, dprime, I);
    r.matrix_count = mats.size();
    r.surjective = image == mats;
    if (!r.surjective) {
      std::vector<Mat2> missing;
      std::set_difference(mats.begin(), mats.end(), image.begin(), image.end(), std::back_inserter(missing));
      if (!missing.empty()) r.detail = "matrix not in image: " + to_string(missing.front());
      else r.detail = "image matrix outside the box";
    }
    for (const auto& [lv, pts] : levels_) {
      for (const auto& pt : pts) {
        ++r.equivalence_checked;
        const bool lhs = lattice_side(pt, n_, theta, dprime, I);
        const bool rhs = box_member(pt.box, n_, theta, dprime) && in_gamma0(pt.gamma, I);
        if (lhs != rhs) {
          ++r.equivalence_failures;
          if (r.detail.empty()) r.detail = "predicates disagree at v=(" + to_pretty(pt.v.a) + ", " + to_pretty(pt.v.b) + ")";
        }
      }
    }
    r.equivalence = r.equivalence_failures == 0;
    r.ok = r.injective && r.surjective && r.equivalence;
    return r;
  }

 private:
  static bool lattice_side(const LevelPoint& pt, int n, const Cylinder* theta, const Cylinder* dprime,
                           const IdealSpec& I) {
    if (norm_exponent(pt.v) != n) return false;
    if (!I.contains(pt.v.b)) return false;
    if (theta && !theta->matches(pt.dir_x, pt.dir_y)) return false;
    if (dprime && !dprime->matches(pt.x_ratio)) return false;
    return true;
  }

  std::vector<LevelPoint> collect(int lv) const {
    std::vector<LevelPoint> out;
    EnumFilter flt;
    flt.level = lv;
    flt.hemisphere = Hemisphere::SHARP;
    enumerate_primitive(*F_, flt, [&](const LatticeVec& v) {
      LatticeVec w = w_of(v);
      if (hook_) w = hook_(v, w);
      const Mat2 g = Mat2::from_columns(v, w);
      DirectionWindows d = direction(PlaneVec(v), prec_);
      out.push_back({v, g, box_data(g, prec_), d.x, d.y, expand(RationalFn(w.a, v.a), prec_)});
    });
    return out;
  }

  const GaloisField* F_;
  int n_;
  int prec_;
  WHook hook_;
  CandidateSet cands_;
  std::map<int, std::vector<LevelPoint>> levels_;
};

inline BijectionReport verify_bijection(const GaloisField& F, int n, const Cylinder* theta, const Cylinder* dprime,
                                        const IdealSpec& I, WHook hook = {}) {
  BijectionContext ctx(F, n, box_precision(theta, dprime), std::move(hook));
  return ctx.verify(theta, dprime, I);
}

// ---------------------------------------------------------------------------
// Stability of boxes under congruence kernels.

/// Elements I + pi^N X of SL2(O), pi = Y^-1, with the free entries A, B, C
/// ranging over polynomials in pi of degree < extra_levels:
///   [ 1 + pi^N A          pi^N C                       ]
///   [ pi^N B              (1 + pi^{2N} B C)/(1 + pi^N A) ]
inline std::vector<Mat2> kernel_representatives(const GaloisField& F, int N, int extra_levels = 1) {
  if (N < 1 || extra_levels < 1) throw std::invalid_argument("kernel level and extra levels must be >= 1");
  const std::uint64_t per = poly_count(F, extra_levels - 1);
  std::vector<RationalFn> series;  // polynomials in pi of degree < extra_levels
  for (std::uint64_t r = 0; r < per; ++r) {
    const Poly p = Poly::from_rank(F, r);
    RationalFn s(F);
    for (std::size_t j = 0; j < p.coeffs().size(); ++j)
      s += RationalFn(Poly::constant(F, p.coeffs()[j])) * y_power(F, -static_cast<int>(j));
    series.push_back(s);
  }
  const RationalFn one(Poly::constant(F, F.one()));
  const RationalFn piN = y_power(F, -N);
  std::vector<Mat2> out;
  for (const auto& A : series)
    for (const auto& B : series)
      for (const auto& C : series) {
        const RationalFn k11 = one + piN * A;
        out.push_back({k11, piN * C, piN * B, (one + piN * piN * B * C) / k11});
      }
  return out;
}

struct StabilityReport {
  std::uint64_t members = 0;
  std::uint64_t non_members = 0;
  std::uint64_t perturbations = 0;
  std::uint64_t flips = 0;
  std::string first_flip;
};

/// Perturbs every candidate matrix of level n on the left, on the right and
/// (for members) on both sides by every kernel representative and counts
/// changes of box membership.
inline StabilityReport check_box_stability(const CandidateSet& cs, const Cylinder* theta, const Cylinder* dprime,
                                           const std::vector<Mat2>& kernel, bool two_sided = true) {
  StabilityReport r;
  const int prec = box_precision(theta, dprime);
  auto flip = [&](const Mat2& g, bool before, const char* how) {
    const bool after = in_box(g, cs.n, theta, dprime);
    ++r.perturbations;
    if (after == before) return;
    ++r.flips;
    if (r.first_flip.empty()) r.first_flip = std::string(how) + " perturbation moved " + to_string(g);
  };
  for (std::size_t i = 0; i < cs.mats.size(); ++i) {
    const Mat2& g = cs.mats[i];
    const bool member = box_member(prec <= cs.prec ? cs.data[i] : box_data(g, prec), cs.n, theta, dprime);
    member ? ++r.members : ++r.non_members;
    for (const auto& k : kernel) {
      flip(k * g, member, "left");
      flip(g * k, member, "right");
    }
    if (two_sided && member)
      for (const auto& k1 : kernel)
        for (const auto& k2 : kernel) flip(k1 * g * k2, member, "two-sided");
  }
  return r;
}

}  // namespace fqlattice
