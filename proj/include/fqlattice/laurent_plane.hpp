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
 * The completion F_q((Y^-1)) seen through exact rational representatives.
 *
 * Index convention for Laurent coefficients: index n holds the coefficient
 * of Y^{-n}, so the valuation of a nonzero element is the smallest index
 * with a nonzero coefficient and Y^{-1}O is "all indices >= 1".
 */

#include "ff_poly.hpp"

#include <compare>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fqlattice {

/// Valuation at infinity; zero has valuation +INF.
class Valuation {
 public:
  static constexpr Valuation inf() { return Valuation(); }
  constexpr explicit Valuation(int v) : v_(v) {}

  constexpr bool is_inf() const { return !v_.has_value(); }
  int value() const {
    if (!v_) throw std::logic_error("valuation of zero is +INF");
    return *v_;
  }

  friend constexpr bool operator==(const Valuation&, const Valuation&) = default;
  friend constexpr std::strong_ordering operator<=>(const Valuation& a, const Valuation& b) {
    if (!a.v_ || !b.v_) return b.v_.has_value() <=> a.v_.has_value();
    return *a.v_ <=> *b.v_;
  }
  friend constexpr bool operator==(const Valuation& a, int b) { return a.v_ && *a.v_ == b; }
  friend constexpr std::strong_ordering operator<=>(const Valuation& a, int b) {
    if (!a.v_) return std::strong_ordering::greater;
    return *a.v_ <=> b;
  }

  std::string str() const { return v_ ? std::to_string(*v_) : std::string("+INF"); }

 private:
  constexpr Valuation() = default;
  std::optional<int> v_;
};

/// |f| = q^exponent, or zero.
struct AbsVal {
  bool zero = true;
  int exponent = 0;

  friend constexpr bool operator==(const AbsVal&, const AbsVal&) = default;
  friend constexpr std::strong_ordering operator<=>(const AbsVal& a, const AbsVal& b) {
    if (a.zero || b.zero) return b.zero <=> a.zero;
    return a.exponent <=> b.exponent;
  }
};

/// Reduced fraction num/den with monic den.
class RationalFn {
 public:
  explicit RationalFn(const GaloisField& f) : num_(f), den_(Poly::constant(f, f.one())) {}
  RationalFn(const Poly& p) : num_(p), den_(Poly::constant(p.field(), p.field().one())) {}  // NOLINT
  RationalFn(const Poly& num, const Poly& den) : num_(num), den_(den) {
    num.check_field(den);
    if (den.is_zero()) throw std::domain_error("zero denominator");
    normalize();
  }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  const GaloisField& field() const { return num_.field(); }

  bool is_zero() const { return num_.is_zero(); }
  bool is_poly() const { return den_.is_unit(); }

  Valuation valuation() const {
    if (num_.is_zero()) return Valuation::inf();
    return Valuation(den_.degree().value() - num_.degree().value());
  }
  AbsVal abs_val() const {
    if (num_.is_zero()) return {};
    return {false, num_.degree().value() - den_.degree().value()};
  }

  RationalFn inverse() const {
    if (is_zero()) throw std::domain_error("zero divisor");
    return RationalFn(den_, num_);
  }

  friend RationalFn operator+(const RationalFn& a, const RationalFn& b) {
    return RationalFn(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RationalFn operator-(const RationalFn& a, const RationalFn& b) {
    return RationalFn(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RationalFn operator-(const RationalFn& a) {
    RationalFn r = a;
    r.num_ = -r.num_;
    return r;
  }
  friend RationalFn operator*(const RationalFn& a, const RationalFn& b) {
    return RationalFn(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RationalFn operator/(const RationalFn& a, const RationalFn& b) {
    if (b.is_zero()) throw std::domain_error("zero divisor");
    return RationalFn(a.num_ * b.den_, a.den_ * b.num_);
  }
  RationalFn& operator+=(const RationalFn& o) { return *this = *this + o; }
  RationalFn& operator-=(const RationalFn& o) { return *this = *this - o; }
  RationalFn& operator*=(const RationalFn& o) { return *this = *this * o; }

  friend bool operator==(const RationalFn& a, const RationalFn& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  /// Structural order (denominator first); used only for sorting and sets.
  friend std::strong_ordering operator<=>(const RationalFn& a, const RationalFn& b) {
    if (auto c = a.den_ <=> b.den_; c != 0) return c;
    return a.num_ <=> b.num_;
  }

 private:
  void normalize() {
    if (num_.is_zero()) {
      den_ = Poly::constant(num_.field(), num_.field().one());
      return;
    }
    Poly g = gcd(num_, den_);
    if (!g.is_unit()) {
      num_ = num_ / g;
      den_ = den_ / g;
    }
    const FieldElem c = num_.field().inv(den_.lead());
    num_ = num_.scaled(c);
    den_ = den_.scaled(c);
  }

  Poly num_;
  Poly den_;
};

inline Valuation valuation(const RationalFn& f) { return f.valuation(); }
inline AbsVal abs_val(const RationalFn& f) { return f.abs_val(); }

/// Y^k as a rational function, k of either sign.
inline RationalFn y_power(const GaloisField& f, int k) {
  const Poly one = Poly::constant(f, f.one());
  if (k >= 0) return RationalFn(Poly::monomial(f, f.one(), static_cast<std::size_t>(k)));
  return RationalFn(one, Poly::monomial(f, f.one(), static_cast<std::size_t>(-k)));
}

inline Poly integral_part(const RationalFn& f) { return f.num() / f.den(); }
inline RationalFn fractional_part(const RationalFn& f) { return RationalFn(f.num() % f.den(), f.den()); }
inline RationalFn reduce_mod_R(const RationalFn& f) { return fractional_part(f); }

/// Coefficients of indices [start, prec) of a Laurent expansion.
class LaurentWindow {
 public:
  LaurentWindow(const GaloisField& f, Valuation lead, int start, int prec, std::vector<FieldElem> coeffs)
      : f_(&f), lead_(lead), start_(start), prec_(prec), coeffs_(std::move(coeffs)) {
    if (start_ + static_cast<int>(coeffs_.size()) != prec_) throw std::logic_error("window length mismatch");
  }

  /// Window built from explicit (index, coefficient) entries; unlisted
  /// indices below prec are zero.
  static LaurentWindow from_entries(const GaloisField& f, const std::vector<std::pair<int, FieldElem>>& entries,
                                    int prec) {
    int lo = prec;
    for (auto& [i, c] : entries) {
      if (i >= prec) throw std::invalid_argument("window entry at or beyond precision");
      if (!c.is_zero()) lo = std::min(lo, i);
    }
    std::vector<FieldElem> v(static_cast<std::size_t>(prec - lo), f.zero());
    for (auto& [i, c] : entries)
      if (!c.is_zero()) v[static_cast<std::size_t>(i - lo)] = f.add(v[static_cast<std::size_t>(i - lo)], c);
    Valuation lead = Valuation::inf();
    for (std::size_t k = 0; k < v.size(); ++k)
      if (!v[k].is_zero()) {
        lead = Valuation(lo + static_cast<int>(k));
        break;
      }
    return LaurentWindow(f, lead, lo, prec, std::move(v));
  }

  const GaloisField& field() const { return *f_; }
  /// Valuation of the expanded value (+INF for zero).  When the value is
  /// nonzero but vanishes below prec this is still its true valuation.
  Valuation lead() const { return lead_; }
  int start() const { return start_; }
  int prec() const { return prec_; }

  FieldElem coeff(int i) const {
    if (i >= prec_) throw std::out_of_range("coefficient index beyond window precision");
    if (i < start_) return f_->zero();
    return coeffs_[static_cast<std::size_t>(i - start_)];
  }

  /// Sum of the window's terms as an exact rational function.
  RationalFn resum() const {
    RationalFn acc(*f_);
    for (int i = start_; i < prec_; ++i) {
      FieldElem c = coeff(i);
      if (c.is_zero()) continue;
      acc += RationalFn(Poly::constant(*f_, c)) * y_power(*f_, -i);
    }
    return acc;
  }

 private:
  const GaloisField* f_;
  Valuation lead_;
  int start_;
  int prec_;
  std::vector<FieldElem> coeffs_;
};

/// Exact Laurent coefficients of f at every index below prec.
inline LaurentWindow expand(const RationalFn& f, int prec) {
  const auto& F = f.field();
  const Valuation v = f.valuation();
  if (f.is_zero() || v >= prec) return LaurentWindow(F, v, prec, prec, {});
  const int shift = std::max(0, prec - 1);
  // f * Y^shift = quotient + (strictly proper part), so the quotient carries
  // every coefficient of index <= shift.
  const Poly quotient = f.num().shifted(static_cast<std::size_t>(shift)) / f.den();
  const int start = v.value();
  std::vector<FieldElem> c;
  c.reserve(static_cast<std::size_t>(prec - start));
  for (int i = start; i < prec; ++i) c.push_back(quotient.coeff(static_cast<std::size_t>(shift - i)));
  return LaurentWindow(F, v, start, prec, std::move(c));
}

/// True iff f agrees with center at every index below depth.
inline bool in_ball(const RationalFn& f, const LaurentWindow& center, int depth) {
  if (center.prec() < depth) throw std::invalid_argument("ball center precision below depth");
  const LaurentWindow w = expand(f, depth);
  const int lo = std::min(w.start(), center.start());
  for (int i = lo; i < depth; ++i)
    if (w.coeff(i) != center.coeff(i)) return false;
  return true;
}

/// "index:coeff" entries for the nonzero coefficients, comma separated.
inline std::string to_string(const LaurentWindow& w) {
  std::string s;
  for (int i = w.start(); i < w.prec(); ++i) {
    FieldElem c = w.coeff(i);
    if (c.is_zero()) continue;
    if (!s.empty()) s += ",";
    s += std::to_string(i) + ":" + std::to_string(c.code);
  }
  return s;
}

inline LaurentWindow parse_window(const GaloisField& f, std::string_view text, int prec) {
  std::vector<std::pair<int, FieldElem>> entries;
  std::string s(text);
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto end = s.find(',', pos);
    if (end == std::string::npos) end = s.size();
    std::string item = s.substr(pos, end - pos);
    auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("window entry missing ':' in '" + item + "'");
    entries.emplace_back(std::stoi(item.substr(0, colon)),
                         f.from_code(static_cast<std::uint32_t>(std::stoul(item.substr(colon + 1)))));
    pos = end + 1;
  }
  return LaurentWindow::from_entries(f, entries, prec);
}

inline std::string to_string(const RationalFn& f) { return to_digits(f.num()) + "/" + to_digits(f.den()); }
inline std::string to_pretty(const RationalFn& f) {
  if (f.is_poly()) return to_pretty(f.num());
  auto wrap = [](const Poly& p) {
    std::string s = to_pretty(p);
    return p.coeffs().size() > 1 && s.find('+') != std::string::npos ? "(" + s + ")" : s;
  };
  return wrap(f.num()) + "/" + wrap(f.den());
}
inline std::ostream& operator<<(std::ostream& os, const RationalFn& f) { return os << to_pretty(f); }

// ---------------------------------------------------------------------------
// The plane K_w^2.

struct LatticeVec {
  Poly a;
  Poly b;

  friend bool operator==(const LatticeVec&, const LatticeVec&) = default;
  friend std::strong_ordering operator<=>(const LatticeVec& u, const LatticeVec& v) {
    if (auto c = u.a <=> v.a; c != 0) return c;
    return u.b <=> v.b;
  }
};

struct PlaneVec {
  RationalFn x;
  RationalFn y;

  PlaneVec(RationalFn x_, RationalFn y_) : x(std::move(x_)), y(std::move(y_)) {}
  PlaneVec(const LatticeVec& v) : x(v.a), y(v.b) {}  // NOLINT

  bool is_zero() const { return x.is_zero() && y.is_zero(); }
  friend bool operator==(const PlaneVec&, const PlaneVec&) = default;
};

namespace detail {
inline void require_nonzero(const PlaneVec& v) {
  if (v.is_zero()) throw std::invalid_argument("zero vector");
}
}  // namespace detail

/// log_q of the sup norm.
inline int vec_norm(const PlaneVec& v) {
  detail::require_nonzero(v);
  return std::max(v.x.abs_val(), v.y.abs_val()).exponent;
}

/// |x| >= |y|, the test separating z_v = x_v from z_v = y_v.
inline bool x_dominates(const PlaneVec& v) { return v.x.abs_val() >= v.y.abs_val(); }

inline RationalFn z_of(const PlaneVec& v) {
  detail::require_nonzero(v);
  return x_dominates(v) ? v.x : v.y;
}
inline RationalFn zprime_of(const PlaneVec& v) {
  detail::require_nonzero(v);
  return x_dominates(v) ? v.y : v.x;
}
inline PlaneVec perp(const PlaneVec& v) { return PlaneVec(v.y, -v.x); }
inline LatticeVec perp(const LatticeVec& v) { return {v.b, -v.a}; }

struct DirectionWindows {
  LaurentWindow x;
  LaurentWindow y;
};

/// The direction Y^{-n} v, n the norm exponent, expanded below prec.
inline DirectionWindows direction(const PlaneVec& v, int prec) {
  const int n = vec_norm(v);
  const RationalFn s = y_power(v.x.field(), -n);
  return {expand(v.x * s, prec), expand(v.y * s, prec)};
}

}  // namespace fqlattice
