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
 * Exact arithmetic in GF(q) and GF(q)[Y].
 *
 * A field element is stored as a single integer code in [0, q): the element
 * c_0 + c_1 t + ... + c_{d-1} t^{d-1} of GF(p)[t]/(modulus) has code
 * c_0 + c_1 p + ... + c_{d-1} p^{d-1}.  Codes order field elements, which in
 * turn gives the canonical polynomial order (degree first, then coefficients
 * from leading to constant) as plain integer order on polynomial ranks.
 */

#include "rational.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fqlattice {

struct FieldElem {
  std::uint32_t code = 0;

  constexpr bool is_zero() const { return code == 0; }
  friend constexpr auto operator<=>(FieldElem, FieldElem) = default;
};

/// Degree of a polynomial; the zero polynomial has the distinguished degree
/// NEG_INF, which compares below every integer and absorbs addition.
class Degree {
 public:
  static constexpr Degree neg_inf() { return Degree(); }
  constexpr explicit Degree(int v) : v_(v) {}

  constexpr bool is_neg_inf() const { return !v_.has_value(); }
  int value() const {
    if (!v_) throw std::logic_error("degree of the zero polynomial is NEG_INF");
    return *v_;
  }

  friend constexpr bool operator==(const Degree&, const Degree&) = default;
  friend constexpr std::strong_ordering operator<=>(const Degree& a, const Degree& b) {
    if (!a.v_ || !b.v_) return a.v_.has_value() <=> b.v_.has_value();
    return *a.v_ <=> *b.v_;
  }
  friend constexpr bool operator==(const Degree& a, int b) { return a.v_ && *a.v_ == b; }
  friend constexpr std::strong_ordering operator<=>(const Degree& a, int b) {
    if (!a.v_) return std::strong_ordering::less;
    return *a.v_ <=> b;
  }
  friend constexpr Degree operator+(const Degree& a, const Degree& b) {
    if (!a.v_ || !b.v_) return neg_inf();
    return Degree(*a.v_ + *b.v_);
  }

  std::string str() const { return v_ ? std::to_string(*v_) : std::string("NEG_INF"); }

 private:
  constexpr Degree() = default;
  std::optional<int> v_;
};

namespace detail {

// Dense polynomials over GF(p) with small p, used only to validate moduli and
// to build multiplication tables for extension fields.
using RawPoly = std::vector<std::uint32_t>;

inline void raw_trim(RawPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline std::uint32_t mod_inverse(std::uint32_t a, std::uint32_t p) {
  std::int64_t t = 0, nt = 1, r = p, nr = a % p;
  while (nr != 0) {
    std::int64_t qq = r / nr;
    std::tie(t, nt) = std::pair{nt, t - qq * nt};
    std::tie(r, nr) = std::pair{nr, r - qq * nr};
  }
  if (r != 1) throw std::domain_error("zero divisor");
  return static_cast<std::uint32_t>((t % p + p) % p);
}

inline RawPoly raw_mod(RawPoly a, const RawPoly& m, std::uint32_t p) {
  raw_trim(a);
  const std::size_t dm = m.size() - 1;
  const std::uint32_t inv = mod_inverse(m.back(), p);
  while (a.size() > dm) {
    const std::uint64_t c = std::uint64_t(a.back()) * inv % p;
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i) {
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + std::uint64_t(p) - c * m[i] % p) % p);
    }
    raw_trim(a);
  }
  return a;
}

inline bool raw_is_irreducible(const RawPoly& m, std::uint32_t p) {
  const std::size_t d = m.size() - 1;
  if (d == 0) return false;
  if (d == 1) return true;
  // Trial division by every monic polynomial of degree 1..d/2.
  for (std::size_t e = 1; 2 * e <= d; ++e) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < e; ++i) count *= p;
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      RawPoly cand(e + 1, 0);
      std::uint64_t r = idx;
      for (std::size_t i = 0; i < e; ++i) {
        cand[i] = static_cast<std::uint32_t>(r % p);
        r /= p;
      }
      cand[e] = 1;
      if (raw_mod(m, cand, p).empty()) return false;
    }
  }
  return true;
}

inline bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; std::uint64_t(d) * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace detail

/// GF(q), q = p^d, realised as GF(p)[t]/(modulus).  Instances are interned:
/// GaloisField::get returns a reference that stays valid for the program's
/// lifetime, so polynomials can hold a plain pointer to their field.
class GaloisField {
 public:
  static constexpr std::uint32_t kMaxOrder = 1u << 16;

  static const GaloisField& get(std::uint32_t q) { return get(q, {}); }

  /// modulus: GF(p) coefficients low-to-high, monic of degree d; ignored
  /// (and may be empty) for prime q.
  static const GaloisField& get(std::uint32_t q, std::vector<std::uint32_t> modulus) {
    auto [p, d] = split_prime_power(q);
    if (d == 1) {
      modulus = {0, 1};
    } else if (modulus.empty()) {
      modulus = builtin_modulus(q);
    }
    static std::mutex mu;
    static std::map<std::pair<std::uint32_t, std::vector<std::uint32_t>>, std::unique_ptr<GaloisField>> registry;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::pair{q, modulus};
    auto it = registry.find(key);
    if (it != registry.end()) return *it->second;
    auto field = std::unique_ptr<GaloisField>(new GaloisField(p, d, modulus));
    auto& ref = *field;
    registry.emplace(std::move(key), std::move(field));
    return ref;
  }

  static std::pair<std::uint32_t, std::uint32_t> split_prime_power(std::uint32_t q) {
    if (q < 2 || q > kMaxOrder) throw std::invalid_argument("field order out of range: " + std::to_string(q));
    std::uint32_t p = 2;
    while (q % p != 0) ++p;
    std::uint32_t d = 0, r = q;
    while (r % p == 0) {
      r /= p;
      ++d;
    }
    if (r != 1) throw std::invalid_argument("field order is not a prime power: " + std::to_string(q));
    return {p, d};
  }

  static std::vector<std::uint32_t> builtin_modulus(std::uint32_t q) {
    switch (q) {
      case 4: return {1, 1, 1};     // t^2 + t + 1
      case 8: return {1, 1, 0, 1};  // t^3 + t + 1
      case 9: return {1, 0, 1};     // t^2 + 1
      default:
        throw std::invalid_argument("no built-in modulus for q=" + std::to_string(q) + "; supply one");
    }
  }

  std::uint32_t p() const { return p_; }
  std::uint32_t d() const { return d_; }
  std::uint32_t q() const { return q_; }
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }

  FieldElem zero() const { return {0}; }
  FieldElem one() const { return {1}; }
  /// Image of an integer in the prime subfield.
  FieldElem from_int(std::int64_t k) const {
    const std::int64_t p = p_;
    return {static_cast<std::uint32_t>(((k % p) + p) % p)};
  }
  FieldElem from_code(std::uint32_t code) const {
    if (code >= q_) throw std::out_of_range("field element code out of range");
    return {code};
  }

  std::vector<std::uint32_t> coords(FieldElem a) const {
    std::vector<std::uint32_t> c(d_);
    std::uint32_t r = a.code;
    for (std::uint32_t i = 0; i < d_; ++i) {
      c[i] = r % p_;
      r /= p_;
    }
    return c;
  }
  FieldElem from_coords(std::span<const std::uint32_t> c) const {
    std::uint32_t code = 0;
    for (std::size_t i = c.size(); i-- > 0;) code = code * p_ + (c[i] % p_);
    return from_code(code);
  }

  FieldElem add(FieldElem a, FieldElem b) const {
    if (d_ == 1) return {(a.code + b.code) % p_};
    if (p_ == 2) return {a.code ^ b.code};
    std::uint32_t out = 0, scale = 1, x = a.code, y = b.code;
    for (std::uint32_t i = 0; i < d_; ++i) {
      out += ((x % p_ + y % p_) % p_) * scale;
      x /= p_;
      y /= p_;
      scale *= p_;
    }
    return {out};
  }
  FieldElem neg(FieldElem a) const {
    if (p_ == 2) return a;
    if (d_ == 1) return {(p_ - a.code) % p_};
    std::uint32_t out = 0, scale = 1, x = a.code;
    for (std::uint32_t i = 0; i < d_; ++i) {
      out += ((p_ - x % p_) % p_) * scale;
      x /= p_;
      scale *= p_;
    }
    return {out};
  }
  FieldElem sub(FieldElem a, FieldElem b) const { return add(a, neg(b)); }
  FieldElem mul(FieldElem a, FieldElem b) const {
    if (a.code == 0 || b.code == 0) return {0};
    return {exp_[(log_[a.code] + log_[b.code]) % (q_ - 1)]};
  }
  FieldElem inv(FieldElem a) const {
    if (a.code == 0) throw std::domain_error("zero divisor");
    return {exp_[(q_ - 1 - log_[a.code]) % (q_ - 1)]};
  }
  FieldElem div(FieldElem a, FieldElem b) const { return mul(a, inv(b)); }
  FieldElem pow(FieldElem a, std::int64_t e) const {
    if (a.code == 0) {
      if (e <= 0) throw std::domain_error("zero divisor");
      return {0};
    }
    const std::int64_t n = q_ - 1;
    const std::int64_t l = ((log_[a.code] * (e % n)) % n + n) % n;
    return {exp_[static_cast<std::size_t>(l)]};
  }

  /// Human-readable element: an integer for the prime subfield, otherwise a
  /// polynomial in the generator t, e.g. "t+1".
  std::string elem_str(FieldElem a) const {
    if (a.code < p_) return std::to_string(a.code);
    auto c = coords(a);
    std::string s;
    for (std::size_t i = c.size(); i-- > 0;) {
      if (c[i] == 0) continue;
      if (!s.empty()) s += "+";
      if (i == 0) {
        s += std::to_string(c[i]);
        continue;
      }
      if (c[i] != 1) s += std::to_string(c[i]);
      s += "t";
      if (i > 1) s += "^" + std::to_string(i);
    }
    return s;
  }

  bool operator==(const GaloisField& o) const { return this == &o; }

 private:
  GaloisField(std::uint32_t p, std::uint32_t d, std::vector<std::uint32_t> modulus)
      : p_(p), d_(d), q_(1), modulus_(std::move(modulus)) {
    for (std::uint32_t i = 0; i < d_; ++i) q_ *= p_;
    if (d_ > 1) {
      for (auto& c : modulus_)
        if (c >= p_) throw std::invalid_argument("modulus coefficient out of range");
      if (modulus_.size() != d_ + 1 || modulus_.back() != 1)
        throw std::invalid_argument("modulus must be monic of degree " + std::to_string(d_));
      if (!detail::raw_is_irreducible(modulus_, p_))
        throw std::invalid_argument("modulus is not irreducible over GF(" + std::to_string(p_) + ")");
    }
    build_tables();
  }

  std::uint32_t mul_slow(std::uint32_t a, std::uint32_t b) const {
    if (d_ == 1) return static_cast<std::uint32_t>(std::uint64_t(a) * b % p_);
    detail::RawPoly x(d_), y(d_), r(2 * d_, 0);
    for (std::uint32_t i = 0; i < d_; ++i) {
      x[i] = a % p_;
      a /= p_;
      y[i] = b % p_;
      b /= p_;
    }
    for (std::uint32_t i = 0; i < d_; ++i)
      for (std::uint32_t j = 0; j < d_; ++j) r[i + j] = static_cast<std::uint32_t>((r[i + j] + std::uint64_t(x[i]) * y[j]) % p_);
    r = detail::raw_mod(r, modulus_, p_);
    std::uint32_t code = 0;
    for (std::size_t i = r.size(); i-- > 0;) code = code * p_ + r[i];
    return code;
  }

  void build_tables() {
    exp_.assign(q_ - 1 == 0 ? 1 : q_ - 1, 0);
    log_.assign(q_, 0);
    if (q_ == 2) {
      exp_[0] = 1;
      return;
    }
    const std::uint32_t n = q_ - 1;
    std::vector<std::uint32_t> prime_divisors;
    for (std::uint32_t r = n, f = 2; r > 1; ++f) {
      if (r % f == 0) {
        prime_divisors.push_back(f);
        while (r % f == 0) r /= f;
      }
    }
    auto power = [&](std::uint32_t g, std::uint32_t e) {
      std::uint32_t acc = 1;
      while (e) {
        if (e & 1) acc = mul_slow(acc, g);
        g = mul_slow(g, g);
        e >>= 1;
      }
      return acc;
    };
    std::uint32_t gen = 0;
    for (std::uint32_t g = 2; g < q_ && gen == 0; ++g) {
      bool primitive = true;
      for (auto f : prime_divisors)
        if (power(g, n / f) == 1) {
          primitive = false;
          break;
        }
      if (primitive) gen = g;
    }
    if (gen == 0) throw std::logic_error("no primitive element found");
    std::uint32_t x = 1;
    for (std::uint32_t i = 0; i < n; ++i) {
      exp_[i] = x;
      log_[x] = i;
      x = mul_slow(x, gen);
    }
  }

  std::uint32_t p_, d_, q_;
  std::vector<std::uint32_t> modulus_;
  std::vector<std::uint32_t> exp_, log_;
};

/// Element of GF(q)[Y].  Coefficients are stored low-to-high with a nonzero
/// leading coefficient; the zero polynomial has no coefficients.
class Poly {
 public:
  explicit Poly(const GaloisField& f) : f_(&f) {}
  Poly(const GaloisField& f, std::vector<FieldElem> coeffs) : f_(&f), c_(std::move(coeffs)) {
    for (auto c : c_)
      if (c.code >= f.q()) throw std::out_of_range("coefficient outside field");
    trim();
  }

  static Poly constant(const GaloisField& f, FieldElem c) { return Poly(f, {c}); }
  static Poly monomial(const GaloisField& f, FieldElem c, std::size_t k) {
    std::vector<FieldElem> v(k + 1, f.zero());
    v[k] = c;
    return Poly(f, std::move(v));
  }
  static Poly Y(const GaloisField& f) { return monomial(f, f.one(), 1); }

  /// Inverse of rank(): the polynomial whose coefficient codes are the base-q
  /// digits of r.
  static Poly from_rank(const GaloisField& f, std::uint64_t r) {
    Poly out(f);
    while (r) {
      out.c_.push_back(FieldElem{static_cast<std::uint32_t>(r % f.q())});
      r /= f.q();
    }
    return out;
  }

  /// Position in the canonical order, counting from the zero polynomial.
  std::uint64_t rank() const {
    std::uint64_t r = 0;
    const std::uint64_t q = f_->q();
    for (std::size_t i = c_.size(); i-- > 0;) {
      if (r > (UINT64_MAX - c_[i].code) / q) throw std::overflow_error("polynomial rank overflow");
      r = r * q + c_[i].code;
    }
    return r;
  }

  const GaloisField& field() const { return *f_; }
  Degree degree() const { return c_.empty() ? Degree::neg_inf() : Degree(static_cast<int>(c_.size()) - 1); }
  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  bool is_unit() const { return c_.size() == 1; }
  bool is_monic() const { return !c_.empty() && c_.back() == f_->one(); }
  FieldElem lead() const { return c_.empty() ? f_->zero() : c_.back(); }
  FieldElem coeff(std::size_t i) const { return i < c_.size() ? c_[i] : f_->zero(); }
  std::span<const FieldElem> coeffs() const { return c_; }

  Poly monic() const {
    if (c_.empty()) return *this;
    return scaled(f_->inv(lead()));
  }
  Poly scaled(FieldElem s) const {
    if (s.is_zero()) return Poly(*f_);
    Poly out = *this;
    for (auto& c : out.c_) c = f_->mul(c, s);
    return out;
  }
  /// Multiplication by Y^k.
  Poly shifted(std::size_t k) const {
    if (c_.empty()) return *this;
    Poly out(*f_);
    out.c_.assign(k, f_->zero());
    out.c_.insert(out.c_.end(), c_.begin(), c_.end());
    return out;
  }
  /// Drops coefficients of Y^k and higher (reduction mod Y^k).
  Poly truncated(std::size_t k) const {
    Poly out = *this;
    if (out.c_.size() > k) out.c_.resize(k);
    out.trim();
    return out;
  }
  FieldElem eval(FieldElem x) const {
    FieldElem acc = f_->zero();
    for (std::size_t i = c_.size(); i-- > 0;) acc = f_->add(f_->mul(acc, x), c_[i]);
    return acc;
  }

  Poly& operator+=(const Poly& o) {
    check_field(o);
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), f_->zero());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = f_->add(c_[i], o.c_[i]);
    trim();
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    check_field(o);
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), f_->zero());
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = f_->sub(c_[i], o.c_[i]);
    trim();
    return *this;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) {
    for (auto& c : a.c_) c = a.f_->neg(c);
    return a;
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    a.check_field(b);
    Poly out(*a.f_);
    if (a.c_.empty() || b.c_.empty()) return out;
    out.c_.assign(a.c_.size() + b.c_.size() - 1, a.f_->zero());
    const auto& F = *a.f_;
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i].is_zero()) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) out.c_[i + j] = F.add(out.c_[i + j], F.mul(a.c_[i], b.c_[j]));
    }
    out.trim();
    return out;
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.f_ == b.f_ && a.c_ == b.c_; }
  /// Canonical order: by degree, then coefficients from leading to constant.
  friend std::strong_ordering operator<=>(const Poly& a, const Poly& b) {
    if (auto c = a.c_.size() <=> b.c_.size(); c != 0) return c;
    for (std::size_t i = a.c_.size(); i-- > 0;)
      if (auto c = a.c_[i] <=> b.c_[i]; c != 0) return c;
    return std::strong_ordering::equal;
  }

  void check_field(const Poly& o) const {
    if (f_ != o.f_) throw std::invalid_argument("polynomials over different fields");
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }

  const GaloisField* f_;
  std::vector<FieldElem> c_;
};

/// Number of polynomials of degree <= d, i.e. q^(d+1).
inline std::uint64_t poly_count(const GaloisField& f, int d) {
  std::uint64_t n = 1;
  for (int i = 0; i <= d; ++i) {
    if (n > UINT64_MAX / f.q()) throw std::overflow_error("polynomial count overflow");
    n *= f.q();
  }
  return d < 0 ? 1 : n;
}

struct PolyDivMod {
  Poly quotient;
  Poly remainder;
};

inline PolyDivMod divmod(const Poly& a, const Poly& b) {
  a.check_field(b);
  if (b.is_zero()) throw std::domain_error("division by zero polynomial");
  const auto& F = a.field();
  const int db = b.degree().value();
  if (a.degree() < db) return {Poly(F), a};
  const int da = a.degree().value();
  std::vector<FieldElem> rem(a.coeffs().begin(), a.coeffs().end());
  std::vector<FieldElem> quo(static_cast<std::size_t>(da - db + 1), F.zero());
  const FieldElem inv_lead = F.inv(b.lead());
  auto bc = b.coeffs();
  for (int k = da - db; k >= 0; --k) {
    const FieldElem c = F.mul(rem[static_cast<std::size_t>(k + db)], inv_lead);
    quo[static_cast<std::size_t>(k)] = c;
    if (c.is_zero()) continue;
    for (int j = 0; j <= db; ++j) {
      auto& r = rem[static_cast<std::size_t>(k + j)];
      r = F.sub(r, F.mul(c, bc[static_cast<std::size_t>(j)]));
    }
  }
  rem.resize(static_cast<std::size_t>(db));
  return {Poly(F, std::move(quo)), Poly(F, std::move(rem))};
}

inline Poly operator/(const Poly& a, const Poly& b) { return divmod(a, b).quotient; }
inline Poly operator%(const Poly& a, const Poly& b) { return divmod(a, b).remainder; }

inline bool divides(const Poly& d, const Poly& a) {
  if (d.is_zero()) return a.is_zero();
  return (a % d).is_zero();
}

struct XgcdResult {
  Poly g;  // monic gcd (zero only if both inputs are zero, which is rejected)
  Poly u;
  Poly v;
};

/// u*a + v*b = g with g the monic gcd of a and b.
inline XgcdResult xgcd(const Poly& a, const Poly& b) {
  a.check_field(b);
  if (a.is_zero() && b.is_zero()) throw std::invalid_argument("xgcd of (0, 0)");
  const auto& F = a.field();
  Poly r0 = a, r1 = b;
  Poly s0 = Poly::constant(F, F.one()), s1(F);
  Poly t0(F), t1 = Poly::constant(F, F.one());
  while (!r1.is_zero()) {
    auto [qq, rr] = divmod(r0, r1);
    r0 = std::exchange(r1, std::move(rr));
    s0 = std::exchange(s1, s0 - qq * s1);
    t0 = std::exchange(t1, t0 - qq * t1);
  }
  const FieldElem c = F.inv(r0.lead());
  return {r0.scaled(c), s0.scaled(c), t0.scaled(c)};
}

inline Poly gcd(const Poly& a, const Poly& b) {
  if (a.is_zero() && b.is_zero()) return a;
  Poly r0 = a, r1 = b;
  while (!r1.is_zero()) r0 = std::exchange(r1, r0 % r1);
  return r0.monic();
}

inline bool coprime(const Poly& a, const Poly& b) {
  if (a.is_zero() && b.is_zero()) return false;
  return gcd(a, b).is_unit();
}

/// Monic irreducibles of each degree 1..max_degree; entry [e] holds degree e
/// in canonical order (entry [0] is empty).
inline std::vector<std::vector<Poly>> irreducibles_up_to(const GaloisField& f, int max_degree) {
  std::vector<std::vector<Poly>> out(static_cast<std::size_t>(std::max(max_degree, 0)) + 1);
  for (int d = 1; d <= max_degree; ++d) {
    const std::uint64_t base = poly_count(f, d - 1);  // rank of Y^d
    for (std::uint64_t low = 0; low < base; ++low) {
      Poly cand = Poly::from_rank(f, base + low);
      bool irreducible = true;
      for (int e = 1; 2 * e <= d && irreducible; ++e)
        for (const auto& g : out[static_cast<std::size_t>(e)])
          if (divides(g, cand)) {
            irreducible = false;
            break;
          }
      if (irreducible) out[static_cast<std::size_t>(d)].push_back(std::move(cand));
    }
  }
  return out;
}

inline std::vector<Poly> irreducibles_of_degree(const GaloisField& f, int d) {
  if (d < 1) throw std::invalid_argument("irreducible degree must be >= 1");
  return std::move(irreducibles_up_to(f, d)[static_cast<std::size_t>(d)]);
}

/// Monic irreducible factors with multiplicity, in canonical order.  The
/// product of the factors times lead(P) is P.
inline std::vector<Poly> factor(const Poly& P) {
  if (P.is_zero()) throw std::invalid_argument("factor of the zero polynomial");
  std::vector<Poly> out;
  Poly rest = P.monic();
  const int deg = P.degree().value();
  auto irr = irreducibles_up_to(P.field(), deg / 2);
  for (int e = 1; 2 * e <= rest.degree().value(); ++e) {
    for (const auto& g : irr[static_cast<std::size_t>(e)]) {
      while (true) {
        auto [qq, rr] = divmod(rest, g);
        if (!rr.is_zero()) break;
        out.push_back(g);
        rest = std::move(qq);
      }
    }
  }
  if (rest.degree() >= 1) out.push_back(std::move(rest));
  std::sort(out.begin(), out.end());
  return out;
}

inline bool is_irreducible(const Poly& P) {
  if (P.degree() < 1) return false;
  auto f = factor(P);
  return f.size() == 1;
}

/// Nonzero principal ideal gen*R of R = GF(q)[Y], with its prime factorisation.
class IdealSpec {
 public:
  explicit IdealSpec(const Poly& generator) : gen_(generator.monic()), factors_() {
    if (generator.is_zero()) throw std::invalid_argument("ideal generator must be nonzero");
    factors_ = factor(gen_);
  }
  static IdealSpec unit(const GaloisField& f) { return IdealSpec(Poly::constant(f, f.one())); }

  const Poly& gen() const { return gen_; }
  const GaloisField& field() const { return gen_.field(); }
  /// Prime factors with multiplicity.
  const std::vector<Poly>& factors() const { return factors_; }
  /// Distinct prime factors.
  std::vector<Poly> primes() const {
    std::vector<Poly> out = factors_;
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  bool is_unit() const { return gen_.is_unit(); }
  bool contains(const Poly& a) const { return divides(gen_, a); }

  friend bool operator==(const IdealSpec& a, const IdealSpec& b) { return a.gen_ == b.gen_; }

 private:
  Poly gen_;
  std::vector<Poly> factors_;
};

inline BigInt ideal_norm(const IdealSpec& I) {
  return ipow(BigInt(I.field().q()), static_cast<unsigned>(I.gen().degree().value()));
}

// ---------------------------------------------------------------------------
// Text encodings.
//
// Digit form: coefficient codes low-to-high joined by commas ("1,1,1" is
// Y^2+Y+1).  Pretty form: "Y^2+Y+1", with extension-field coefficients
// written in the generator t, e.g. "(t+1)Y^2+tY".

inline std::string to_digits(const Poly& P) {
  if (P.is_zero()) return "0";
  std::string s;
  for (std::size_t i = 0; i < P.coeffs().size(); ++i) {
    if (i) s += ",";
    s += std::to_string(P.coeffs()[i].code);
  }
  return s;
}

inline std::string to_pretty(const Poly& P) {
  if (P.is_zero()) return "0";
  const auto& F = P.field();
  std::string s;
  for (std::size_t i = P.coeffs().size(); i-- > 0;) {
    const FieldElem c = P.coeffs()[i];
    if (c.is_zero()) continue;
    if (!s.empty()) s += "+";
    std::string cs = F.elem_str(c);
    const bool compound = cs.find('+') != std::string::npos;
    if (i == 0) {
      s += compound ? "(" + cs + ")" : cs;
      continue;
    }
    if (c != F.one()) s += compound ? "(" + cs + ")" : cs;
    s += "Y";
    if (i > 1) s += "^" + std::to_string(i);
  }
  return s;
}

inline std::ostream& operator<<(std::ostream& os, const Poly& P) { return os << to_pretty(P); }

namespace detail {

class PolyParser {
 public:
  PolyParser(const GaloisField& f, std::string_view s) : f_(f) {
    for (char ch : s)
      if (!std::isspace(static_cast<unsigned char>(ch))) s_ += ch;
  }

  Poly parse() {
    if (s_.empty()) fail("empty polynomial");
    Poly acc(f_);
    bool first = true;
    while (pos_ < s_.size() || first) {
      FieldElem sign = f_.one();
      if (peek('+')) {
        ++pos_;
      } else if (peek('-')) {
        ++pos_;
        sign = f_.neg(f_.one());
      } else if (!first) {
        fail("expected '+' or '-'");
      }
      first = false;
      acc += term().scaled(sign);
    }
    return acc;
  }

 private:
  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }
  [[noreturn]] void fail(const std::string& why) const {
    throw std::invalid_argument("cannot parse polynomial '" + s_ + "': " + why);
  }
  std::uint32_t integer() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    std::uint32_t v = 0;
    auto r = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (r.ec != std::errc()) fail("integer out of range");
    return v;
  }
  std::uint32_t exponent() {
    if (!peek('^')) return 1;
    ++pos_;
    return integer();
  }
  // Element of GF(q) written in t; integers denote prime-subfield elements.
  FieldElem t_poly(bool parenthesised) {
    std::vector<std::uint32_t> c(f_.d(), 0);
    bool first = true;
    while (pos_ < s_.size()) {
      std::int64_t sign = 1;
      if (peek('+') || peek('-')) {
        if (!parenthesised && !first) break;
        sign = peek('-') ? -1 : 1;
        ++pos_;
      } else if (!first) {
        break;
      }
      first = false;
      std::int64_t coef = 1;
      bool have_coef = false;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        coef = integer();
        have_coef = true;
      }
      std::uint32_t e = 0;
      if (peek('t')) {
        ++pos_;
        e = exponent();
      } else if (!have_coef) {
        fail("expected coefficient");
      }
      if (e >= f_.d()) fail("power of t at or above the extension degree");
      const std::int64_t p = f_.p();
      c[e] = static_cast<std::uint32_t>(((c[e] + sign * coef) % p + p) % p);
      if (!parenthesised) break;
    }
    return f_.from_coords(c);
  }
  Poly term() {
    FieldElem coef = f_.one();
    bool have_coef = false;
    if (peek('(')) {
      ++pos_;
      coef = t_poly(true);
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      have_coef = true;
    } else if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == 't')) {
      if (s_[pos_] == 't' && f_.d() == 1) fail("t is only meaningful over an extension field");
      coef = t_poly(false);  // "2", "t", "2t^3"
      have_coef = true;
    }
    if (peek('*')) ++pos_;
    if (peek('Y')) {
      ++pos_;
      return Poly::monomial(f_, coef, exponent());
    }
    if (!have_coef) fail("expected term");
    return Poly::constant(f_, coef);
  }

  const GaloisField& f_;
  std::string s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses either the digit form or the pretty form.
inline Poly parse_poly(const GaloisField& f, std::string_view text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  const bool digit_form = !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isdigit(static_cast<unsigned char>(ch)) || ch == ',';
  });
  if (digit_form && s.find(',') != std::string::npos) {
    std::vector<FieldElem> c;
    std::size_t start = 0;
    while (start <= s.size()) {
      auto end = s.find(',', start);
      if (end == std::string::npos) end = s.size();
      std::uint32_t v = 0;
      auto r = std::from_chars(s.data() + start, s.data() + end, v);
      if (r.ec != std::errc() || r.ptr != s.data() + end)
        throw std::invalid_argument("cannot parse polynomial digits '" + s + "'");
      c.push_back(f.from_code(v));
      start = end + 1;
    }
    return Poly(f, std::move(c));
  }
  if (digit_form) {
    std::uint32_t v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    if (f.d() == 1) return Poly::constant(f, f.from_int(v));
    return Poly::constant(f, f.from_code(v));
  }
  return detail::PolyParser(f, s).parse();
}

}  // namespace fqlattice
