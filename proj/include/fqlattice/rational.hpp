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

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>

namespace fqlattice {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt ipow(const BigInt& base, unsigned exp) {
  BigInt r = 1;
  for (unsigned i = 0; i < exp; ++i) r *= base;
  return r;
}

/// q^e for a possibly negative integer exponent.
inline Rational qpow(std::uint32_t q, int e) {
  if (e >= 0) return Rational(ipow(BigInt(q), static_cast<unsigned>(e)));
  return Rational(BigInt(1), ipow(BigInt(q), static_cast<unsigned>(-e)));
}

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

inline std::string to_string(const BigInt& v) { return v.str(); }

/// "n/d", or "n" when the denominator is 1.
inline std::string to_string(const Rational& r) {
  auto d = denominator_of(r);
  if (d == 1) return numerator_of(r).str();
  return numerator_of(r).str() + "/" + d.str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline std::string to_decimal(const Rational& r, int digits = 12) {
  std::ostringstream os;
  os << std::setprecision(digits) << to_double(r);
  return os.str();
}

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

}  // namespace fqlattice
