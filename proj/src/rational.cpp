// Copyright 2026 The tracial Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tracial/rational.hpp"

#include <cctype>
#include <cmath>

#include "tracial/errors.hpp"

namespace tracial {
namespace {

bool is_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  auto slash = body.find('/');
  std::string_view num = body.substr(0, slash);
  std::string_view den =
      slash == std::string_view::npos ? std::string_view{} : body.substr(slash + 1);
  if (!is_digits(num) || (slash != std::string_view::npos && !is_digits(den))) {
    throw ValidationError("malformed rational literal '" + std::string(text) +
                          "'");
  }
  BigInt n{std::string(num)};
  BigInt d = slash == std::string_view::npos ? BigInt(1) : BigInt(std::string(den));
  if (d == 0) {
    throw ValidationError("zero denominator in rational literal '" +
                          std::string(text) + "'");
  }
  Rational r(n, d);
  return negative ? Rational(-r) : r;
}

std::string format_rational(const Rational& value) {
  const BigInt num = boost::multiprecision::numerator(value);
  const BigInt den = boost::multiprecision::denominator(value);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

Rational rational_ceil(double value, unsigned bits) {
  const double scale = std::ldexp(1.0, static_cast<int>(bits));
  const double scaled = std::ceil(value * scale);
  BigInt num{scaled};
  return Rational(num, BigInt(1) << bits);
}

Rational rational_floor(double value, unsigned bits) {
  const double scale = std::ldexp(1.0, static_cast<int>(bits));
  const double scaled = std::floor(value * scale);
  BigInt num{scaled};
  return Rational(num, BigInt(1) << bits);
}

Rational rational_round(double value, unsigned bits) {
  const double scale = std::ldexp(1.0, static_cast<int>(bits));
  const double scaled = std::nearbyint(value * scale);
  BigInt num{scaled};
  return Rational(num, BigInt(1) << bits);
}

Rational rational_abs(const Rational& value) {
  return value < 0 ? Rational(-value) : value;
}

Rational GaussianRational::modulus_bound() const {
  if (im == 0) return rational_abs(re);
  if (re == 0) return rational_abs(im);
  return rational_abs(re) + rational_abs(im);
}

GaussianRational operator*(const GaussianRational& a,
                           const GaussianRational& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

GaussianRational operator+(const GaussianRational& a,
                           const GaussianRational& b) {
  return {a.re + b.re, a.im + b.im};
}

GaussianRational conj(const GaussianRational& a) { return {a.re, -a.im}; }

}  // namespace tracial
