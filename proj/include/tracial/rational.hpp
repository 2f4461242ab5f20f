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

#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace tracial {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p", "-p" or "p/q" with q > 0. Throws ValidationError.
Rational parse_rational(std::string_view text);

/// Canonical text: "p" for integers, "p/q" otherwise, lowest terms.
std::string format_rational(const Rational& value);

double to_double(const Rational& value);

/// Smallest dyadic rational with denominator 2^bits that is >= value.
Rational rational_ceil(double value, unsigned bits = 52);
/// Largest dyadic rational with denominator 2^bits that is <= value.
Rational rational_floor(double value, unsigned bits = 52);
/// Nearest dyadic rational with denominator 2^bits.
Rational rational_round(double value, unsigned bits);

Rational rational_abs(const Rational& value);

/// a + b·i with exact rational parts.
struct GaussianRational {
  Rational re{0};
  Rational im{0};

  /// Rational upper bound on the modulus: exact when one part is zero,
  /// |re| + |im| otherwise.
  Rational modulus_bound() const;
  bool is_zero() const { return re == 0 && im == 0; }

  friend bool operator==(const GaussianRational&,
                         const GaussianRational&) = default;
};

GaussianRational operator*(const GaussianRational& a,
                           const GaussianRational& b);
GaussianRational operator+(const GaussianRational& a,
                           const GaussianRational& b);
GaussianRational conj(const GaussianRational& a);

}  // namespace tracial
