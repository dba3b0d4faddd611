#pragma once

#include <gmpxx.h>

#include <span>
#include <string>
#include <vector>

namespace socrs {

using Rational = mpq_class;

// num / den in lowest terms. The two-argument mpq constructor skips this step, and uncanonical
// values compare wrongly.
Rational fraction(long num, long den);

// "p/q" (or "p" for integers), the serialized form used in reports.
std::string to_string(const Rational& r);

// Accepts "p/q", integers, and decimal literals such as "0.25" or "1e-3" (parsed exactly).
Rational parse_rational(const std::string& text);

// Exact binary value of a double.
Rational exact(double v);
std::vector<Rational> exact(std::span<const double> v);
std::vector<double> to_doubles(std::span<const Rational> v);

Rational binomial(int n, int k);
Rational power(const Rational& base, int exponent);

}  // namespace socrs
