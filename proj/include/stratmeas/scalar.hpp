#pragma once

#include <cmath>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace stratmeas {

using Rational = boost::multiprecision::cpp_rational;

/// Tolerance for probability rows read from input.
inline constexpr double kRowTolerance = 1e-12;
/// Default tolerance for comparing computed quantities.
inline constexpr double kCompareTolerance = 1e-9;

inline double to_double(double v) { return v; }
inline double to_double(const Rational& v) { return v.convert_to<double>(); }

inline bool nearly_equal(double a, double b, double tol) { return std::fabs(a - b) <= tol; }
/// Rationals compare exactly; the tolerance is ignored.
inline bool nearly_equal(const Rational& a, const Rational& b, double /*tol*/) { return a == b; }

inline bool is_zero(double v) { return v == 0.0; }
inline bool is_zero(const Rational& v) { return v == 0; }

inline bool is_one(double v, double tol) { return std::fabs(v - 1.0) <= tol; }
inline bool is_one(const Rational& v, double /*tol*/) { return v == 1; }

/// Parses "p/q", an integer, or a finite decimal ("0.125", "-3.5e-2") exactly.
Rational parse_rational(const std::string& text);

/// Renders "p/q", or "p" when the denominator is one.
std::string format_rational(const Rational& v);

}  // namespace stratmeas
