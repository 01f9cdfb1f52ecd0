#include "stratmeas/scalar.hpp"

#include <cctype>

#include "stratmeas/errors.hpp"

namespace stratmeas {

namespace {

Rational pow10(int e) {
  Rational r = 1;
  for (int i = 0; i < e; ++i) r *= 10;
  return r;
}

Rational parse_decimal(const std::string& text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    negative = text[pos] == '-';
    ++pos;
  }
  boost::multiprecision::cpp_int digits = 0;
  int scale = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = digits * 10 + (c - '0');
      any_digit = true;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) throw ValidationError("not a number: '" + text + "'");
  int exponent = 0;
  if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
    ++pos;
    std::size_t used = 0;
    try {
      exponent = std::stoi(text.substr(pos), &used);
    } catch (const std::exception&) {
      throw ValidationError("bad exponent in '" + text + "'");
    }
    pos += used;
  }
  if (pos != text.size()) throw ValidationError("trailing characters in '" + text + "'");
  if (exponent < -400 || exponent > 400) throw ValidationError("exponent out of range in '" + text + "'");
  Rational r(digits);
  int shift = exponent - scale;
  if (shift >= 0) {
    r *= pow10(shift);
  } else {
    r /= pow10(-shift);
  }
  return negative ? Rational(-r) : r;
}

}  // namespace

Rational parse_rational(const std::string& raw) {
  std::string text;
  for (char c : raw) {
    if (!std::isspace(static_cast<unsigned char>(c))) text.push_back(c);
  }
  auto slash = text.find('/');
  if (slash == std::string::npos) return parse_decimal(text);
  Rational num = parse_decimal(text.substr(0, slash));
  Rational den = parse_decimal(text.substr(slash + 1));
  if (den == 0) throw ValidationError("zero denominator in '" + raw + "'");
  return num / den;
}

std::string format_rational(const Rational& v) {
  auto num = boost::multiprecision::numerator(v);
  auto den = boost::multiprecision::denominator(v);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace stratmeas
