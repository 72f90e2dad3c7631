#include "probsem/rational.hpp"

#include <cctype>
#include <cstddef>

namespace probsem {

std::string rational_to_string(const mpq_class& q) {
  // GMP already prints canonical "num" or "num/den".
  return q.get_str();
}

namespace {

bool is_integer_token(const std::string& s) {
  std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i >= s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

[[noreturn]] void bad(const std::string& text) {
  throw std::invalid_argument("malformed rational: '" + text + "'");
}

}  // namespace

mpq_class parse_rational(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) bad(text);

  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    if (!is_integer_token(num) || !is_integer_token(den)) bad(text);
    // Base must be explicit: GMP's default base 0 would read a leading zero
    // as octal.
    mpz_class d(den, 10);
    if (d == 0) throw std::invalid_argument("rational with zero denominator: '" + text + "'");
    mpq_class q(mpz_class(num, 10), d);
    q.canonicalize();
    return q;
  }

  // Decimal / scientific notation, e.g. "0.25", "2.5e-3", "1e-9".
  bool negative = false;
  std::size_t i = 0;
  if (s[i] == '-' || s[i] == '+') {
    negative = s[i] == '-';
    ++i;
  }
  std::string digits;
  long frac_len = 0;
  bool seen_digit = false;
  for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
    digits += s[i];
    seen_digit = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    for (; i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])); ++i) {
      digits += s[i];
      ++frac_len;
      seen_digit = true;
    }
  }
  if (!seen_digit) bad(text);
  long exp10 = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    std::string e = s.substr(i + 1);
    if (!is_integer_token(e)) bad(text);
    exp10 = std::stol(e);
    i = s.size();
  }
  if (i != s.size()) bad(text);

  mpz_class mantissa(digits.empty() ? "0" : digits, 10);
  if (negative) mantissa = -mantissa;
  long shift = exp10 - frac_len;
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  mpq_class q = shift >= 0 ? mpq_class(mantissa * pow10) : mpq_class(mantissa, pow10);
  q.canonicalize();
  return q;
}

}  // namespace probsem
