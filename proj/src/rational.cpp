#include "poly/rational.hpp"

#include <ostream>
#include <stdexcept>

namespace poly {

Rational::Rational(long num, long den) : q(num, den) {
  if (den == 0)
    throw std::invalid_argument("rational with zero denominator");
  q.canonicalize();
}

Rational Rational::fromString(std::string_view s) {
  if (s.empty())
    throw std::invalid_argument("empty rational literal");
  mpq_class v;
  // mpq_class::set_str accepts "p/q" but tolerates some forms we do not
  // (leading '+', whitespace); validate the shape first.
  std::size_t slash = s.find('/');
  auto isIntLit = [](std::string_view t) {
    if (!t.empty() && t.front() == '-')
      t.remove_prefix(1);
    if (t.empty())
      return false;
    for (char c : t)
      if (c < '0' || c > '9')
        return false;
    return true;
  };
  std::string_view numPart = s.substr(0, slash);
  if (!isIntLit(numPart))
    throw std::invalid_argument("malformed rational literal: " + std::string(s));
  if (slash != std::string_view::npos) {
    std::string_view denPart = s.substr(slash + 1);
    if (!isIntLit(denPart) || denPart.front() == '-')
      throw std::invalid_argument("malformed rational literal: " + std::string(s));
    if (mpz_class(std::string(denPart)) == 0)
      throw std::invalid_argument("rational with zero denominator: " + std::string(s));
  }
  if (v.set_str(std::string(s), 10) != 0)
    throw std::invalid_argument("malformed rational literal: " + std::string(s));
  v.canonicalize();
  return ratFromMpq(std::move(v));
}

Rational Rational::operator-() const { return ratFromMpq(mpq_class(-q)); }
Rational Rational::operator+(const Rational &o) const { return ratFromMpq(mpq_class(q + o.q)); }
Rational Rational::operator-(const Rational &o) const { return ratFromMpq(mpq_class(q - o.q)); }
Rational Rational::operator*(const Rational &o) const { return ratFromMpq(mpq_class(q * o.q)); }

Rational Rational::operator/(const Rational &o) const {
  if (o.isZero())
    throw std::invalid_argument("rational division by zero");
  return ratFromMpq(mpq_class(q / o.q));
}

Rational &Rational::operator/=(const Rational &o) {
  if (o.isZero())
    throw std::invalid_argument("rational division by zero");
  q /= o.q;
  return *this;
}

Rational Rational::abs() const { return sign() < 0 ? -*this : *this; }

Rational Rational::reciprocal() const {
  if (isZero())
    throw std::invalid_argument("reciprocal of zero");
  return ratFromMpq(mpq_class(1 / q));
}

std::string Rational::toString() const { return q.get_str(); }

std::ostream &operator<<(std::ostream &os, const Rational &r) {
  return os << r.toString();
}

} // namespace poly
