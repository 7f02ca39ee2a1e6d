#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace poly {

/// Arbitrary-precision rational, always kept reduced with a positive
/// denominator. Zero is canonically 0/1. Backed by GMP; the rest of the
/// library only sees this interface, so the backend can be swapped without
/// touching callers.
class Rational {
public:
  Rational() : q(0) {}
  Rational(long n) : q(n) {}
  Rational(long num, long den);

  /// Parses "p" or "p/q" (q > 0 after reduction). Throws std::invalid_argument
  /// on malformed input.
  static Rational fromString(std::string_view s);

  Rational operator-() const;
  Rational operator+(const Rational &o) const;
  Rational operator-(const Rational &o) const;
  Rational operator*(const Rational &o) const;
  /// Division; the divisor must be nonzero.
  Rational operator/(const Rational &o) const;

  Rational &operator+=(const Rational &o) { q += o.q; return *this; }
  Rational &operator-=(const Rational &o) { q -= o.q; return *this; }
  Rational &operator*=(const Rational &o) { q *= o.q; return *this; }
  Rational &operator/=(const Rational &o);

  bool operator==(const Rational &o) const { return q == o.q; }
  std::strong_ordering operator<=>(const Rational &o) const {
    int c = cmp(q, o.q);
    return c < 0 ? std::strong_ordering::less
         : c > 0 ? std::strong_ordering::greater
                 : std::strong_ordering::equal;
  }

  bool isZero() const { return sgn(q) == 0; }
  bool isInteger() const { return q.get_den() == 1; }
  /// -1, 0, or +1.
  int sign() const { return sgn(q); }
  Rational abs() const;
  Rational reciprocal() const;

  const mpz_class &num() const { return q.get_num(); }
  const mpz_class &den() const { return q.get_den(); }

  /// "p/q", with "/q" omitted when the denominator is 1.
  std::string toString() const;

private:
  explicit Rational(mpq_class v) : q(std::move(v)) {}
  mpq_class q;

  friend Rational ratFromMpq(mpq_class v);
};

inline Rational ratFromMpq(mpq_class v) { return Rational(std::move(v)); }

std::ostream &operator<<(std::ostream &os, const Rational &r);

} // namespace poly
