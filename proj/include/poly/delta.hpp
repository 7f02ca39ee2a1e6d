#pragma once

#include <compare>
#include <string>

#include "poly/rational.hpp"

namespace poly {

/// Value of the form `real + delta * eps` for a single symbolic infinitesimal
/// eps > 0. Strict bounds are represented exactly this way: `x < b` becomes
/// `x <= b - eps`, i.e. DeltaValue{b, -1}. Ordering is lexicographic, which
/// matches the numeric order for every sufficiently small positive eps.
struct DeltaValue {
  Rational real;
  Rational delta;

  DeltaValue() = default;
  DeltaValue(Rational r) : real(std::move(r)) {}
  DeltaValue(Rational r, Rational d) : real(std::move(r)), delta(std::move(d)) {}

  bool operator==(const DeltaValue &o) const = default;
  std::strong_ordering operator<=>(const DeltaValue &o) const {
    if (auto c = real <=> o.real; c != 0)
      return c;
    return delta <=> o.delta;
  }

  DeltaValue operator+(const DeltaValue &o) const {
    return {real + o.real, delta + o.delta};
  }
  DeltaValue operator-(const DeltaValue &o) const {
    return {real - o.real, delta - o.delta};
  }
  DeltaValue &operator+=(const DeltaValue &o) {
    real += o.real;
    delta += o.delta;
    return *this;
  }

  /// Instantiates the infinitesimal with a concrete positive value.
  Rational at(const Rational &eps) const { return real + delta * eps; }

  std::string toString() const {
    if (delta.isZero())
      return real.toString();
    return real.toString() + (delta.sign() > 0 ? "+" : "") + delta.toString() +
           "d";
  }
};

inline DeltaValue operator*(const Rational &k, const DeltaValue &v) {
  return {k * v.real, k * v.delta};
}

} // namespace poly
