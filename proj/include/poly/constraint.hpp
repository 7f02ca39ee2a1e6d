#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poly/sparse_vector.hpp"

namespace poly {

enum class Cmp { LE, LT, EQ };

std::string_view cmpSymbol(Cmp c);

/// Linear constraint `term . x  cmp  bound`. The representation is not forced
/// canonical: operators that need the canonical form (integer coefficients
/// with collective gcd 1, positive leading coefficient for equalities) call
/// canonical() explicitly.
struct Constraint {
  SparseVector term;
  Cmp cmp = Cmp::LE;
  Rational bound;

  Constraint() = default;
  Constraint(SparseVector t, Cmp c, Rational b)
      : term(std::move(t)), cmp(c), bound(std::move(b)) {}

  bool operator==(const Constraint &o) const = default;

  /// Constant constraint: `0 cmp bound`.
  bool isTrivial() const { return term.isEmpty(); }
  bool triviallyTrue() const;
  bool triviallyFalse() const;

  std::string toString() const;
};

/// Whether the point (a total assignment; absent indices read as 0) satisfies
/// the constraint, with strict inequalities strict.
bool satisfies(const Constraint &c, const SparseVector &point);

/// Canonical form: scales to integer coefficients with collective gcd 1; for
/// equalities additionally flips signs so the leading (lowest-index)
/// coefficient is positive. Inequalities keep their sign (only positive
/// scaling preserves them). Idempotent. Trivial constraints pass through.
Constraint canonical(const Constraint &c);

/// Farkas combination k1*c1 + k2*c2, re-canonicalized. Coefficients on
/// inequalities must be nonnegative (throws std::invalid_argument otherwise);
/// equalities accept any sign. Result comparator: EQ if both operands are EQ,
/// LT if any non-EQ operand with nonzero coefficient is LT, LE otherwise.
Constraint combine(const Rational &k1, const Constraint &c1,
                   const Rational &k2, const Constraint &c2);

/// Negation within the closed/open fragment:
///   a.x <= b  ->  -a.x < -b        a.x < b  ->  -a.x <= -b
/// Equalities are rejected (split them first).
Constraint complement(const Constraint &c);

/// Single-constraint syntactic inclusion: the k > 0 with k*a1 = a2 and
/// k*b1 <= b2, when it exists and the comparators are compatible:
///   LE source proves LE, and LT only with k*b1 strictly below b2;
///   LT source proves LE and LT;
///   EQ source proves LE, LT (strictly smaller bound), and EQ (equal bound).
/// EQ targets are only proved by EQ sources.
std::optional<Rational> syntacticIncl(const Constraint &c1, const Constraint &c2);

/// An equality constraint read as a definition of one of its variables.
struct EqDef {
  SparseVector::Index var;
  Constraint eq; // cmp == EQ, eq.term.get(var) != 0
};

struct SubstResult {
  Constraint result;
  /// Per def, the coefficient mu with result = c + sum(mu_i * def_i.eq).
  std::vector<Rational> coeffs;
};

/// Eliminates each def's variable from c by adding the right multiple of the
/// defining equality, in sequence. Defs must be triangular: a defined variable
/// never occurs in a later def's equality. The result is not re-canonicalized
/// (callers track exact combination coefficients).
SubstResult substitute(const Constraint &c, const std::vector<EqDef> &defs);

/// Parses the trace text form `<coef>*x<i> { + <coef>*x<i> } (<=|<|=) <rat>`.
/// Throws std::invalid_argument with a description on malformed input.
Constraint parseConstraint(std::string_view text);

} // namespace poly
