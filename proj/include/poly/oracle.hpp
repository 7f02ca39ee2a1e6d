#pragma once

#include <cstdint>
#include <vector>

#include "poly/constraint.hpp"

namespace poly::oracle {

/// Reference implementations for cross-checking: dense, brute-force, and
/// deliberately independent of the solver machinery. Everything here trades
/// speed for obviousness; nothing is shared with the operators under test.

using Point = std::vector<Rational>;

/// Dense dot product `a . x`; indices beyond the point read as zero.
Rational evalAt(const SparseVector &a, const Point &x);
bool satisfiesAt(const Constraint &c, const Point &x);
bool satisfiesAllAt(const std::vector<Constraint> &cs, const Point &x);

/// Split every equality into its two closed halves.
std::vector<Constraint> splitEqs(std::vector<Constraint> cs);

/// Textbook one-variable elimination: each (upper, lower) pair combines into
/// one row, rows without the variable pass through, nothing is simplified or
/// deduplicated. Equalities must be split first.
std::vector<Constraint> fmEliminate(std::vector<Constraint> cs,
                                    SparseVector::Index var);

/// Eliminate the listed variables in order. Splits equalities first.
std::vector<Constraint> fmProject(std::vector<Constraint> cs,
                                  const std::vector<SparseVector::Index> &vars);

/// Complete satisfiability decision: eliminate every variable and read the
/// surviving constant rows.
bool fmFeasible(std::uint32_t nvars, std::vector<Constraint> cs);

/// Does the system force the constraint? Decided by refuting the complement
/// (both halves for an equality target).
bool fmEntails(std::uint32_t nvars, const std::vector<Constraint> &sys,
               const Constraint &c);

/// Mutual entailment over the same variable space.
bool sameSet(std::uint32_t nvars, const std::vector<Constraint> &a,
             const std::vector<Constraint> &b);

enum class SolveKind { Inconsistent, Unique, Underdetermined };
struct SolveResult {
  SolveKind kind;
  Point point; ///< Populated only when kind is Unique.
};

/// Gauss-Jordan elimination on a dense m-by-k rational system `a x = b`.
SolveResult solveDense(std::vector<std::vector<Rational>> a,
                       std::vector<Rational> b);

/// Every vertex of a closed system in at most four dimensions, found by
/// solving each n-subset of rows as equations and keeping solutions that
/// satisfy everything. Sorted and deduplicated.
std::vector<Point> vertexEnum(std::uint32_t nvars,
                              const std::vector<Constraint> &cs);

/// Is the point a convex combination of the given points? Searches affinely
/// independent subsets of at most dim+1 of them.
bool convMember(const Point &p, const std::vector<Point> &verts);

/// Constraints on recession directions: every row relaxed to bound zero.
std::vector<Constraint> recessionRows(const std::vector<Constraint> &cs);

/// No nonzero direction stays inside the system forever.
bool isBounded(std::uint32_t nvars, const std::vector<Constraint> &cs);

} // namespace poly::oracle
