#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "poly/polyhedron.hpp"

namespace poly {

/// One self-contained claim shipped with an operator result: `cert` shows
/// that every point of `premise` lies in `target`. Premises and targets are
/// plain constraint lists, so the claim can be verified with no access to
/// the operator implementations.
struct Obligation {
  CheckerPolyhedron premise;
  CheckerPolyhedron target;
  Cert cert;
};

/// Operator result plus the inclusion claims justifying it.
///
///   minimize/meet: one obligation (premise: the raw input system).
///   project:       one obligation (premise: the input polyhedron).
///   assign:        one obligation (premise: input plus primed definitions;
///                  target: the result before renaming primes back).
///   join:          two obligations (each operand includes the result).
///   widen:         none (the result is not a claimed inclusion).
struct CertifiedResult {
  Polyhedron value;
  std::vector<Obligation> obligations;
};

/// Canonicalizes a raw constraint system into a Polyhedron and proves that
/// the input implies the minimized form.
CertifiedResult minimize(std::uint32_t nvars,
                         const std::vector<Constraint> &constraints);

/// Intersection: minimize over the union of both systems (ids renumbered:
/// p1's constraints first, then p2's).
CertifiedResult meet(const Polyhedron &p1, const Polyhedron &p2);

/// Inclusion test. `cert` is present iff p1 is contained in p2, and proves
/// it over premise flatten(p1) / target flatten(p2). Otherwise
/// `counterexample` is a point of p1 outside p2.
struct InclAnswer {
  std::optional<Cert> cert;
  std::optional<SparseVector> counterexample;
};
InclAnswer incl(const Polyhedron &p1, const Polyhedron &p2);

/// Per-variable-elimination record of one Fourier-Motzkin step: how many
/// inequalities ignored the variable (zeros) or bounded it from below/above
/// (pos/neg), and how many pair combinations were generated before pruning.
struct FmStepStats {
  SparseVector::Index var;
  std::size_t zeros = 0, pos = 0, neg = 0, generated = 0;
};

/// Existential projection: eliminates `vars` from p. When `stats` is given,
/// it receives one record per Fourier-Motzkin elimination (substitutions by
/// a defining equality produce no record).
CertifiedResult project(const Polyhedron &p,
                        const std::vector<SparseVector::Index> &vars,
                        std::vector<FmStepStats> *stats = nullptr);

/// One parallel assignment clause `var := expr . x + constant`.
struct AssignClause {
  SparseVector::Index var;
  SparseVector expr;
  Rational constant;

  bool operator==(const AssignClause &o) const = default;
};

/// Parallel affine assignment: relates post-state `var`s to pre-state
/// expressions, projecting out the overwritten pre-state values.
CertifiedResult assign(const Polyhedron &p,
                       const std::vector<AssignClause> &clauses);

/// Convex hull approximation (join): the smallest polyhedron the
/// representation can express that contains both operands.
CertifiedResult join(const Polyhedron &p1, const Polyhedron &p2);

/// Standard widening: keeps the constraints of p1 that p2 still entails.
/// No certificate: widening results are not claimed inclusions of either
/// argument.
Polyhedron widen(const Polyhedron &p1, const Polyhedron &p2);

} // namespace poly
