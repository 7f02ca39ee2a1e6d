#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "poly/certificate.hpp"
#include "poly/constraint.hpp"
#include "poly/delta.hpp"

namespace poly {

/// Incremental feasibility solver for conjunctions of linear rational
/// constraints, organized as a general simplex over delta-rationals:
///
///  - every constraint term is scaled to a canonical positive-leading form
///    and mapped to a *slack variable* (multi-variable terms get a fresh
///    variable defined by a row; a lone `1*x` is its own slack), so
///    constraints on the same hyperplane share one slack;
///  - the constraint itself becomes an upper and/or lower bound on that
///    slack, strictness encoded in the infinitesimal component;
///  - a Bland-rule repair loop pivots until either every variable sits within
///    its bounds (Feasible, with an exact rational model) or some row is
///    stuck (Infeasible, with the multipliers of the bounds that clashed).
///
/// Bounds are replaceable: callers probe hypotheses by swapping a bound in,
/// solving, and swapping the old bound back. Rows created for probe terms
/// stay behind; an unbounded slack never influences later outcomes.
class SimplexProblem {
public:
  using VarId = std::uint32_t;
  enum class Side { Lower, Upper };

  /// Which premise constraint a bound came from, and the coefficient a unit
  /// multiplier on this bound contributes against that constraint in an
  /// infeasibility witness. Negative factors arise only from equalities
  /// (each equality feeds both bound sides with opposite signs).
  struct BoundOrigin {
    ConstraintId cid;
    Rational factor;
  };

  struct BoundValue {
    DeltaValue value;
    std::optional<BoundOrigin> origin;
  };

  /// Placement of one constraint onto a slack: install `value` on `side` of
  /// `var`; a unit multiplier on that bound stands for `factor` times the
  /// constraint. LE/LT constraints produce one spec, EQ two.
  struct BoundSpec {
    VarId var;
    Side side;
    DeltaValue value;
    Rational factor;
  };

  /// Multipliers over premise constraint ids whose combination is trivially
  /// false. Multipliers are positive except against equalities, and the
  /// smallest positive one is scaled to 1.
  using UnsatWitness = std::vector<std::pair<ConstraintId, Rational>>;

  struct Feasible {
    /// Exact rational model over the original variables (absent index = 0),
    /// with the infinitesimal instantiated small enough for every strict
    /// bound.
    SparseVector point;
  };
  struct Infeasible {
    UnsatWitness witness;
  };
  using Outcome = std::variant<Feasible, Infeasible>;

  /// Original (exterior) variables are [0, numVars); slacks are assigned
  /// upwards from numVars.
  explicit SimplexProblem(std::uint32_t numVars);

  std::uint32_t numVars() const { return nOriginal; }

  /// Slack variable for a gcd-normalized, positive-leading term over the
  /// original variables; creates the defining row on first sight.
  VarId slackForTerm(const SparseVector &term);

  /// Where the constraint's bounds would land (creating the slack if
  /// needed). Does not install anything. The constraint must be nontrivial.
  std::vector<BoundSpec> boundSpecs(const Constraint &c);

  /// Installs the constraint's bounds, keeping the tighter value when the
  /// slot is already occupied (ties keep the incumbent, so earlier ids win).
  void addConstraint(ConstraintId id, const Constraint &c);

  const std::optional<BoundValue> &bound(VarId v, Side s) const;

  /// Replaces (or clears) one bound slot and returns the previous occupant,
  /// which the caller is expected to restore after probing. Replacement,
  /// not conjunction: tightness decisions are the caller's.
  std::optional<BoundValue> setBound(VarId v, Side s,
                                     std::optional<BoundValue> b);

  Outcome check();

  /// Structural health: rows evaluate exactly to their basic variable's
  /// value and reference only nonbasic variables; every nonbasic variable
  /// sits within its (non-crossed) bounds.
  bool invariantHolds() const;

private:
  struct VarState {
    std::optional<BoundValue> lower, upper;
    DeltaValue value;
    bool basic = false;
    /// Index into `rows` while basic, -1 otherwise. Slots are stable: a pivot
    /// rewrites the leaving variable's row in place for the entering one.
    std::int32_t rowSlot = -1;
  };

  /// One tableau row: the defining expansion of its basic variable over
  /// nonbasic variables, sorted by variable id with no zero coefficients.
  /// Rows are flat and mutated in place; the persistent-trie vectors used
  /// everywhere else are too allocation-heavy for the pivot loop.
  using RowEntry = std::pair<VarId, Rational>;
  struct Row {
    VarId basicVar;
    std::vector<RowEntry> entries;
  };

  static const Rational *find(const std::vector<RowEntry> &entries, VarId j);
  /// dst += c * src, keeping dst sorted and zero-free. Entries untouched by
  /// src are moved, not copied, and the scratch buffer is reused across
  /// calls, so steady-state merges allocate only for coefficients that
  /// actually change.
  void addScaledRow(std::vector<RowEntry> &dst, const Rational &c,
                    const std::vector<RowEntry> &src);
  DeltaValue eval(const std::vector<RowEntry> &entries) const;
  void update(VarId j, const DeltaValue &v);
  void pivotAndUpdate(VarId i, VarId j, const DeltaValue &target);
  Infeasible stuckWitness(VarId bad, bool belowLower) const;

  std::uint32_t nOriginal;
  std::vector<VarState> vars;
  std::map<SparseVector, VarId> slackByTerm;
  std::vector<Row> rows;
  std::vector<RowEntry> scratch;
};

} // namespace poly
