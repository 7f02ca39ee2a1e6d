#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "poly/domain.hpp"
#include "poly/simplex.hpp"

/// Shared machinery of the certified operators. Everything here carries
/// constraints together with *fragments*: combination recipes over some fixed
/// premise system. The invariant maintained throughout is entailment at scale
/// one — recombining a fragment yields a constraint with exactly the stated
/// term whose bound is at most the stated bound (and a comparator at least as
/// strong), so the final checker comparison always goes through. Most steps
/// preserve the stronger property that the recombination is the constraint,
/// exactly; implicit-equality promotion is the one step that can leave a gap,
/// since the infeasibility witness it builds on may overshoot the bound.
namespace poly::detail {

/// Set of snapshot rows a derived row combines, as a fixed-width bitmask.
/// Scratch space for the elimination filters in projectTagged; meaningless
/// everywhere else.
struct AncestorSet {
  std::array<std::uint64_t, 4> w{};

  static constexpr std::size_t kCapacity = 256;

  void reset(std::size_t i) {
    w = {};
    w[i / 64] = std::uint64_t(1) << (i % 64);
  }
  void unionWith(const AncestorSet &o) {
    for (std::size_t k = 0; k < w.size(); ++k)
      w[k] |= o.w[k];
  }
  std::size_t count() const {
    std::size_t n = 0;
    for (std::uint64_t word : w)
      n += static_cast<std::size_t>(std::popcount(word));
    return n;
  }
  bool subsetOf(const AncestorSet &o) const {
    for (std::size_t k = 0; k < w.size(); ++k)
      if (w[k] & ~o.w[k])
        return false;
    return true;
  }
  bool operator==(const AncestorSet &o) const = default;
};

/// Inequality (LE/LT) with its rebuild recipe.
struct TaggedIneq {
  Constraint cons;
  CertFragment frag;
  AncestorSet anc;
};

/// Equality with one recipe per direction: `le` rebuilds (term <= bound),
/// `ge` rebuilds (-term <= -bound). Either recombination may itself be an
/// equality, which entails the corresponding half.
struct TaggedEq {
  Constraint cons;
  CertFragment le, ge;
};

/// gcd-canonicalization, rescaling the fragments to match. Flipping an
/// equality's sign swaps the two directions.
TaggedIneq canonicalTagged(TaggedIneq v);
TaggedEq canonicalTagged(TaggedEq v);

/// target + mu * def (an equality), fragments following along; the result is
/// re-canonicalized.
TaggedIneq addEqMultiple(TaggedIneq target, const Rational &mu,
                         const TaggedEq &def);
TaggedEq addEqMultiple(TaggedEq target, const Rational &mu,
                       const TaggedEq &def);

/// Syntactic pruning among the live inequalities: groups constraints by the
/// hyperplane normal (positive-leading scaled term), keeps only the tightest
/// bound per side, earliest first on ties, and treats equality sides as
/// unbeatable incumbents. Bounds crossing an equality's are left alone for
/// the solver to refute. Clears `alive` flags; never reorders.
void syntacticDedup(const std::vector<TaggedEq> &eqs,
                    const std::vector<TaggedIneq> &ineqs,
                    std::vector<bool> &alive);

/// An equality in solved form: `var` is the pivot of `cons`.
struct OutEq {
  SparseVector::Index var;
  Constraint cons;
  CertFragment le, ge;
};

/// Row-echelon pass: reduces each equality by the previous definitions (in
/// order) and picks its pivot variable, preferring variables that occur in
/// no live inequality (so substitution leaves them untouched), smallest
/// index otherwise; 0 = 0 leftovers disappear. Then substitutes the
/// definitions out of the live inequalities, dropping any that become
/// trivially true. The result is triangular: a pivot never occurs in a later
/// definition, nor in any surviving inequality.
std::vector<OutEq> echelonTagged(std::vector<TaggedEq> eqs,
                                 std::vector<TaggedIneq> &ineqs,
                                 std::vector<bool> &alive);

struct MinimizedSystem {
  /// Engaged iff the system is infeasible; the fragment recombines to a
  /// trivially false constraint over the premise system.
  std::optional<CertFragment> botWitness;
  std::vector<OutEq> eqs;
  std::vector<TaggedIneq> ineqs;
};

/// Full minimization: trivial filtering, syntactic pruning, feasibility,
/// implicit-equality promotion, echelon substitution, and per-constraint
/// redundancy elimination. Fragments in are fragments out: pass identity
/// recipes to minimize a raw system, or the outputs of a previous stage to
/// chain certified stages without a composition pass.
MinimizedSystem minimizeTagged(std::uint32_t nvars, std::vector<TaggedEq> eqs,
                               std::vector<TaggedIneq> ineqs);

struct ProjectedSystem {
  std::optional<CertFragment> botWitness; // defensive; see projectTagged
  std::vector<TaggedEq> eqs;
  std::vector<TaggedIneq> ineqs;
};

/// Existential elimination of `vars`, one at a time: substitution by an
/// equality containing the variable when one exists, Fourier-Motzkin pair
/// combination otherwise, with syntactic pruning every step and an
/// entailment-based redundancy sweep after each FM step. Elimination order
/// is greedy (equality-backed variables first, then the smallest pair
/// product |E+| * |E-|) unless `fixedOrder` asks for exactly the given
/// order. Appends one record per FM step to `stats` when given. The output
/// equalities are not in solved form; run echelonTagged (or a full
/// minimizeTagged) afterwards.
ProjectedSystem projectTagged(std::uint32_t nvars, std::vector<TaggedEq> eqs,
                              std::vector<TaggedIneq> ineqs,
                              const std::vector<SparseVector::Index> &vars,
                              bool fixedOrder, std::vector<FmStepStats> *stats);

/// Packs a minimized system into a Polyhedron plus the certificate items
/// proving each output constraint from the premise: fresh sequential ids,
/// equalities first, one item per inequality and a (le, ge) item pair per
/// equality.
std::pair<Polyhedron, Cert> assembleValue(std::uint32_t nvars,
                                          MinimizedSystem sys,
                                          const CheckerPolyhedron &premise);

/// A Bot input handed through unchanged, its stored witness as the proof.
CertifiedResult passThroughBot(const Polyhedron &p);

/// Entailment oracle against one fixed non-Bot polyhedron, sharing a single
/// incremental solver across queries. Each query substitutes the defining
/// equalities into the candidate and then asks whether the inequalities force
/// it (complement probe). Used by the inclusion test and by widening.
class EntailEngine {
public:
  explicit EntailEngine(const Polyhedron &p);

  /// Fragment over p's constraint ids proving `target` (which must not be an
  /// equality after substitution splits; pass inequality halves), or the
  /// violating point of p.
  std::variant<CertFragment, SparseVector> prove(const Constraint &target);

  /// A point of p (which is nonempty by construction).
  SparseVector anyPoint();

  /// Substitutes p's defining equalities into c, returning the rewritten
  /// constraint and the fragment entries (mu-multiples of the definitions)
  /// that must be *subtracted* from a proof of the rewritten form to obtain
  /// a proof of c itself.
  std::pair<Constraint, CertFragment> reduce(const Constraint &c) const;

private:
  SparseVector lift(SparseVector pt) const;

  const Polyhedron &poly;
  std::vector<EqDef> defs;
  SimplexProblem sx;
  ConstraintId sentinel;
};

} // namespace poly::detail
