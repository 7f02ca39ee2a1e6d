#include <algorithm>
#include <cassert>
#include <utility>

#include "engine.hpp"

namespace poly::detail {

namespace {

/// Defensive escape hatch: a trivially false combination mid-projection means
/// the input was infeasible, which the public entry points rule out. Release
/// builds still propagate it as an emptiness witness instead of corrupting
/// the output.
struct FoundBot {
  CertFragment witness;
};

void compact(std::vector<TaggedIneq> &live, std::vector<bool> &alive) {
  std::size_t w = 0;
  for (std::size_t i = 0; i < live.size(); ++i) {
    if (!alive[i])
      continue;
    if (w != i) // guard the self-move: it would gut the fragment vector
      live[w] = std::move(live[i]);
    ++w;
  }
  live.resize(w);
  alive.assign(w, true);
}

void dedupCompact(const std::vector<TaggedEq> &eqs,
                  std::vector<TaggedIneq> &live) {
  std::vector<bool> alive(live.size(), true);
  syntacticDedup(eqs, live, alive);
  compact(live, alive);
}

/// Substitutes `v` away using the first equality that mentions it, rewriting
/// every other constraint. Equalities degenerating to 0 = 0 and inequalities
/// degenerating to constant truths disappear.
std::optional<FoundBot> eliminateByEquality(SparseVector::Index v,
                                            std::vector<TaggedEq> &eqs,
                                            std::vector<TaggedIneq> &live) {
  std::size_t ei = 0;
  while (!eqs[ei].cons.term.contains(v))
    ++ei;
  TaggedEq def = std::move(eqs[ei]);
  eqs.erase(eqs.begin() + static_cast<std::ptrdiff_t>(ei));
  const Rational dv = def.cons.term.get(v);

  std::vector<TaggedEq> keptEqs;
  keptEqs.reserve(eqs.size());
  for (TaggedEq &e : eqs) {
    Rational c = e.cons.term.get(v);
    if (!c.isZero())
      e = addEqMultiple(std::move(e), -(c / dv), def);
    if (e.cons.term.isEmpty()) {
      if (!e.cons.bound.isZero())
        return FoundBot{e.cons.bound.sign() > 0 ? std::move(e.ge)
                                                : std::move(e.le)};
      continue;
    }
    keptEqs.push_back(std::move(e));
  }
  eqs = std::move(keptEqs);

  std::vector<TaggedIneq> keptIneqs;
  keptIneqs.reserve(live.size());
  for (TaggedIneq &q : live) {
    Rational c = q.cons.term.get(v);
    if (!c.isZero())
      q = addEqMultiple(std::move(q), -(c / dv), def);
    if (q.cons.isTrivial()) {
      if (q.cons.triviallyFalse())
        return FoundBot{std::move(q.frag)};
      continue;
    }
    keptIneqs.push_back(std::move(q));
  }
  live = std::move(keptIneqs);
  dedupCompact(eqs, live);
  return std::nullopt;
}

/// Probes a row for entailment by the other rows installed in `sx`: clears
/// the row's own bound, installs the reversed bound on the opposite side (one
/// delta unit across, so the complement of a closed face is strict and vice
/// versa), and asks for a witness. On entailment the row's own bound stays
/// cleared, so it no longer supports later probes; otherwise it is restored.
bool probeEntailed(SimplexProblem &sx, const Constraint &c) {
  auto specs = sx.boundSpecs(c);
  assert(specs.size() == 1);
  const SimplexProblem::BoundSpec &spec = specs.front();
  auto savedOwn = sx.setBound(spec.var, spec.side, std::nullopt);
  assert(savedOwn && savedOwn->value == spec.value);
  bool ownUpper = spec.side == SimplexProblem::Side::Upper;
  SimplexProblem::Side opp =
      ownUpper ? SimplexProblem::Side::Lower : SimplexProblem::Side::Upper;
  DeltaValue reversed(spec.value.real,
                      spec.value.delta + Rational(ownUpper ? 1 : -1));
  auto savedOpp = sx.setBound(
      spec.var, opp,
      SimplexProblem::BoundValue{
          reversed, SimplexProblem::BoundOrigin{ConstraintId{0}, Rational()}});
  bool entailed =
      std::holds_alternative<SimplexProblem::Infeasible>(sx.check());
  sx.setBound(spec.var, opp, savedOpp);
  if (!entailed)
    sx.setBound(spec.var, spec.side, savedOwn);
  return entailed;
}

/// Exact redundancy elimination over the live inequalities: every dropped
/// row is entailed by rows that stay, so the described set never changes.
/// Large candidate sets are screened in fixed-size chunks against the
/// accepted-so-far prefix -- entailment by a subset is entailment by the
/// whole system, so dropping early is sound, and it keeps every solver sized
/// by the (small) accepted set instead of the (huge) candidate set. The
/// survivors then get one sweep against each other, since a row accepted
/// early may only become redundant once later rows are in; each survivor is
/// probed against a superset of the final system, which leaves the result
/// irredundant.
void entailmentReduce(std::uint32_t nvars, const std::vector<TaggedEq> &eqs,
                      std::vector<TaggedIneq> &live) {
  // Syntactic twins first: the solver keeps one bound per slack side (the
  // tightest), so a weaker twin's probe would find someone else's bound
  // installed where its own belongs.
  dedupCompact(eqs, live);
  constexpr std::size_t kChunk = 64;
  auto addAll = [](SimplexProblem &sx, std::uint32_t &cid, const auto &rows) {
    for (const auto &r : rows)
      sx.addConstraint(ConstraintId{cid++}, r.cons);
  };

  if (live.size() > kChunk) {
    std::vector<TaggedIneq> accepted;
    accepted.reserve(live.size());
    for (std::size_t base = 0; base < live.size(); base += kChunk) {
      std::size_t end = std::min(base + kChunk, live.size());
      SimplexProblem sx(nvars);
      std::uint32_t cid = 0;
      addAll(sx, cid, eqs);
      addAll(sx, cid, accepted);
      for (std::size_t k = base; k < end; ++k)
        sx.addConstraint(ConstraintId{cid++}, live[k].cons);
      for (std::size_t k = base; k < end; ++k)
        if (!probeEntailed(sx, live[k].cons))
          accepted.push_back(std::move(live[k]));
    }
    live = std::move(accepted);
  }

  SimplexProblem sx(nvars);
  std::uint32_t cid = 0;
  addAll(sx, cid, eqs);
  addAll(sx, cid, live);
  std::vector<bool> alive(live.size(), true);
  for (std::size_t k = 0; k < live.size(); ++k)
    if (probeEntailed(sx, live[k].cons))
      alive[k] = false;
  compact(live, alive);
}

/// One Fourier-Motzkin elimination: pairs every lower bound on `v` with every
/// upper bound, scaled so `v` cancels exactly.
///
/// Pruning is combinatorial. Each live row remembers which rows of a snapshot
/// system it combines (its ancestor set), and two classical facts about pure
/// pair elimination keep the sets small without any exactness loss:
///
///  * ancestor count (Kohler): after `fmStep + 1` eliminations from the
///    snapshot, rows combining more than `fmStep + 2` snapshot rows are
///    redundant, so such pairs are skipped before any arithmetic;
///  * ancestor subset (Chernikov): a row whose ancestor set strictly contains
///    another live row's ancestor set is redundant.
///
/// Both facts hold only for the unpruned elimination tree grown from the
/// snapshot, so nothing else may delete rows in between: no syntactic dedup,
/// and in particular no exact entailment sweep. Deleting a row any other way
/// kills its descendants, and the surviving derivations of a facet can then
/// carry inflated ancestor sets that these rules prune -- that is exactness
/// lost. The caller may still sweep between eliminations, provided it
/// restarts the snapshot (fresh singleton ancestor sets, step count zero).
/// With `filtersOn` false the rules are disabled and the caller is expected
/// to sweep after every step instead.
std::optional<FoundBot> eliminateByPairs(SparseVector::Index v,
                                         std::vector<TaggedIneq> &live,
                                         std::size_t fmStep, bool filtersOn,
                                         std::vector<FmStepStats> *stats) {
  std::vector<TaggedIneq> zeros, pos, neg;
  for (TaggedIneq &q : live) {
    int s = q.cons.term.get(v).sign();
    (s == 0 ? zeros : s > 0 ? pos : neg).push_back(std::move(q));
  }
  if (stats)
    stats->push_back(
        {v, zeros.size(), pos.size(), neg.size(), pos.size() * neg.size()});

  live = std::move(zeros);
  for (const TaggedIneq &p : pos) {
    const Rational a = p.cons.term.get(v);
    for (const TaggedIneq &n : neg) {
      AncestorSet u = p.anc;
      u.unionWith(n.anc);
      if (filtersOn && u.count() > fmStep + 2)
        continue;
      const Rational b = n.cons.term.get(v);
      TaggedIneq combo;
      combo.cons.term = (-b) * p.cons.term + a * n.cons.term;
      combo.cons.bound = (-b) * p.cons.bound + a * n.cons.bound;
      combo.cons.cmp = p.cons.cmp == Cmp::LT || n.cons.cmp == Cmp::LT
                           ? Cmp::LT
                           : Cmp::LE;
      combo.frag = fragScaleConcat(-b, p.frag, a, n.frag);
      combo.anc = u;
      assert(!combo.cons.term.contains(v));
      if (combo.cons.isTrivial()) {
        if (combo.cons.triviallyFalse())
          return FoundBot{std::move(combo.frag)};
        continue;
      }
      live.push_back(canonicalTagged(std::move(combo)));
    }
  }
  if (!filtersOn || live.empty())
    return std::nullopt;

  // Ancestor-subset rule. Kills are sound regardless of the witness's own
  // fate: a witness killed later has a strictly smaller witness of its own,
  // and the chain bottoms out at a surviving minimal set. Equal sets never
  // kill each other, so duplicate derivations of one row both stay until the
  // next exact sweep.
  std::vector<bool> alive(live.size(), true);
  for (std::size_t i = 0; i < live.size(); ++i) {
    if (!alive[i])
      continue;
    for (std::size_t j = i + 1; j < live.size(); ++j) {
      if (!alive[j])
        continue;
      if (live[i].anc.subsetOf(live[j].anc)) {
        if (live[i].anc == live[j].anc)
          continue;
        alive[j] = false;
      } else if (live[j].anc.subsetOf(live[i].anc)) {
        alive[i] = false;
        break;
      }
    }
  }
  compact(live, alive);
  return std::nullopt;
}

} // namespace

ProjectedSystem projectTagged(std::uint32_t nvars, std::vector<TaggedEq> eqs,
                              std::vector<TaggedIneq> ineqs,
                              const std::vector<SparseVector::Index> &vars,
                              bool fixedOrder,
                              std::vector<FmStepStats> *stats) {
  // Canonical intake; raw systems (the hull construction feeds one) may
  // carry trivial rows.
  std::vector<TaggedEq> eql;
  for (TaggedEq &e : eqs) {
    assert(e.cons.cmp == Cmp::EQ);
    if (e.cons.isTrivial()) {
      assert(e.cons.bound.isZero());
      continue;
    }
    eql.push_back(canonicalTagged(std::move(e)));
  }
  std::vector<TaggedIneq> live;
  for (TaggedIneq &q : ineqs) {
    assert(q.cons.cmp != Cmp::EQ);
    if (q.cons.isTrivial()) {
      assert(q.cons.triviallyTrue());
      continue;
    }
    live.push_back(canonicalTagged(std::move(q)));
  }

  std::vector<SparseVector::Index> remaining = vars;
  if (!fixedOrder) {
    std::sort(remaining.begin(), remaining.end());
    remaining.erase(std::unique(remaining.begin(), remaining.end()),
                    remaining.end());
  }

  auto hasEq = [&](SparseVector::Index v) {
    return std::any_of(eql.begin(), eql.end(), [&](const TaggedEq &e) {
      return e.cons.term.contains(v);
    });
  };

  // Combinatorial-filter phase state (see eliminateByPairs). A snapshot
  // restart re-arms the filters; systems too large for the fixed-width
  // ancestor masks fall back to an exact sweep after every step, which
  // itself restarts the snapshot each time.
  bool filtersOn = false;
  std::size_t fmStep = 0;
  bool mayBeRedundant = false;
  auto resetBaseline = [&] {
    fmStep = 0;
    filtersOn = live.size() <= AncestorSet::kCapacity;
    if (filtersOn)
      for (std::size_t i = 0; i < live.size(); ++i)
        live[i].anc.reset(i);
  };
  resetBaseline();
  // A step's output can exceed what one exact sweep would keep; past this
  // size the sweep runs early to stop compounding growth.
  constexpr std::size_t kSweepTrigger = 512;

  while (!remaining.empty()) {
    std::size_t pick = 0;
    if (!fixedOrder) {
      // Equality-backed variables eliminate for free; otherwise greedily
      // take the smallest upper*lower pair product. `remaining` is sorted,
      // so scanning forward with strict improvement breaks ties towards the
      // smallest variable.
      std::optional<std::size_t> eqPick;
      std::size_t bestScore = 0;
      for (std::size_t i = 0; i < remaining.size(); ++i) {
        if (hasEq(remaining[i])) {
          eqPick = i;
          break;
        }
        std::size_t up = 0, down = 0;
        for (const TaggedIneq &q : live) {
          int s = q.cons.term.get(remaining[i]).sign();
          up += s > 0;
          down += s < 0;
        }
        std::size_t score = up * down;
        if (i == 0 || score < bestScore) {
          bestScore = score;
          pick = i;
        }
      }
      if (eqPick)
        pick = *eqPick;
    }
    SparseVector::Index v = remaining[pick];
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));

    std::optional<FoundBot> bot;
    if (hasEq(v)) {
      bot = eliminateByEquality(v, eql, live);
      if (!bot) {
        // Substitution rewrote rows in place, which preserves irredundancy
        // but invalidates every ancestor set.
        resetBaseline();
      }
    } else {
      bot = eliminateByPairs(v, live, fmStep, filtersOn, stats);
      if (!bot) {
        if (!filtersOn || live.size() > kSweepTrigger) {
          entailmentReduce(nvars, eql, live);
          mayBeRedundant = false;
          resetBaseline();
        } else {
          ++fmStep;
          mayBeRedundant = true;
        }
      }
    }
    if (bot) {
      assert(false && "projection of a feasible system hit a contradiction");
      return {std::move(bot->witness), {}, {}};
    }
  }
  if (mayBeRedundant)
    entailmentReduce(nvars, eql, live);
  return {std::nullopt, std::move(eql), std::move(live)};
}

CertifiedResult passThroughBot(const Polyhedron &p) {
  CheckerPolyhedron premise = p.flatten();
  CertFragment witness = p.botWitness();
  Polyhedron value = Polyhedron::bottom(p.numVars(), premise, witness);
  CheckerPolyhedron target = value.flatten();
  return {std::move(value),
          {Obligation{std::move(premise), std::move(target),
                      EmptyCert{std::move(witness)}}}};
}

} // namespace poly::detail

namespace poly {

namespace {

/// Identity-tagged views of a polyhedron's own constraints.
void seedFromPolyhedron(const Polyhedron &p,
                        std::vector<detail::TaggedEq> &eqs,
                        std::vector<detail::TaggedIneq> &ineqs) {
  for (const DefinedEq &d : p.eqs())
    eqs.push_back(
        {d.cons, {{Rational(1), d.id}}, {{Rational(-1), d.id}}});
  for (const auto &[id, c] : p.ineqs())
    ineqs.push_back({c, {{Rational(1), id}}});
}

} // namespace

CertifiedResult project(const Polyhedron &p,
                        const std::vector<SparseVector::Index> &vars,
                        std::vector<FmStepStats> *stats) {
  if (p.isBot())
    return detail::passThroughBot(p);

  CheckerPolyhedron premise = p.flatten();
  std::vector<detail::TaggedEq> eqs;
  std::vector<detail::TaggedIneq> ineqs;
  seedFromPolyhedron(p, eqs, ineqs);

  detail::ProjectedSystem ps = detail::projectTagged(
      p.numVars(), std::move(eqs), std::move(ineqs), vars, false, stats);

  detail::MinimizedSystem sys;
  if (ps.botWitness) {
    sys.botWitness = std::move(ps.botWitness);
  } else {
    // Elimination keeps the system minimal but unsolves the equalities;
    // re-echelon to restore the defined-variable form.
    std::vector<bool> alive(ps.ineqs.size(), true);
    sys.eqs = detail::echelonTagged(std::move(ps.eqs), ps.ineqs, alive);
    for (std::size_t i = 0; i < ps.ineqs.size(); ++i)
      if (alive[i])
        sys.ineqs.push_back(std::move(ps.ineqs[i]));
  }
  auto [value, cert] =
      detail::assembleValue(p.numVars(), std::move(sys), premise);
  CheckerPolyhedron target = value.flatten();
  return {std::move(value),
          {Obligation{std::move(premise), std::move(target), std::move(cert)}}};
}

} // namespace poly
