#include "engine.hpp"

#include <cassert>
#include <cstddef>
#include <map>
#include <utility>

namespace poly::detail {

namespace {

CertFragment scaleFrag(const Rational &k, const CertFragment &f) {
  return fragScaleConcat(k, f, Rational(), {});
}

CertFragment addFrag(CertFragment acc, const CertFragment &f) {
  return fragScaleConcat(Rational(1), acc, Rational(1), f);
}

/// Placement of a constraint's hyperplane: positive-leading scaled term plus
/// the bound expressed as an upper or lower limit on it. Mirrors how the
/// solver assigns bound slots, which is what syntacticDedup deduplicates
/// against.
struct SlackForm {
  SparseVector term;
  bool upper;
  DeltaValue value;
};

SlackForm slackForm(const Constraint &c) {
  assert(!c.term.isEmpty());
  auto [t, g] = gcdNormalize(c.term);
  Rational b = c.bound / g;
  bool flip = t.leadingCoeff().sign() < 0;
  if (flip) {
    t = -t;
    b = -b;
  }
  // Unflipped `t <= b` is an upper limit; flipping turns it into a lower one.
  // Strictness moves the limit inwards by one infinitesimal.
  int d = c.cmp == Cmp::LT ? (flip ? 1 : -1) : 0;
  return {std::move(t), !flip, DeltaValue(std::move(b), Rational(d))};
}

/// The two limits an equality places on its hyperplane.
std::pair<SlackForm, SlackForm> eqSlackForms(const Constraint &c) {
  assert(c.cmp == Cmp::EQ && !c.term.isEmpty());
  auto [t, g] = gcdNormalize(c.term);
  Rational b = c.bound / g;
  if (t.leadingCoeff().sign() < 0) {
    t = -t;
    b = -b;
  }
  SlackForm up{t, true, DeltaValue(b)};
  SlackForm lo{std::move(t), false, DeltaValue(std::move(b))};
  return {std::move(up), std::move(lo)};
}

} // namespace

TaggedIneq canonicalTagged(TaggedIneq v) {
  if (v.cons.term.isEmpty())
    return v;
  auto [t, g] = gcdNormalize(v.cons.term);
  if (!(g == Rational(1))) {
    Rational inv = g.reciprocal();
    v.cons.term = std::move(t);
    v.cons.bound = v.cons.bound * inv;
    v.frag = scaleFrag(inv, v.frag);
  }
  return v;
}

TaggedEq canonicalTagged(TaggedEq v) {
  assert(v.cons.cmp == Cmp::EQ);
  if (v.cons.term.isEmpty())
    return v;
  auto [t, g] = gcdNormalize(v.cons.term);
  if (!(g == Rational(1))) {
    Rational inv = g.reciprocal();
    v.cons.term = std::move(t);
    v.cons.bound = v.cons.bound * inv;
    v.le = scaleFrag(inv, v.le);
    v.ge = scaleFrag(inv, v.ge);
  }
  if (v.cons.term.leadingCoeff().sign() < 0) {
    v.cons.term = -v.cons.term;
    v.cons.bound = -v.cons.bound;
    std::swap(v.le, v.ge);
  }
  return v;
}

TaggedIneq addEqMultiple(TaggedIneq target, const Rational &mu,
                         const TaggedEq &def) {
  if (mu.isZero())
    return target;
  target.cons.term = target.cons.term + mu * def.cons.term;
  target.cons.bound = target.cons.bound + mu * def.cons.bound;
  target.frag = mu.sign() > 0
                    ? fragScaleConcat(Rational(1), target.frag, mu, def.le)
                    : fragScaleConcat(Rational(1), target.frag, -mu, def.ge);
  return canonicalTagged(std::move(target));
}

TaggedEq addEqMultiple(TaggedEq target, const Rational &mu,
                       const TaggedEq &def) {
  if (mu.isZero())
    return target;
  target.cons.term = target.cons.term + mu * def.cons.term;
  target.cons.bound = target.cons.bound + mu * def.cons.bound;
  if (mu.sign() > 0) {
    target.le = fragScaleConcat(Rational(1), target.le, mu, def.le);
    target.ge = fragScaleConcat(Rational(1), target.ge, mu, def.ge);
  } else {
    target.le = fragScaleConcat(Rational(1), target.le, -mu, def.ge);
    target.ge = fragScaleConcat(Rational(1), target.ge, -mu, def.le);
  }
  return canonicalTagged(std::move(target));
}

void syntacticDedup(const std::vector<TaggedEq> &eqs,
                    const std::vector<TaggedIneq> &ineqs,
                    std::vector<bool> &alive) {
  assert(alive.size() == ineqs.size());
  // Per hyperplane, the tightest limit seen on each side and who holds it;
  // owner -1 marks an equality side, which no inequality may displace (a
  // strictly tighter inequality stays alive alongside it and the solver
  // reports the contradiction).
  struct Slot {
    DeltaValue value;
    std::ptrdiff_t owner;
  };
  struct Sides {
    std::optional<Slot> lower, upper;
  };
  std::map<SparseVector, Sides> table;

  auto seed = [&](const SlackForm &f) {
    Sides &s = table[f.term];
    std::optional<Slot> &slot = f.upper ? s.upper : s.lower;
    bool tighter =
        !slot || (f.upper ? f.value < slot->value : slot->value < f.value);
    if (tighter)
      slot = Slot{f.value, -1};
  };
  for (const TaggedEq &e : eqs) {
    auto [up, lo] = eqSlackForms(e.cons);
    seed(up);
    seed(lo);
  }

  for (std::size_t i = 0; i < ineqs.size(); ++i) {
    if (!alive[i])
      continue;
    SlackForm f = slackForm(ineqs[i].cons);
    Sides &s = table[f.term];
    std::optional<Slot> &slot = f.upper ? s.upper : s.lower;
    if (slot) {
      bool dominated =
          f.upper ? !(f.value < slot->value) : !(slot->value < f.value);
      if (dominated) {
        alive[i] = false;
        continue;
      }
      if (slot->owner < 0)
        continue; // tighter than an equality: leave both for the solver
      alive[static_cast<std::size_t>(slot->owner)] = false;
    }
    slot = Slot{std::move(f.value), static_cast<std::ptrdiff_t>(i)};
  }
}

std::vector<OutEq> echelonTagged(std::vector<TaggedEq> eqs,
                                 std::vector<TaggedIneq> &ineqs,
                                 std::vector<bool> &alive) {
  assert(alive.size() == ineqs.size());
  std::vector<OutEq> defs;
  for (TaggedEq &e : eqs) {
    for (const OutEq &d : defs) {
      Rational c = e.cons.term.get(d.var);
      if (!c.isZero())
        e = addEqMultiple(std::move(e), -(c / d.cons.term.get(d.var)),
                          TaggedEq{d.cons, d.le, d.ge});
    }
    if (e.cons.term.isEmpty()) {
      // Dependent equality; a nonzero residue would mean an infeasible
      // system, which the callers have already ruled out.
      assert(e.cons.bound.isZero());
      continue;
    }
    e = canonicalTagged(std::move(e));
    // Prefer a pivot the inequalities never mention, so substitution leaves
    // them untouched (and keeps the variable that "matters" in them free).
    std::optional<SparseVector::Index> pivot;
    e.cons.term.forEach([&](SparseVector::Index v, const Rational &) {
      if (pivot)
        return;
      for (std::size_t i = 0; i < ineqs.size(); ++i)
        if (alive[i] && ineqs[i].cons.term.contains(v))
          return;
      pivot = v;
    });
    SparseVector::Index pv = pivot ? *pivot : *e.cons.term.minIndex();
    // Back-substitute the new pivot out of the earlier definitions so every
    // defined variable appears in its own row only. The new row carries no
    // earlier pivot (the loop above removed them), so this cannot disturb
    // the earlier definitions' own variables.
    for (OutEq &d : defs) {
      Rational c = d.cons.term.get(pv);
      if (c.isZero())
        continue;
      TaggedEq t{std::move(d.cons), std::move(d.le), std::move(d.ge)};
      t = addEqMultiple(std::move(t), -(c / e.cons.term.get(pv)),
                        TaggedEq{e.cons, e.le, e.ge});
      d.cons = std::move(t.cons);
      d.le = std::move(t.le);
      d.ge = std::move(t.ge);
    }
    defs.push_back({pv, std::move(e.cons), std::move(e.le), std::move(e.ge)});
  }

  for (std::size_t i = 0; i < ineqs.size(); ++i) {
    if (!alive[i])
      continue;
    TaggedIneq &q = ineqs[i];
    for (const OutEq &d : defs) {
      Rational c = q.cons.term.get(d.var);
      if (!c.isZero())
        q = addEqMultiple(std::move(q), -(c / d.cons.term.get(d.var)),
                          TaggedEq{d.cons, d.le, d.ge});
    }
    if (q.cons.isTrivial()) {
      assert(q.cons.triviallyTrue());
      alive[i] = false;
    }
  }
  return defs;
}

MinimizedSystem minimizeTagged(std::uint32_t nvars, std::vector<TaggedEq> eqs0,
                               std::vector<TaggedIneq> ineqs0) {
  // Trivial filtering; all later stages assume nonempty terms.
  std::vector<TaggedEq> eqs;
  for (TaggedEq &e : eqs0) {
    assert(e.cons.cmp == Cmp::EQ);
    if (e.cons.isTrivial()) {
      if (e.cons.bound.isZero())
        continue;
      // 0 = b with b != 0: one direction reads 0 <= -|b|.
      return {e.cons.bound.sign() > 0 ? std::move(e.ge) : std::move(e.le),
              {},
              {}};
    }
    eqs.push_back(canonicalTagged(std::move(e)));
  }
  std::vector<TaggedIneq> ineqs;
  for (TaggedIneq &q : ineqs0) {
    assert(q.cons.cmp != Cmp::EQ);
    if (q.cons.isTrivial()) {
      if (q.cons.triviallyFalse())
        return {std::move(q.frag), {}, {}};
      continue;
    }
    ineqs.push_back(canonicalTagged(std::move(q)));
  }

  const std::size_t eqCount = eqs.size();
  std::vector<bool> alive(ineqs.size(), true);
  syntacticDedup(eqs, ineqs, alive);

  // Internal constraint ids: equalities first, then inequalities by position.
  // They label solver bounds; the fragments they resolve to are premise-space
  // recipes, so witnesses fold straight into premise fragments.
  auto dirFrag = [&](ConstraintId cid, const Rational &coef) {
    if (cid.value < eqCount) {
      const TaggedEq &e = eqs[cid.value];
      return coef.sign() >= 0 ? scaleFrag(coef, e.le) : scaleFrag(-coef, e.ge);
    }
    assert(coef.sign() > 0);
    return scaleFrag(coef, ineqs[cid.value - eqCount].frag);
  };
  auto foldWitness = [&](const SimplexProblem::UnsatWitness &w) {
    CertFragment acc;
    for (const auto &[cid, coef] : w)
      acc = addFrag(std::move(acc), dirFrag(cid, coef));
    return acc;
  };

  SimplexProblem sx(nvars);
  for (std::size_t k = 0; k < eqs.size(); ++k)
    sx.addConstraint(ConstraintId{static_cast<std::uint32_t>(k)}, eqs[k].cons);
  for (std::size_t k = 0; k < ineqs.size(); ++k)
    if (alive[k])
      sx.addConstraint(ConstraintId{static_cast<std::uint32_t>(eqCount + k)},
                       ineqs[k].cons);

  {
    auto out = sx.check();
    if (auto *inf = std::get_if<SimplexProblem::Infeasible>(&out))
      return {foldWitness(inf->witness), {}, {}};
  }

  // Implicit equality promotion: an inequality that cannot be strict
  // anywhere holds with equality everywhere. Probe each one by swapping in
  // the strict version of its own bound; an infeasibility witness is then a
  // nonnegative combination of the *other* constraints entailing the
  // reverse direction. Promoted bounds stay installed: every inequality
  // supporting the reverse direction is itself tight everywhere, so it is
  // promoted by its own probe and never lost.
  std::vector<TaggedEq> promoted;
  for (std::size_t k = 0; k < ineqs.size(); ++k) {
    if (!alive[k] || ineqs[k].cons.cmp == Cmp::LT)
      continue;
    auto specs = sx.boundSpecs(ineqs[k].cons);
    assert(specs.size() == 1);
    const SimplexProblem::BoundSpec &spec = specs.front();
    ConstraintId cid{static_cast<std::uint32_t>(eqCount + k)};
    DeltaValue strictValue(
        spec.value.real,
        spec.value.delta +
            Rational(spec.side == SimplexProblem::Side::Upper ? -1 : 1));
    auto saved =
        sx.setBound(spec.var, spec.side,
                    SimplexProblem::BoundValue{
                        strictValue, SimplexProblem::BoundOrigin{cid, spec.factor}});
    assert(saved && saved->origin && saved->origin->cid == cid);
    auto out = sx.check();
    sx.setBound(spec.var, spec.side, saved);
    if (auto *inf = std::get_if<SimplexProblem::Infeasible>(&out)) {
      Rational lambda;
      for (const auto &[wid, coef] : inf->witness)
        if (wid == cid)
          lambda = coef;
      assert(lambda.sign() > 0);
      CertFragment ge;
      for (const auto &[wid, coef] : inf->witness)
        if (!(wid == cid))
          ge = addFrag(std::move(ge), dirFrag(wid, coef / lambda));
      promoted.push_back(canonicalTagged(
          TaggedEq{Constraint(ineqs[k].cons.term, Cmp::EQ, ineqs[k].cons.bound),
                   ineqs[k].frag, std::move(ge)}));
      alive[k] = false;
    }
  }

  // Substitute the equalities out of the surviving inequalities. Their
  // installed bounds describe the pre-substitution forms, so retract those
  // first and install the rewritten forms after; the promoted (and input
  // equality) bounds stay put, which is what keeps the substitution an
  // equivalence. A survivor can never land on an equality's hyperplane: its
  // rewritten form would be constant there and dropped as trivial instead.
  for (std::size_t k = 0; k < ineqs.size(); ++k)
    if (alive[k])
      for (const auto &spec : sx.boundSpecs(ineqs[k].cons))
        sx.setBound(spec.var, spec.side, std::nullopt);

  std::vector<TaggedEq> allEqs = eqs; // keep `eqs` intact: dirFrag indexes it
  for (TaggedEq &e : promoted)
    allEqs.push_back(std::move(e));
  std::vector<OutEq> defs = echelonTagged(std::move(allEqs), ineqs, alive);

  {
    std::vector<TaggedEq> defEqs;
    defEqs.reserve(defs.size());
    for (const OutEq &d : defs)
      defEqs.push_back({d.cons, d.le, d.ge});
    syntacticDedup(defEqs, ineqs, alive);
  }

  for (std::size_t k = 0; k < ineqs.size(); ++k) {
    if (!alive[k])
      continue;
    for (const auto &spec : sx.boundSpecs(ineqs[k].cons)) {
      assert(!sx.bound(spec.var, spec.side));
      sx.setBound(spec.var, spec.side,
                  SimplexProblem::BoundValue{
                      spec.value,
                      SimplexProblem::BoundOrigin{
                          ConstraintId{static_cast<std::uint32_t>(eqCount + k)},
                          spec.factor}});
    }
  }

  // Redundancy: an inequality is implied by the rest iff the rest together
  // with its strict reversal is infeasible. Dropped bounds stay retracted so
  // later probes run against the surviving system only.
  for (std::size_t k = 0; k < ineqs.size(); ++k) {
    if (!alive[k])
      continue;
    auto specs = sx.boundSpecs(ineqs[k].cons);
    assert(specs.size() == 1);
    const SimplexProblem::BoundSpec &spec = specs.front();
    auto savedOwn = sx.setBound(spec.var, spec.side, std::nullopt);
    assert(savedOwn && savedOwn->value == spec.value);
    bool ownUpper = spec.side == SimplexProblem::Side::Upper;
    SimplexProblem::Side opp = ownUpper ? SimplexProblem::Side::Lower
                                        : SimplexProblem::Side::Upper;
    DeltaValue reversed(spec.value.real,
                        spec.value.delta + Rational(ownUpper ? 1 : -1));
    // The reversal is no premise constraint, so its origin carries factor 0:
    // it satisfies the witness plumbing while contributing nothing, and the
    // witness of an entailment probe is discarded anyway.
    auto savedOpp = sx.setBound(
        spec.var, opp,
        SimplexProblem::BoundValue{reversed, SimplexProblem::BoundOrigin{
                                                 ConstraintId{0}, Rational()}});
    bool entailed =
        std::holds_alternative<SimplexProblem::Infeasible>(sx.check());
    sx.setBound(spec.var, opp, savedOpp);
    if (entailed)
      alive[k] = false;
    else
      sx.setBound(spec.var, spec.side, savedOwn);
  }

  MinimizedSystem out;
  out.eqs = std::move(defs);
  for (std::size_t k = 0; k < ineqs.size(); ++k)
    if (alive[k])
      out.ineqs.push_back(std::move(ineqs[k]));
  return out;
}

std::pair<Polyhedron, Cert> assembleValue(std::uint32_t nvars,
                                          MinimizedSystem sys,
                                          const CheckerPolyhedron &premise) {
  if (sys.botWitness) {
    Polyhedron bot = Polyhedron::bottom(nvars, premise, *sys.botWitness);
    return {std::move(bot), EmptyCert{std::move(*sys.botWitness)}};
  }
  std::vector<DefinedEq> eqs;
  std::vector<std::pair<ConstraintId, Constraint>> ineqs;
  InclCert cert;
  std::uint32_t next = 0;
  for (OutEq &e : sys.eqs) {
    ConstraintId tid{next++};
    eqs.push_back({e.var, tid, std::move(e.cons)});
    cert.items.push_back({tid, std::move(e.le)});
    cert.items.push_back({tid, std::move(e.ge)});
  }
  for (TaggedIneq &q : sys.ineqs) {
    ConstraintId tid{next++};
    ineqs.push_back({tid, std::move(q.cons)});
    cert.items.push_back({tid, std::move(q.frag)});
  }
  return {Polyhedron::make(nvars, std::move(eqs), std::move(ineqs)),
          Cert{std::move(cert)}};
}

} // namespace poly::detail

namespace poly {

namespace {

/// Identity-tagged views of a raw premise system.
void seedIdentity(const CheckerPolyhedron &premise,
                  std::vector<detail::TaggedEq> &eqs,
                  std::vector<detail::TaggedIneq> &ineqs) {
  for (const auto &[id, c] : premise) {
    if (c.cmp == Cmp::EQ)
      eqs.push_back({c, {{Rational(1), id}}, {{Rational(-1), id}}});
    else
      ineqs.push_back({c, {{Rational(1), id}}});
  }
}

CertifiedResult runMinimize(std::uint32_t nvars, CheckerPolyhedron premise) {
  std::vector<detail::TaggedEq> eqs;
  std::vector<detail::TaggedIneq> ineqs;
  seedIdentity(premise, eqs, ineqs);
  auto sys = detail::minimizeTagged(nvars, std::move(eqs), std::move(ineqs));
  auto [value, cert] = detail::assembleValue(nvars, std::move(sys), premise);
  CheckerPolyhedron target = value.flatten();
  return {std::move(value),
          {Obligation{std::move(premise), std::move(target), std::move(cert)}}};
}

} // namespace

CertifiedResult minimize(std::uint32_t nvars,
                         const std::vector<Constraint> &constraints) {
  CheckerPolyhedron premise;
  premise.reserve(constraints.size());
  for (std::size_t i = 0; i < constraints.size(); ++i)
    premise.emplace_back(ConstraintId{static_cast<std::uint32_t>(i)},
                         constraints[i]);
  return runMinimize(nvars, std::move(premise));
}

CertifiedResult meet(const Polyhedron &p1, const Polyhedron &p2) {
  assert(p1.numVars() == p2.numVars());
  std::uint32_t nvars = p1.numVars();
  CheckerPolyhedron f1 = p1.flatten();
  CheckerPolyhedron f2 = p2.flatten();
  const std::uint32_t offset = static_cast<std::uint32_t>(f1.size());

  // One combined premise: p1's constraints keep their ids, p2's follow.
  CheckerPolyhedron premise = f1;
  for (const auto &[id, c] : f2)
    premise.emplace_back(ConstraintId{id.value + offset}, c);

  if (p1.isBot() || p2.isBot()) {
    CertFragment witness = p1.isBot() ? p1.botWitness() : p2.botWitness();
    if (!p1.isBot())
      for (auto &[coef, id] : witness)
        id.value += offset;
    Polyhedron bot = Polyhedron::bottom(nvars, premise, witness);
    CheckerPolyhedron target = bot.flatten();
    return {std::move(bot),
            {Obligation{std::move(premise), std::move(target),
                        EmptyCert{std::move(witness)}}}};
  }
  return runMinimize(nvars, std::move(premise));
}

} // namespace poly
