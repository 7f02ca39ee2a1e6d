#include <cassert>
#include <utility>

#include "engine.hpp"

namespace poly::detail {

EntailEngine::EntailEngine(const Polyhedron &p)
    : poly(p), sx(p.numVars()),
      sentinel{static_cast<std::uint32_t>(p.constraintCount())} {
  assert(!p.isBot());
  for (const DefinedEq &d : p.eqs())
    defs.push_back({d.var, d.cons});
  // Only the inequalities enter the solver: queries are reduced modulo the
  // defining equalities first, so both sides live in the free-variable
  // quotient, where the two systems describe the same set of points.
  for (const auto &[id, c] : p.ineqs())
    sx.addConstraint(id, c);
}

std::pair<Constraint, CertFragment>
EntailEngine::reduce(const Constraint &c) const {
  SubstResult s = substitute(c, defs);
  CertFragment mus;
  for (std::size_t i = 0; i < s.coeffs.size(); ++i)
    if (!s.coeffs[i].isZero())
      mus.emplace_back(s.coeffs[i], poly.eqs()[i].id);
  return {std::move(s.result), std::move(mus)};
}

SparseVector EntailEngine::lift(SparseVector pt) const {
  // Defined variables get their forced values. Later definitions may appear
  // inside earlier ones (echelon, not fully reduced), so walk backwards:
  // the last definition only involves free variables.
  const auto &es = poly.eqs();
  for (auto it = es.rbegin(); it != es.rend(); ++it) {
    const Rational cv = it->cons.term.get(it->var);
    Rational rest = dot(it->cons.term, pt) - cv * pt.get(it->var);
    pt = pt.with(it->var, (it->cons.bound - rest) / cv);
  }
  return pt;
}

SparseVector EntailEngine::anyPoint() {
  auto out = sx.check();
  auto *f = std::get_if<SimplexProblem::Feasible>(&out);
  assert(f && "a non-Bot polyhedron is feasible by construction");
  return lift(std::move(f->point));
}

std::variant<CertFragment, SparseVector>
EntailEngine::prove(const Constraint &target) {
  assert(target.cmp != Cmp::EQ && !target.isTrivial());

  // Cheap pass: some stored inequality already subsumes the target.
  for (const auto &[id, c] : poly.ineqs())
    if (auto k = syntacticIncl(c, target))
      return CertFragment{{*k, id}};

  // Farkas probe: the target is entailed iff the system plus its strict
  // complement is infeasible, and the witness multipliers normalize into the
  // combination proving it.
  Constraint comp = complement(target);
  auto specs = sx.boundSpecs(comp);
  assert(specs.size() == 1);
  const SimplexProblem::BoundSpec &spec = specs.front();

  // setBound replaces, so only a probe that tightens the slot may be
  // installed. A probe at or beyond the stored bound means the complement
  // already holds everywhere on this side: any stored point separates.
  if (const auto &existing = sx.bound(spec.var, spec.side)) {
    bool tightens = spec.side == SimplexProblem::Side::Upper
                        ? spec.value < existing->value
                        : spec.value > existing->value;
    if (!tightens)
      return anyPoint();
  }
  auto saved = sx.setBound(
      spec.var, spec.side,
      SimplexProblem::BoundValue{
          spec.value, SimplexProblem::BoundOrigin{sentinel, spec.factor}});
  auto out = sx.check();
  sx.setBound(spec.var, spec.side, saved);

  if (auto *f = std::get_if<SimplexProblem::Feasible>(&out))
    return lift(std::move(f->point));

  const auto &witness = std::get<SimplexProblem::Infeasible>(out).witness;
  Rational lambda;
  for (const auto &[cid, coef] : witness)
    if (cid == sentinel)
      lambda = coef;
  assert(lambda.sign() > 0 && "the probe bound must take part in the clash");
  CertFragment frag;
  for (const auto &[cid, coef] : witness)
    if (!(cid == sentinel))
      frag.emplace_back(coef / lambda, cid);
  assert(!frag.empty());
  return frag;
}

} // namespace poly::detail

namespace poly {

InclAnswer incl(const Polyhedron &p1, const Polyhedron &p2) {
  assert(p1.numVars() == p2.numVars());
  // An empty p1 is included in anything, and its stored witness is the proof.
  if (p1.isBot())
    return {Cert{EmptyCert{p1.botWitness()}}, std::nullopt};

  detail::EntailEngine eng(p1);
  if (p2.isBot())
    return {std::nullopt, eng.anyPoint()};

  InclCert cert;
  for (const auto &[tid, target] : p2.flatten()) {
    auto [reduced, mus] = eng.reduce(target);
    if (reduced.isTrivial()) {
      if (reduced.triviallyTrue()) {
        // The target collapsed against p1's equalities; the mu-entries alone
        // rebuild it (an equality combination).
        cert.items.push_back(
            {tid, fragScaleConcat(Rational(-1), mus, Rational(), {})});
        continue;
      }
      // Contradicts p1's equalities: every point of p1 violates the target.
      return {std::nullopt, eng.anyPoint()};
    }
    if (reduced.cmp == Cmp::EQ) {
      Constraint leHalf{reduced.term, Cmp::LE, reduced.bound};
      Constraint geHalf{-reduced.term, Cmp::LE, -reduced.bound};
      auto r1 = eng.prove(leHalf);
      if (auto *pt = std::get_if<SparseVector>(&r1))
        return {std::nullopt, std::move(*pt)};
      auto r2 = eng.prove(geHalf);
      if (auto *pt = std::get_if<SparseVector>(&r2))
        return {std::nullopt, std::move(*pt)};
      cert.items.push_back(
          {tid, fragScaleConcat(Rational(1), std::get<CertFragment>(r1),
                                Rational(-1), mus)});
      cert.items.push_back(
          {tid, fragScaleConcat(Rational(1), std::get<CertFragment>(r2),
                                Rational(1), mus)});
      continue;
    }
    auto r = eng.prove(reduced);
    if (auto *pt = std::get_if<SparseVector>(&r))
      return {std::nullopt, std::move(*pt)};
    cert.items.push_back(
        {tid, fragScaleConcat(Rational(1), std::get<CertFragment>(r),
                              Rational(-1), mus)});
  }
  return {Cert{std::move(cert)}, std::nullopt};
}

} // namespace poly
