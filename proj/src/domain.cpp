#include <cassert>
#include <cstdint>
#include <set>
#include <utility>
#include <variant>
#include <vector>

#include "engine.hpp"

namespace poly {

CertifiedResult assign(const Polyhedron &p,
                       const std::vector<AssignClause> &clauses) {
  const std::uint32_t n = p.numVars();
#ifndef NDEBUG
  std::set<SparseVector::Index> seen;
  for (const AssignClause &cl : clauses) {
    assert(cl.var < n && "assignment target out of range");
    assert(seen.insert(cl.var).second && "one clause per variable");
    cl.expr.forEach([&](SparseVector::Index i, const Rational &) {
      assert(i < n && "expressions read the pre-state variables");
    });
  }
#endif
  if (p.isBot())
    return detail::passThroughBot(p);

  // Pre-state system plus one defining equality per clause: the primed
  // variable n + j carries the post-state value of clause j's target.
  const std::uint32_t m = static_cast<std::uint32_t>(clauses.size());
  CheckerPolyhedron premise = p.flatten();
  std::uint32_t nextId = static_cast<std::uint32_t>(premise.size());
  for (std::uint32_t j = 0; j < m; ++j) {
    SparseVector t =
        SparseVector::unit(n + j, Rational(1)) + (-clauses[j].expr);
    premise.emplace_back(
        ConstraintId{nextId++},
        Constraint{std::move(t), Cmp::EQ, clauses[j].constant});
  }

  std::vector<detail::TaggedEq> eqs;
  std::vector<detail::TaggedIneq> ineqs;
  for (const auto &[id, c] : premise) {
    if (c.cmp == Cmp::EQ)
      eqs.push_back({c, {{Rational(1), id}}, {{Rational(-1), id}}});
    else
      ineqs.push_back({c, {{Rational(1), id}}});
  }

  // Project out the overwritten pre-state values; the primed variables and
  // the untouched ones survive.
  std::vector<SparseVector::Index> overwritten;
  overwritten.reserve(clauses.size());
  for (const AssignClause &cl : clauses)
    overwritten.push_back(cl.var);
  detail::ProjectedSystem ps = detail::projectTagged(
      n + m, std::move(eqs), std::move(ineqs), overwritten, false, nullptr);
  assert(!ps.botWitness &&
         "a functional extension of a nonempty state stays nonempty");

  detail::MinimizedSystem sys;
  std::vector<bool> alive(ps.ineqs.size(), true);
  sys.eqs = detail::echelonTagged(std::move(ps.eqs), ps.ineqs, alive);
  for (std::size_t i = 0; i < ps.ineqs.size(); ++i)
    if (alive[i])
      sys.ineqs.push_back(std::move(ps.ineqs[i]));

  // The obligation talks about the primed form; the published value renames
  // the primes onto their targets, which is injective on everything still
  // live because the overwritten originals are gone.
  auto [primed, cert] = detail::assembleValue(n + m, std::move(sys), premise);
  CheckerPolyhedron target = primed.flatten();

  auto rename = [&](SparseVector::Index i) {
    return i < n ? i : clauses[i - n].var;
  };
  std::vector<DefinedEq> veqs;
  std::vector<std::pair<ConstraintId, Constraint>> vineqs;
  for (const DefinedEq &d : primed.eqs()) {
    // Renaming can move the leading index, so restore sign canonicity.
    Constraint c =
        canonical({d.cons.term.remap(rename), Cmp::EQ, d.cons.bound});
    veqs.push_back({rename(d.var), d.id, std::move(c)});
  }
  for (const auto &[id, c] : primed.ineqs())
    vineqs.push_back({id, {c.term.remap(rename), c.cmp, c.bound}});
  Polyhedron value = Polyhedron::make(n, std::move(veqs), std::move(vineqs));
  return {std::move(value),
          {Obligation{std::move(premise), std::move(target),
                      std::move(cert)}}};
}

Polyhedron widen(const Polyhedron &p1, const Polyhedron &p2) {
  assert(p1.numVars() == p2.numVars());
  if (p1.isBot())
    return p2;
  if (p2.isBot())
    return p1;

  // Keep exactly the constraints of p1 that p2 still entails; the result is
  // stable under any further growth below it.
  detail::EntailEngine eng(p2);
  auto holds = [&](const Constraint &cons) {
    Constraint reduced = eng.reduce(cons).first;
    if (reduced.isTrivial())
      return reduced.triviallyTrue();
    if (reduced.cmp == Cmp::EQ) {
      Constraint leHalf{reduced.term, Cmp::LE, reduced.bound};
      Constraint geHalf{-reduced.term, Cmp::LE, -reduced.bound};
      return std::holds_alternative<CertFragment>(eng.prove(leHalf)) &&
             std::holds_alternative<CertFragment>(eng.prove(geHalf));
    }
    return std::holds_alternative<CertFragment>(eng.prove(reduced));
  };
  std::vector<Constraint> kept;
  for (const DefinedEq &d : p1.eqs())
    if (holds(d.cons))
      kept.push_back(d.cons);
  for (const auto &[id, c] : p1.ineqs())
    if (holds(c))
      kept.push_back(c);
  return minimize(p1.numVars(), kept).value;
}

} // namespace poly
