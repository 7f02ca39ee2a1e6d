#include <algorithm>
#include <cassert>
#include <cstdint>
#include <utility>
#include <vector>

#include "engine.hpp"

namespace poly {

namespace {

using detail::TaggedEq;
using detail::TaggedIneq;

/// Every constraint proves itself: the certificate for "p is included in p".
InclCert identityCert(const CheckerPolyhedron &flat) {
  InclCert cert;
  for (const auto &e : flat)
    cert.items.push_back({e.first, {{Rational(1), e.first}}});
  return cert;
}

/// One operand's block of the combined hull system. Each constraint
/// `a . x ~ b` (strict ones already carrying the shared slack eps) becomes
/// `a . xbar - b . albar ~ 0` over this operand's scaled copy, tagged with an
/// identity fragment in the combined id space. With strict constraints in
/// play, two glue rows bound the operand's slack share: `0 <= epsbar` and
/// `epsbar <= albar` (the homogenized form of eps <= 1).
void pushScaledCopy(const CheckerPolyhedron &flat, bool strict,
                    std::uint32_t base, std::uint32_t alpha,
                    std::uint32_t eps, std::uint32_t idBase,
                    std::vector<TaggedEq> &eqs,
                    std::vector<TaggedIneq> &ineqs) {
  for (const auto &[id, c] : flat) {
    SparseVector term = c.term;
    if (c.cmp == Cmp::LT)
      term = term + SparseVector::unit(eps, Rational(1));
    term = term.remap([&](SparseVector::Index i) { return base + i; });
    if (!c.bound.isZero())
      term = term + SparseVector::unit(alpha, -c.bound);
    ConstraintId cid{idBase + id.value};
    Constraint h{std::move(term), c.cmp == Cmp::EQ ? Cmp::EQ : Cmp::LE,
                 Rational()};
    if (c.cmp == Cmp::EQ)
      eqs.push_back({std::move(h), {{Rational(1), cid}}, {{Rational(-1), cid}}});
    else
      ineqs.push_back({std::move(h), {{Rational(1), cid}}});
  }
  if (strict) {
    std::uint32_t k = static_cast<std::uint32_t>(flat.size());
    ineqs.push_back({{SparseVector::unit(base + eps, Rational(-1)), Cmp::LE,
                      Rational()},
                     {{Rational(1), ConstraintId{idBase + k}}}});
    ineqs.push_back({{SparseVector::unit(base + eps, Rational(1)) +
                          SparseVector::unit(alpha, Rational(-1)),
                      Cmp::LE, Rational()},
                     {{Rational(1), ConstraintId{idBase + k + 1}}}});
  }
}

/// Restriction of a fragment over the combined id space to one operand's
/// block, rebased to that operand's own ids. The rows left out -- the other
/// operand's block and the glue -- specialize to constant constraints under
/// "this operand at scale one, the other at zero", so what remains still
/// proves the target over the operand alone (possibly with a strictly
/// smaller bound, which only strengthens the claim).
CertFragment restrictTo(const CertFragment &frag, std::uint32_t lo,
                        std::uint32_t count) {
  CertFragment out;
  for (const auto &[coef, id] : frag)
    if (id.value >= lo && id.value < lo + count)
      out.emplace_back(coef, ConstraintId{id.value - lo});
  assert(!out.empty() && "a nontrivial output needs rows from each operand");
  return out;
}

} // namespace

CertifiedResult join(const Polyhedron &p1, const Polyhedron &p2) {
  assert(p1.numVars() == p2.numVars());

  // An empty operand passes the other through: the survivor proves itself,
  // the empty side's witness proves anything.
  if (p1.isBot() || p2.isBot()) {
    const Polyhedron &keep = p1.isBot() ? p2 : p1;
    CheckerPolyhedron target = keep.flatten();
    auto side = [&](const Polyhedron &p) -> Obligation {
      if (p.isBot())
        return {p.flatten(), target, EmptyCert{p.botWitness()}};
      return {p.flatten(), target, identityCert(target)};
    };
    return {keep, {side(p1), side(p2)}};
  }

  const std::uint32_t n = p1.numVars();
  CheckerPolyhedron flat1 = p1.flatten(), flat2 = p2.flatten();
  auto hasStrict = [](const CheckerPolyhedron &f) {
    return std::any_of(f.begin(), f.end(),
                       [](const auto &e) { return e.second.cmp == Cmp::LT; });
  };
  const bool strict = hasStrict(flat1) || hasStrict(flat2);

  // Strict faces ride along as one shared slack coordinate eps = n: each
  // `a . x < b` becomes `a . x + eps <= b` with 0 <= eps <= 1, and
  // strictness is read back off the eps coefficient after elimination.
  const std::uint32_t np = n + (strict ? 1 : 0);

  // Combined system over 3*np + 2 variables: the result coordinates x, one
  // scaled copy xbar_i per operand, and scale factors al1 + al2 = 1,
  // al_i >= 0. Its projection onto x is the set of convex combinations
  // al1 * q1 + al2 * q2 of (recession-extended) operand points -- the hull.
  const std::uint32_t base1 = np, base2 = 2 * np;
  const std::uint32_t al1 = 3 * np, al2 = 3 * np + 1;
  const std::uint32_t k1 = static_cast<std::uint32_t>(flat1.size());
  const std::uint32_t k2 = static_cast<std::uint32_t>(flat2.size());
  const std::uint32_t s = strict ? 2 : 0;
  const std::uint32_t idBase2 = k1 + s;
  std::uint32_t gid = idBase2 + k2 + s;

  std::vector<TaggedEq> eqs;
  std::vector<TaggedIneq> ineqs;
  pushScaledCopy(flat1, strict, base1, al1, n, 0, eqs, ineqs);
  pushScaledCopy(flat2, strict, base2, al2, n, idBase2, eqs, ineqs);

  // Glue: x = xbar1 + xbar2, al1 + al2 = 1, alphas nonnegative.
  for (std::uint32_t i = 0; i < np; ++i) {
    ConstraintId id{gid++};
    SparseVector t = SparseVector::unit(i, Rational(1)) +
                     SparseVector::unit(base1 + i, Rational(-1)) +
                     SparseVector::unit(base2 + i, Rational(-1));
    eqs.push_back({{std::move(t), Cmp::EQ, Rational()},
                   {{Rational(1), id}},
                   {{Rational(-1), id}}});
  }
  {
    ConstraintId id{gid++};
    eqs.push_back({{SparseVector::unit(al1, Rational(1)) +
                        SparseVector::unit(al2, Rational(1)),
                    Cmp::EQ, Rational(1)},
                   {{Rational(1), id}},
                   {{Rational(-1), id}}});
  }
  for (std::uint32_t a : {al1, al2}) {
    ConstraintId id{gid++};
    ineqs.push_back(
        {{SparseVector::unit(a, Rational(-1)), Cmp::LE, Rational()},
         {{Rational(1), id}}});
  }

  // Eliminate both scaled copies and both scale factors. Greedy order: the
  // xbar2 coordinates and al2 substitute away through the glue equalities
  // for free, the rest is Fourier-Motzkin.
  std::vector<SparseVector::Index> kill{al1, al2};
  for (std::uint32_t i = 0; i < np; ++i) {
    kill.push_back(base1 + i);
    kill.push_back(base2 + i);
  }
  detail::ProjectedSystem ps =
      detail::projectTagged(3 * np + 2, std::move(eqs), std::move(ineqs),
                            kill, false, nullptr);
  assert(!ps.botWitness && "the hull of nonempty operands is nonempty");

  std::vector<TaggedEq> outEqs = std::move(ps.eqs);
  std::vector<TaggedIneq> outIneqs;
  if (strict) {
    // Exact readback of the slack dimension. A point lies in the hull iff
    // some eps > 0 fits all rows, i.e. iff (a) every positive-eps row holds
    // strictly at eps = 0 and (b) every eps-free consequence holds; (b) is
    // precisely the Fourier-Motzkin elimination of eps.
    for (const TaggedEq &e : outEqs)
      assert(e.cons.term.get(n).isZero() &&
             "no equality can pin the shared slack of nonempty operands");
    for (const TaggedIneq &q : ps.ineqs) {
      if (q.cons.term.get(n).sign() <= 0)
        continue;
      SparseVector t = q.cons.term.with(n, Rational());
      if (t.isEmpty()) {
        assert(q.cons.bound.sign() > 0 && "some slack is always available");
        continue;
      }
      outIneqs.push_back(detail::canonicalTagged(
          TaggedIneq{{std::move(t), Cmp::LT, q.cons.bound}, q.frag}));
    }
    detail::ProjectedSystem closed =
        detail::projectTagged(np, {}, std::move(ps.ineqs), {n}, true, nullptr);
    assert(!closed.botWitness && closed.eqs.empty());
    for (TaggedIneq &q : closed.ineqs)
      outIneqs.push_back(std::move(q));
  } else {
    outIneqs = std::move(ps.ineqs);
  }

  // The combined system was raw, so the projected residue gets the full
  // treatment: implicit equalities, echelon form, redundancy.
  detail::MinimizedSystem sys =
      detail::minimizeTagged(n, std::move(outEqs), std::move(outIneqs));
  assert(!sys.botWitness);

  // Assemble once, splitting every fragment into its per-operand restriction.
  std::vector<DefinedEq> veqs;
  std::vector<std::pair<ConstraintId, Constraint>> vineqs;
  InclCert cert1, cert2;
  std::uint32_t next = 0;
  auto split = [&](ConstraintId tid, const CertFragment &frag) {
    cert1.items.push_back({tid, restrictTo(frag, 0, k1)});
    cert2.items.push_back({tid, restrictTo(frag, idBase2, k2)});
  };
  for (detail::OutEq &e : sys.eqs) {
    ConstraintId tid{next++};
    split(tid, e.le);
    split(tid, e.ge);
    veqs.push_back({e.var, tid, std::move(e.cons)});
  }
  for (TaggedIneq &q : sys.ineqs) {
    ConstraintId tid{next++};
    split(tid, q.frag);
    vineqs.push_back({tid, std::move(q.cons)});
  }
  Polyhedron value = Polyhedron::make(n, std::move(veqs), std::move(vineqs));
  CheckerPolyhedron target = value.flatten();
  return {std::move(value),
          {Obligation{std::move(flat1), target, Cert{std::move(cert1)}},
           Obligation{std::move(flat2), std::move(target),
                      Cert{std::move(cert2)}}}};
}

} // namespace poly
