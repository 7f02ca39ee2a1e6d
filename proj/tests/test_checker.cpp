#include <random>
#include <variant>
#include <vector>

#include "doctest.h"
#include "poly/checker.hpp"
#include "poly/domain.hpp"

using namespace poly;

namespace {

SparseVector v(std::initializer_list<std::pair<SparseVector::Index, long>> es) {
  std::vector<SparseVector::Entry> entries;
  for (auto &[i, c] : es)
    entries.emplace_back(i, Rational(c));
  return SparseVector::fromEntries(entries);
}

Constraint le(SparseVector t, long b) {
  return {std::move(t), Cmp::LE, Rational(b)};
}
Constraint lt(SparseVector t, long b) {
  return {std::move(t), Cmp::LT, Rational(b)};
}
Constraint eq(SparseVector t, long b) {
  return {std::move(t), Cmp::EQ, Rational(b)};
}

CheckerPolyhedron sys(std::vector<Constraint> cs) {
  CheckerPolyhedron out;
  for (std::size_t i = 0; i < cs.size(); ++i)
    out.emplace_back(ConstraintId{static_cast<std::uint32_t>(i)},
                     std::move(cs[i]));
  return out;
}

bool accepts(const Obligation &ob) {
  return checkCert(ob.premise, ob.target, ob.cert).ok;
}

} // namespace

TEST_CASE("checker: accepts obligations from every operator") {
  auto box = minimize(2, {le(v({{0, 1}}), 2), le(v({{0, -1}}), 0),
                          le(v({{1, 1}}), 2), le(v({{1, -1}}), 0)});
  CHECK(accepts(box.obligations[0]));

  auto line = minimize(2, {eq(v({{0, 1}, {1, -1}}), 1), lt(v({{1, 1}}), 4)});
  CHECK(accepts(line.obligations[0]));

  auto empty = minimize(1, {le(v({{0, 1}}), 0), le(v({{0, -1}}), -1)});
  CHECK(empty.value.isBot());
  CHECK(accepts(empty.obligations[0]));

  auto met = meet(box.value, line.value);
  for (const Obligation &ob : met.obligations)
    CHECK(accepts(ob));

  auto proj = project(box.value, {0});
  CHECK(accepts(proj.obligations[0]));

  auto moved = assign(box.value, {{0, v({{0, 1}, {1, 2}}), Rational(-1)}});
  CHECK(accepts(moved.obligations[0]));

  auto hull = join(box.value, line.value);
  REQUIRE(hull.obligations.size() == 2);
  CHECK(accepts(hull.obligations[0]));
  CHECK(accepts(hull.obligations[1]));

  auto ans = incl(met.value, box.value);
  REQUIRE(ans.cert.has_value());
  CHECK(checkCert(met.value.flatten(), box.value.flatten(), *ans.cert).ok);
}

TEST_CASE("checker: single inequality entailment matrix") {
  CheckerPolyhedron closed = sys({le(v({{0, 1}}), 1)});
  CheckerPolyhedron open = sys({lt(v({{0, 1}}), 1)});
  auto one = [](Constraint target, CertFragment frag) {
    InclCert c;
    c.items.push_back({ConstraintId{0}, std::move(frag)});
    return std::pair{sys({std::move(target)}), Cert{std::move(c)}};
  };

  // A closed row proves closed targets at the same bound, strict targets
  // only beyond it.
  auto [t1, c1] = one(le(v({{0, 1}}), 1), {{Rational(1), ConstraintId{0}}});
  CHECK(checkCert(closed, t1, c1).ok);
  auto [t2, c2] = one(lt(v({{0, 1}}), 1), {{Rational(1), ConstraintId{0}}});
  CHECK(!checkCert(closed, t2, c2).ok);
  auto [t3, c3] = one(lt(v({{0, 1}}), 2), {{Rational(1), ConstraintId{0}}});
  CHECK(checkCert(closed, t3, c3).ok);

  // A strict row proves both forms at the same bound.
  CHECK(checkCert(open, t1, c1).ok);
  CHECK(checkCert(open, t2, c2).ok);

  // Scaling is folded into the comparison: 2x <= 2 follows from x <= 1.
  auto [t4, c4] = one(le(v({{0, 2}}), 2), {{Rational(1), ConstraintId{0}}});
  CHECK(checkCert(closed, t4, c4).ok);
  // ... but a negative multiplier on an inequality is rejected outright.
  auto [t5, c5] = one(le(v({{0, -1}}), 1), {{Rational(-1), ConstraintId{0}}});
  CHECK(!checkCert(closed, t5, c5).ok);
}

TEST_CASE("checker: equality targets by one combination or two halves") {
  CheckerPolyhedron pre = sys({eq(v({{0, 1}}), 1)});
  CheckerPolyhedron tgt = sys({eq(v({{0, 2}}), 2)});

  InclCert single;
  single.items.push_back({ConstraintId{0}, {{Rational(2), ConstraintId{0}}}});
  CHECK(checkCert(pre, tgt, Cert{single}).ok);

  // Equality rows scale with either sign.
  InclCert negated;
  negated.items.push_back(
      {ConstraintId{0}, {{Rational(-2), ConstraintId{0}}}});
  CHECK(checkCert(pre, tgt, Cert{negated}).ok);

  InclCert halves;
  halves.items.push_back({ConstraintId{0}, {{Rational(2), ConstraintId{0}}}});
  halves.items.push_back({ConstraintId{0}, {{Rational(-2), ConstraintId{0}}}});
  CHECK(checkCert(pre, tgt, Cert{halves}).ok);

  // Reversed order is fine; two copies of the same half are not.
  InclCert reversed;
  reversed.items.push_back(
      {ConstraintId{0}, {{Rational(-2), ConstraintId{0}}}});
  reversed.items.push_back(
      {ConstraintId{0}, {{Rational(2), ConstraintId{0}}}});
  CHECK(checkCert(pre, tgt, Cert{reversed}).ok);

  // Two copies of an equality combination are each a full proof, so the
  // pair still verifies.
  InclCert sameHalf;
  sameHalf.items.push_back(
      {ConstraintId{0}, {{Rational(2), ConstraintId{0}}}});
  sameHalf.items.push_back(
      {ConstraintId{0}, {{Rational(2), ConstraintId{0}}}});
  CHECK(checkCert(pre, tgt, Cert{sameHalf}).ok);

  // An inequality premise can never pin an equality.
  CheckerPolyhedron weak = sys({le(v({{0, 1}}), 1), le(v({{0, -1}}), -1)});
  InclCert oneSided;
  oneSided.items.push_back(
      {ConstraintId{0}, {{Rational(1), ConstraintId{0}}}});
  CHECK(!checkCert(weak, sys({eq(v({{0, 1}}), 1)}), Cert{oneSided}).ok);
  // ... and citing the same one-sided row twice covers only one half.
  InclCert twiceSame;
  twiceSame.items.push_back(
      {ConstraintId{0}, {{Rational(1), ConstraintId{0}}}});
  twiceSame.items.push_back(
      {ConstraintId{0}, {{Rational(1), ConstraintId{0}}}});
  CHECK(!checkCert(weak, sys({eq(v({{0, 1}}), 1)}), Cert{twiceSame}).ok);
  InclCert bothSides;
  bothSides.items.push_back(
      {ConstraintId{0}, {{Rational(1), ConstraintId{0}}}});
  bothSides.items.push_back(
      {ConstraintId{0}, {{Rational(1), ConstraintId{1}}}});
  CHECK(checkCert(weak, sys({eq(v({{0, 1}}), 1)}), Cert{bothSides}).ok);
}

TEST_CASE("checker: emptiness certificates") {
  CheckerPolyhedron contra =
      sys({le(v({{0, 1}}), 0), le(v({{0, -1}}), -1)});
  CHECK(checkCert(contra, {}, Cert{EmptyCert{{{Rational(1), ConstraintId{0}},
                                              {Rational(1), ConstraintId{1}}}}})
            .ok);
  // A fold that is merely true proves nothing.
  CHECK(!checkCert(contra, {}, Cert{EmptyCert{{{Rational(1), ConstraintId{0}}}}})
             .ok);
  CHECK(!checkCert(contra, {}, Cert{EmptyCert{{}}}).ok);
  // Strict contact: x <= 0 plus x > 0 refutes with a zero-sum strict fold.
  CheckerPolyhedron touch = sys({le(v({{0, 1}}), 0), lt(v({{0, -1}}), 0)});
  CHECK(checkCert(touch, {}, Cert{EmptyCert{{{Rational(1), ConstraintId{0}},
                                             {Rational(1), ConstraintId{1}}}}})
            .ok);
}

TEST_CASE("checker: rejects tampered certificates") {
  // Worked projection: eliminate x from {y <= 1, 2x + y <= 2, -x - y <= 1}.
  auto p = minimize(2, {le(v({{1, 1}}), 1), le(v({{0, 2}, {1, 1}}), 2),
                        le(v({{0, -1}, {1, -1}}), 1)})
               .value;
  auto r = project(p, {0});
  REQUIRE(r.obligations.size() == 1);
  const Obligation &ob = r.obligations[0];
  REQUIRE(accepts(ob));
  const auto &good = std::get<InclCert>(ob.cert);

  // Bump one multiplier: the rebuilt term no longer matches.
  {
    InclCert bad = good;
    for (CertItem &item : bad.items)
      for (auto &[coef, id] : item.combo)
        if (coef == Rational(2))
          coef = Rational(3);
    CHECK(!checkCert(ob.premise, ob.target, Cert{bad}).ok);
  }
  // Negate one multiplier.
  {
    InclCert bad = good;
    bad.items.back().combo.front().first =
        -bad.items.back().combo.front().first;
    CHECK(!checkCert(ob.premise, ob.target, Cert{bad}).ok);
  }
  // Drop an item: its target goes uncovered.
  {
    InclCert bad = good;
    bad.items.pop_back();
    CHECK(!checkCert(ob.premise, ob.target, Cert{bad}).ok);
  }
  // Redirect an item at the other target.
  {
    InclCert bad = good;
    bad.items.back().target = bad.items.front().target;
    CHECK(!checkCert(ob.premise, ob.target, Cert{bad}).ok);
  }
  // Cite a premise row that does not exist.
  {
    InclCert bad = good;
    bad.items.back().combo.front().second = ConstraintId{99};
    CHECK(!checkCert(ob.premise, ob.target, Cert{bad}).ok);
  }
  // Tighten a target bound past what the combination supports.
  {
    CheckerPolyhedron tampered = ob.target;
    for (auto &[id, c] : tampered)
      c.bound = c.bound - Rational(1);
    CHECK(!checkCert(ob.premise, tampered, ob.cert).ok);
  }
  // Uniform rescaling of a fragment stays valid: the scale is recovered.
  {
    InclCert scaled = good;
    for (auto &[coef, id] : scaled.items.back().combo)
      coef = coef * Rational(5);
    CHECK(checkCert(ob.premise, ob.target, Cert{scaled}).ok);
  }
}

TEST_CASE("checker: trivial targets accept empty combinations") {
  CheckerPolyhedron pre = sys({le(v({{0, 1}}), 1)});
  CheckerPolyhedron tgt = sys({le(v({}), 0)});
  InclCert cert;
  cert.items.push_back({ConstraintId{0}, {}});
  CHECK(checkCert(pre, tgt, Cert{cert}).ok);
  // ... but a nontrivial target rejects them.
  CheckerPolyhedron hard = sys({le(v({{0, 1}}), 1)});
  InclCert empty;
  empty.items.push_back({ConstraintId{0}, {}});
  CHECK(!checkCert(pre, hard, Cert{empty}).ok);
}

TEST_CASE("checker: random operator outputs all verify") {
  std::mt19937_64 rng(246810);
  std::uniform_int_distribution<int> coefD(-3, 3), boundD(-4, 4), nD(1, 3),
      mD(1, 4), cmpD(0, 9), opD(0, 3);
  auto randPoly = [&](std::uint32_t n) {
    std::vector<Constraint> cs;
    int m = mD(rng);
    for (int i = 0; i < m; ++i) {
      SparseVector t;
      for (std::uint32_t x = 0; x < n; ++x)
        t = t + SparseVector::unit(x, Rational(coefD(rng)));
      int k = cmpD(rng);
      Cmp cmp = k < 7 ? Cmp::LE : (k < 9 ? Cmp::LT : Cmp::EQ);
      cs.push_back({std::move(t), cmp, Rational(boundD(rng))});
    }
    return minimize(n, cs);
  };
  int checked = 0;
  for (int iter = 0; iter < 200; ++iter) {
    std::uint32_t n = static_cast<std::uint32_t>(nD(rng));
    auto a = randPoly(n);
    CHECK(accepts(a.obligations[0]));
    auto b = randPoly(n);
    std::vector<Obligation> obs;
    switch (opD(rng)) {
    case 0:
      obs = meet(a.value, b.value).obligations;
      break;
    case 1:
      obs = join(a.value, b.value).obligations;
      break;
    case 2:
      obs = project(a.value, {0}).obligations;
      break;
    default:
      obs = assign(a.value, {{0, v({{0, 1}}), Rational(1)}}).obligations;
      break;
    }
    for (const Obligation &ob : obs) {
      ++checked;
      CHECK(accepts(ob));
    }
  }
  CHECK(checked >= 200);
}
