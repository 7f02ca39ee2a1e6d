#include "doctest.h"

#include <random>
#include <vector>

#include "poly/certificate.hpp"
#include "poly/constraint.hpp"
#include "poly/delta.hpp"
#include "poly/sparse_vector.hpp"

using namespace poly;

namespace {

Rational randRat(std::mt19937_64 &rng) {
  std::uniform_int_distribution<long> num(-10, 10);
  std::uniform_int_distribution<long> den(1, 4);
  return Rational(num(rng), den(rng));
}

// Dense oracle for vector ops: a plain coefficient array indexed by variable.
using Dense = std::vector<Rational>;

Dense randDense(std::mt19937_64 &rng, std::size_t dim) {
  Dense d(dim);
  for (auto &v : d)
    v = randRat(rng);
  return d;
}

SparseVector toSparse(const Dense &d) {
  SparseVector v;
  for (std::size_t i = 0; i < d.size(); ++i)
    v = v.with(static_cast<SparseVector::Index>(i), d[i]);
  return v;
}

Dense toDense(const SparseVector &v, std::size_t dim) {
  Dense d(dim);
  v.forEach([&](SparseVector::Index i, const Rational &c) {
    REQUIRE(i < dim);
    d[i] = c;
  });
  return d;
}

} // namespace

TEST_CASE("rational arithmetic and canonical text form") {
  CHECK(Rational(2, 4) == Rational(1, 2));
  CHECK(Rational(2, -4) == Rational(-1, 2));
  CHECK(Rational(-1, 2).toString() == "-1/2");
  CHECK(Rational(7).toString() == "7");
  CHECK(Rational().isZero());
  CHECK(Rational(0, 5).toString() == "0");

  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational(1, 2) - Rational(1, 2) == Rational(0));
  CHECK(Rational(2, 3) * Rational(3, 2) == Rational(1));
  CHECK(Rational(1, 2) / Rational(1, 4) == Rational(2));
  CHECK(Rational(-3, 2).abs() == Rational(3, 2));
  CHECK(Rational(-2, 5).reciprocal() == Rational(-5, 2));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1).sign() == -1);
  CHECK(Rational(1, 2).num() == 1);
  CHECK(Rational(1, 2).den() == 2);
  CHECK(Rational(4, 2).isInteger());
  CHECK(!Rational(1, 2).isInteger());

  CHECK_THROWS_AS(Rational(1) / Rational(0), std::invalid_argument);
}

TEST_CASE("rational parsing accepts p and p/q only") {
  CHECK(Rational::fromString("3/6") == Rational(1, 2));
  CHECK(Rational::fromString("-4") == Rational(-4));
  CHECK(Rational::fromString("0") == Rational(0));
  for (const char *bad : {"", "1/0", "1/-2", "--2", "1/2/3", "2x", " 1", "1 "})
    CHECK_THROWS_AS(Rational::fromString(bad), std::invalid_argument);
}

TEST_CASE("rational round-trips through text") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    Rational r = randRat(rng);
    CHECK(Rational::fromString(r.toString()) == r);
  }
}

TEST_CASE("sparse vector equals its dense oracle on add/scale/dot") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 300; ++iter) {
    std::size_t dim = 1 + iter % 6;
    Dense da = randDense(rng, dim), db = randDense(rng, dim);
    SparseVector a = toSparse(da), b = toSparse(db);
    Rational k = randRat(rng);

    Dense sum(dim), scaled(dim);
    Rational prod;
    for (std::size_t i = 0; i < dim; ++i) {
      sum[i] = da[i] + db[i];
      scaled[i] = k * da[i];
      prod += da[i] * db[i];
    }
    CHECK(toDense(a + b, dim) == sum);
    CHECK(toDense(k * a, dim) == scaled);
    CHECK(dot(a, b) == prod);
  }
}

TEST_CASE("sparse vector is canonical: build order does not matter") {
  std::mt19937_64 rng(13);
  for (int iter = 0; iter < 100; ++iter) {
    Dense d = randDense(rng, 8);
    std::vector<SparseVector::Index> order{0, 1, 2, 3, 4, 5, 6, 7};
    std::shuffle(order.begin(), order.end(), rng);
    SparseVector forward = toSparse(d);
    SparseVector shuffled;
    for (auto i : order)
      shuffled = shuffled.with(i, d[i]);
    CHECK(forward == shuffled);
    CHECK((forward <=> shuffled) == std::strong_ordering::equal);
  }
}

TEST_CASE("sparse vector basics: get, with, erase, widely spread indices") {
  SparseVector v;
  CHECK(v.isEmpty());
  CHECK(v.size() == 0);
  CHECK(v.get(5).isZero());
  CHECK(!v.minIndex().has_value());

  // Indices crossing several bit groups exercise branch splitting.
  for (SparseVector::Index i : {0u, 1u, 31u, 32u, 1000u, 1u << 20, 0xffffffffu})
    v = v.with(i, Rational(1, 2));
  CHECK(v.size() == 7);
  CHECK(v.get(32) == Rational(1, 2));
  CHECK(v.get(33).isZero());
  CHECK(*v.minIndex() == 0);
  CHECK(v.leadingCoeff() == Rational(1, 2));

  SparseVector erased = v.with(32, Rational(0));
  CHECK(erased.size() == 6);
  CHECK(!erased.contains(32));
  CHECK(v.size() == 7); // functional update left the original alone

  auto es = erased.entries();
  REQUIRE(es.size() == 6);
  for (std::size_t i = 1; i < es.size(); ++i)
    CHECK(es[i - 1].first < es[i].first); // ascending iteration order

  SparseVector back = erased.with(32, Rational(1, 2));
  CHECK(back == v);
}

TEST_CASE("sparse vector ordering is lexicographic over entries") {
  auto v = [](std::initializer_list<SparseVector::Entry> es) {
    return SparseVector::fromEntries(es);
  };
  CHECK((v({{0, 1}}) <=> v({{1, 1}})) == std::strong_ordering::less);
  // Prefix of a longer vector compares smaller.
  CHECK((v({{0, 1}}) <=> v({{0, 1}, {1, 1}})) == std::strong_ordering::less);
  CHECK((SparseVector() <=> v({{0, 1}})) == std::strong_ordering::less);
  CHECK((v({{0, 1}}) <=> v({{0, 2}})) == std::strong_ordering::less);
}

TEST_CASE("sparse vector remap relocates indices") {
  SparseVector v = SparseVector::fromEntries({{0, Rational(1)},
                                              {2, Rational(-3)}});
  SparseVector shifted = v.remap([](SparseVector::Index i) { return i + 10; });
  CHECK(shifted.get(10) == Rational(1));
  CHECK(shifted.get(12) == Rational(-3));
  CHECK(shifted.size() == 2);
}

TEST_CASE("gcd normalization scales to coprime integers, preserving signs") {
  auto [scaled, g] = gcdNormalize(
      SparseVector::fromEntries({{0, Rational(2)}, {1, Rational(4)}}));
  CHECK(scaled == SparseVector::fromEntries({{0, Rational(1)}, {1, Rational(2)}}));
  CHECK(g == Rational(2));

  std::mt19937_64 rng(17);
  for (int iter = 0; iter < 300; ++iter) {
    Dense d = randDense(rng, 1 + iter % 5);
    SparseVector v = toSparse(d);
    if (v.isEmpty())
      continue;
    auto [s, gg] = gcdNormalize(v);
    CHECK(gg.sign() > 0);
    CHECK(gg * s == v);
    // Integer entries with collective gcd 1.
    mpz_class acc = 0;
    s.forEach([&](SparseVector::Index, const Rational &c) {
      CHECK(c.isInteger());
      mpz_gcd(acc.get_mpz_t(), acc.get_mpz_t(), c.num().get_mpz_t());
    });
    CHECK(acc == 1);
    CHECK(s.leadingCoeff().sign() == v.leadingCoeff().sign());
  }
}

TEST_CASE("delta values order lexicographically and instantiate") {
  DeltaValue a{Rational(1), Rational(0)};
  DeltaValue b{Rational(1), Rational(-1)}; // strict upper bound at 1
  CHECK(b < a);
  CHECK(a.at(Rational(1, 100)) == Rational(1));
  CHECK(b.at(Rational(1, 100)) == Rational(99, 100));
  CHECK((a + b) == DeltaValue{Rational(2), Rational(-1)});
  CHECK((Rational(3) * b) == DeltaValue{Rational(3), Rational(-3)});
  CHECK((a - b) == DeltaValue{Rational(0), Rational(1)});
}

TEST_CASE("constraint text form round-trips") {
  for (const char *text : {"1*x0 <= 2", "2*x0 + 1*x1 <= 2", "-1*x0 + -1*x1 <= 1",
                           "1*x1 < 1/2", "1*x0 + -3/2*x2 = -4", "0 <= 1",
                           "0 < -3", "0 = 0"}) {
    Constraint c = parseConstraint(text);
    CHECK(c.toString() == text);
    CHECK(parseConstraint(c.toString()) == c);
  }
  // Whitespace and duplicate variables are tolerated on input.
  CHECK(parseConstraint(" 1*x0+2*x0   <=  4 ") == parseConstraint("3*x0 <= 4"));
  for (const char *bad : {"", "1*x0", "<= 1", "1*x0 <= 1 <= 2", "x0 <= 1",
                          "1*y0 <= 1", "1*x <= 1", "1*x0 ? 1", "1*x0 <= x1"})
    CHECK_THROWS_AS(parseConstraint(bad), std::invalid_argument);
}

TEST_CASE("trivial constraint classification") {
  CHECK(parseConstraint("0 <= 0").triviallyTrue());
  CHECK(parseConstraint("0 <= -1").triviallyFalse());
  CHECK(parseConstraint("0 < 1").triviallyTrue());
  CHECK(parseConstraint("0 < 0").triviallyFalse());
  CHECK(parseConstraint("0 = 0").triviallyTrue());
  CHECK(parseConstraint("0 = 2").triviallyFalse());
  CHECK(!parseConstraint("1*x0 <= 0").isTrivial());
}

TEST_CASE("satisfies honours strictness") {
  SparseVector p = SparseVector::unit(0, Rational(1)); // x0 = 1
  CHECK(satisfies(parseConstraint("1*x0 <= 1"), p));
  CHECK(!satisfies(parseConstraint("1*x0 < 1"), p));
  CHECK(satisfies(parseConstraint("1*x0 = 1"), p));
  CHECK(!satisfies(parseConstraint("1*x0 = 2"), p));
  CHECK(satisfies(parseConstraint("-2*x0 + 1*x1 < 0"), p)); // x1 absent = 0
}

TEST_CASE("canonical reduces coefficients and orients equalities") {
  CHECK(canonical(parseConstraint("2*x0 + 4*x1 <= 4")) ==
        parseConstraint("1*x0 + 2*x1 <= 2"));
  CHECK(canonical(parseConstraint("1/2*x0 < 3/4")) ==
        parseConstraint("1*x0 < 3/2"));
  // Inequalities keep their leading sign; only equalities flip.
  CHECK(canonical(parseConstraint("-2*x0 <= 4")) ==
        parseConstraint("-1*x0 <= 2"));
  CHECK(canonical(parseConstraint("-2*x0 + 2*x1 = 4")) ==
        parseConstraint("1*x0 + -1*x1 = -2"));

  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 200; ++iter) {
    Constraint c;
    c.term = toSparse(randDense(rng, 1 + iter % 4));
    c.cmp = static_cast<Cmp>(iter % 3);
    c.bound = randRat(rng);
    Constraint once = canonical(c);
    CHECK(canonical(once) == once);
  }
}

TEST_CASE("combine adds scaled constraints and contaminates strictness") {
  Constraint a = parseConstraint("2*x0 + 1*x1 <= 2");
  Constraint b = parseConstraint("-1*x0 + -1*x1 <= 1");
  CHECK(combine(Rational(1), a, Rational(2), b) == parseConstraint("-1*x1 <= 4"));

  Constraint strict = parseConstraint("1*x0 < 1");
  CHECK(combine(Rational(1), a, Rational(1), strict).cmp == Cmp::LT);
  CHECK(combine(Rational(1), a, Rational(0), strict).cmp == Cmp::LE);

  Constraint eq1 = parseConstraint("1*x0 = 1");
  Constraint eq2 = parseConstraint("1*x1 = 2");
  Constraint both = combine(Rational(2), eq1, Rational(-1), eq2);
  CHECK(both.cmp == Cmp::EQ);
  CHECK(both == parseConstraint("2*x0 + -1*x1 = 0"));

  CHECK_THROWS_AS(combine(Rational(-1), a, Rational(0), b),
                  std::invalid_argument);
}

TEST_CASE("combine soundness: points stay inside combinations") {
  std::mt19937_64 rng(29);
  std::uniform_int_distribution<long> nonneg(0, 5);
  int checked = 0;
  for (int iter = 0; iter < 1000; ++iter) {
    std::size_t dim = 1 + iter % 4;
    SparseVector p = toSparse(randDense(rng, dim));
    Constraint c1, c2;
    c1.term = toSparse(randDense(rng, dim));
    c2.term = toSparse(randDense(rng, dim));
    c1.cmp = static_cast<Cmp>(iter % 3);
    c2.cmp = static_cast<Cmp>((iter / 3) % 3);
    // Pick bounds that make the point satisfy both constraints.
    Rational margin(iter % 2, 1);
    c1.bound = dot(c1.term, p) + margin + Rational(c1.cmp == Cmp::LE ? 0 : 1);
    c2.bound = dot(c2.term, p) + margin + Rational(c2.cmp == Cmp::LE ? 0 : 1);
    if (c1.cmp == Cmp::EQ)
      c1.bound = dot(c1.term, p);
    if (c2.cmp == Cmp::EQ)
      c2.bound = dot(c2.term, p);
    Rational k1(nonneg(rng)), k2(nonneg(rng));
    if (c1.cmp == Cmp::EQ && iter % 2)
      k1 = -k1;
    REQUIRE(satisfies(c1, p));
    REQUIRE(satisfies(c2, p));
    CHECK(satisfies(combine(k1, c1, k2, c2), p));
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("complement flips strictness and is an involution") {
  Constraint le = parseConstraint("2*x0 + -1*x1 <= 3");
  Constraint lt = complement(le);
  CHECK(lt == parseConstraint("-2*x0 + 1*x1 < -3"));
  CHECK(complement(lt) == le);
  CHECK_THROWS_AS(complement(parseConstraint("1*x0 = 1")),
                  std::invalid_argument);

  // A point violates c exactly when it satisfies complement(c).
  std::mt19937_64 rng(31);
  for (int iter = 0; iter < 200; ++iter) {
    Constraint c;
    c.term = toSparse(randDense(rng, 1 + iter % 3));
    c.cmp = iter % 2 ? Cmp::LE : Cmp::LT;
    c.bound = randRat(rng);
    SparseVector p = toSparse(randDense(rng, 3));
    CHECK(satisfies(c, p) != satisfies(complement(c), p));
  }
}

TEST_CASE("syntactic inclusion finds the scale factor") {
  auto k = syntacticIncl(parseConstraint("2*x0 <= 4"), parseConstraint("1*x0 <= 3"));
  REQUIRE(k.has_value());
  CHECK(*k == Rational(1, 2));

  // Same hyperplane, tighter bound: included; looser: not.
  CHECK(syntacticIncl(parseConstraint("1*x0 <= 3"), parseConstraint("2*x0 <= 4")) ==
        std::nullopt);
  // Different slope or negative factor: never included.
  CHECK(!syntacticIncl(parseConstraint("1*x0 <= 1"), parseConstraint("1*x1 <= 1")));
  CHECK(!syntacticIncl(parseConstraint("1*x0 <= 1"), parseConstraint("-1*x0 <= 1")));
  CHECK(!syntacticIncl(parseConstraint("1*x0 + 1*x1 <= 1"), parseConstraint("1*x0 <= 1")));

  // Comparator matrix: strict targets need strict sources or strict slack.
  CHECK(syntacticIncl(parseConstraint("1*x0 <= 1"), parseConstraint("1*x0 < 1")) ==
        std::nullopt);
  CHECK(syntacticIncl(parseConstraint("1*x0 <= 1"), parseConstraint("1*x0 < 2")).has_value());
  CHECK(syntacticIncl(parseConstraint("1*x0 < 1"), parseConstraint("1*x0 < 1")).has_value());
  CHECK(syntacticIncl(parseConstraint("1*x0 < 1"), parseConstraint("1*x0 <= 1")).has_value());
  CHECK(syntacticIncl(parseConstraint("1*x0 = 1"), parseConstraint("1*x0 <= 1")).has_value());
  CHECK(syntacticIncl(parseConstraint("1*x0 = 1"), parseConstraint("1*x0 < 1")) ==
        std::nullopt);
  CHECK(syntacticIncl(parseConstraint("1*x0 = 1"), parseConstraint("1*x0 < 2")).has_value());
  CHECK(syntacticIncl(parseConstraint("1*x0 = 1"), parseConstraint("2*x0 = 2")).has_value());
  CHECK(syntacticIncl(parseConstraint("1*x0 <= 1"), parseConstraint("1*x0 = 1")) ==
        std::nullopt);
}

TEST_CASE("substitute eliminates defined variables and reports multipliers") {
  // x0 := x2 + 1, then x1 := 2 (triangular: x0's definition mentions no x1).
  std::vector<EqDef> defs;
  defs.push_back({0, parseConstraint("1*x0 + -1*x2 = 1")});
  defs.push_back({1, parseConstraint("1*x1 = 2")});

  Constraint c = parseConstraint("2*x0 + 3*x1 + 1*x2 <= 10");
  SubstResult r = substitute(c, defs);
  CHECK(r.result == parseConstraint("3*x2 <= 2"));
  REQUIRE(r.coeffs.size() == 2);
  CHECK(r.coeffs[0] == Rational(-2));
  CHECK(r.coeffs[1] == Rational(-3));

  // The reported multipliers rebuild the result exactly.
  Constraint rebuilt = c;
  rebuilt.term = rebuilt.term + scale(r.coeffs[0], defs[0].eq.term) +
                 scale(r.coeffs[1], defs[1].eq.term);
  rebuilt.bound += r.coeffs[0] * defs[0].eq.bound + r.coeffs[1] * defs[1].eq.bound;
  CHECK(rebuilt == r.result);
}

TEST_CASE("fragment merging scales, merges ids, and drops cancellations") {
  CertFragment f1{{Rational(1), ConstraintId{0}}, {Rational(2), ConstraintId{2}}};
  CertFragment f2{{Rational(3), ConstraintId{1}}, {Rational(-1), ConstraintId{2}}};
  CertFragment sum = fragScaleConcat(Rational(1), f1, Rational(2), f2);
  REQUIRE(sum.size() == 2); // id 2 cancels: 2 + 2*(-1) = 0
  CHECK(sum[0].second.value == 0);
  CHECK(sum[0].first == Rational(1));
  CHECK(sum[1].second.value == 1);
  CHECK(sum[1].first == Rational(6));

  CHECK(fragScaleConcat(Rational(0), f1, Rational(0), f2).empty());
  CertFragment scaledOnly = fragScaleConcat(Rational(1, 2), f1, Rational(0), {});
  REQUIRE(scaledOnly.size() == 2);
  CHECK(scaledOnly[0].first == Rational(1, 2));
}

TEST_CASE("identity fragments tag each constraint with its own id") {
  CheckerPolyhedron p{{ConstraintId{4}, parseConstraint("1*x0 <= 1")},
                      {ConstraintId{7}, parseConstraint("1*x1 <= 2")}};
  auto tagged = initFragments(p);
  REQUIRE(tagged.size() == 2);
  CHECK(tagged[0].frag == CertFragment{{Rational(1), ConstraintId{4}}});
  CHECK(tagged[1].cons == p[1].second);
}

TEST_CASE("certificate text form round-trips") {
  for (const char *text :
       {"incl { 3: [(1, 0), (2, 1)]; 4: [(1, 2)] }",
        "incl { 0: [(1/2, 1)]; 0: [(1, 3), (-2/3, 4)] }", "incl { }",
        "empty [(1, 0), (1, 1)]", "empty []"}) {
    Cert c = parseCert(text);
    CHECK(toString(c) == text);
  }
  for (const char *bad :
       {"", "incl", "incl {", "incl { 3 [(1, 0)] }", "empty [(1, 0)",
        "incl { 3: [(1, 0)] } trailing", "empty [(x, 0)]"})
    CHECK_THROWS_AS(parseCert(bad), std::invalid_argument);
}
