#include <random>
#include <string>

#include "poly/trace.hpp"

namespace poly::trace {

namespace {

SparseVector u(SparseVector::Index i, long c) {
  return SparseVector::unit(i, Rational(c));
}
Constraint le(SparseVector t, long b) {
  return {std::move(t), Cmp::LE, Rational(b)};
}
Constraint eq(SparseVector t, long b) {
  return {std::move(t), Cmp::EQ, Rational(b)};
}

Stmt defineStmt(std::string name, std::uint32_t n,
                std::vector<Constraint> cs) {
  Stmt s;
  s.kind = OpKind::Define;
  s.dst = std::move(name);
  s.nvars = n;
  s.constraints = std::move(cs);
  return s;
}

Stmt binStmt(OpKind k, std::string dst, std::string a, std::string b) {
  Stmt s;
  s.kind = k;
  s.dst = std::move(dst);
  s.a = std::move(a);
  s.b = std::move(b);
  return s;
}

Stmt inclStmt(std::string a, std::string b, std::optional<bool> expect) {
  Stmt s;
  s.kind = OpKind::Incl;
  s.a = std::move(a);
  s.b = std::move(b);
  s.expected = expect;
  return s;
}

Stmt projectStmt(std::string dst, std::string a,
                 std::vector<SparseVector::Index> vars) {
  Stmt s;
  s.kind = OpKind::Project;
  s.dst = std::move(dst);
  s.a = std::move(a);
  s.vars = std::move(vars);
  return s;
}

Stmt assignStmt(std::string dst, std::string a,
                std::vector<AssignClause> clauses) {
  Stmt s;
  s.kind = OpKind::Assign;
  s.dst = std::move(dst);
  s.a = std::move(a);
  s.clauses = std::move(clauses);
  return s;
}

Stmt assertEqStmt(std::string a, std::string b) {
  Stmt s;
  s.kind = OpKind::AssertEq;
  s.a = std::move(a);
  s.b = std::move(b);
  return s;
}

/// Hypercube pairs with the inclusions that hold by construction: the meet
/// sits inside each operand, each operand inside the join, and projecting
/// only relaxes.
void genBox(std::mt19937_64 &rng, Trace &t) {
  std::uniform_int_distribution<std::uint32_t> nD(2, 4);
  std::uniform_int_distribution<long> loD(-4, 2), widthD(0, 5);
  for (int k = 0; k < 8; ++k) {
    std::uint32_t n = nD(rng);
    auto box = [&] {
      std::vector<Constraint> cs;
      for (std::uint32_t i = 0; i < n; ++i) {
        long lo = loD(rng), hi = lo + widthD(rng);
        cs.push_back(le(u(i, 1), hi));
        cs.push_back(le(u(i, -1), -lo));
      }
      return cs;
    };
    std::string suffix = std::to_string(k);
    std::string A = "A" + suffix, B = "B" + suffix, M = "M" + suffix,
                J = "J" + suffix, P = "P" + suffix;
    t.push_back(defineStmt(A, n, box()));
    t.push_back(defineStmt(B, n, box()));
    t.push_back(binStmt(OpKind::Meet, M, A, B));
    t.push_back(binStmt(OpKind::Join, J, A, B));
    t.push_back(inclStmt(M, A, true));
    t.push_back(inclStmt(M, B, true));
    t.push_back(inclStmt(A, J, true));
    t.push_back(inclStmt(B, J, true));
    t.push_back(projectStmt(P, J, {0}));
    t.push_back(inclStmt(J, P, true));
    t.push_back(assertEqStmt(M, M));
  }
}

/// Unit and two-variable-difference bounds, the shape octagon analyses
/// produce. Adds widening steps; widening keeps the first operand's rows
/// that the second entails, so the result always contains both.
void genOctagon(std::mt19937_64 &rng, Trace &t) {
  std::uniform_int_distribution<std::uint32_t> nD(2, 3);
  std::uniform_int_distribution<long> cD(-2, 6);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int k = 0; k < 8; ++k) {
    std::uint32_t n = nD(rng);
    auto octa = [&] {
      std::vector<Constraint> cs;
      for (std::uint32_t i = 0; i < n; ++i) {
        cs.push_back(le(u(i, 1), cD(rng)));
        cs.push_back(le(u(i, -1), cD(rng)));
      }
      for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = i + 1; j < n; ++j)
          for (long si : {1, -1})
            for (long sj : {1, -1})
              if (coin(rng))
                cs.push_back(le(u(i, si) + u(j, sj), cD(rng)));
      return cs;
    };
    std::string suffix = std::to_string(k);
    std::string A = "A" + suffix, B = "B" + suffix, M = "M" + suffix,
                J = "J" + suffix, Q = "Q" + suffix, W = "W" + suffix;
    t.push_back(defineStmt(A, n, octa()));
    t.push_back(defineStmt(B, n, octa()));
    t.push_back(binStmt(OpKind::Meet, M, A, B));
    t.push_back(binStmt(OpKind::Join, J, A, B));
    t.push_back(inclStmt(M, A, true));
    t.push_back(inclStmt(M, J, true));
    std::uniform_int_distribution<std::uint32_t> vD(0, n - 1);
    t.push_back(projectStmt(Q, A, {vD(rng)}));
    t.push_back(inclStmt(A, Q, true));
    t.push_back(binStmt(OpKind::Widen, W, A, J));
    t.push_back(inclStmt(A, W, true));
    t.push_back(inclStmt(J, W, true));
  }
}

/// Loop-analysis shape: a counter that steps each iteration, joined with the
/// previous state and widened until the invariant is stable. The generator
/// mirrors the ops on the domain so it can stop at stability and assert it.
void genLoopChain(std::mt19937_64 &rng, Trace &t) {
  std::uniform_int_distribution<long> startD(0, 2), bumpD(1, 3), hiD(3, 8);
  for (int blk = 0; blk < 3; ++blk) {
    std::uint32_t n = 2;
    std::string base = "L" + std::to_string(blk);
    long x1lo = startD(rng);
    long x1hi = x1lo + hiD(rng);
    std::vector<Constraint> init = {eq(u(0, 1), startD(rng)),
                                    le(u(1, 1), x1hi), le(u(1, -1), -x1lo)};
    std::string W = base + "_W0";
    t.push_back(defineStmt(W, n, init));
    Polyhedron w = minimize(n, init).value;
    std::vector<AssignClause> body = {
        {0, u(0, 1), Rational(bumpD(rng))}};
    for (int k = 1; k <= 10; ++k) {
      std::string suffix = std::to_string(k);
      std::string T = base + "_T" + suffix;
      std::string J = base + "_J" + suffix;
      std::string W2 = base + "_W" + suffix;
      t.push_back(assignStmt(T, W, body));
      t.push_back(binStmt(OpKind::Join, J, W, T));
      t.push_back(binStmt(OpKind::Widen, W2, W, J));
      t.push_back(inclStmt(J, W2, true));
      Polyhedron tP = assign(w, body).value;
      Polyhedron jP = join(w, tP).value;
      Polyhedron w2P = widen(w, jP);
      bool stable = incl(w2P, w).cert.has_value() &&
                    incl(w, w2P).cert.has_value();
      w = std::move(w2P);
      W = W2;
      if (stable) {
        t.push_back(assertEqStmt(base + "_W" + std::to_string(k - 1), W2));
        break;
      }
    }
  }
}

} // namespace

std::optional<Profile> profileFromName(std::string_view name) {
  if (name == "box")
    return Profile::Box;
  if (name == "octagon")
    return Profile::Octagon;
  if (name == "loop-chain")
    return Profile::LoopChain;
  return std::nullopt;
}

std::string_view profileName(Profile p) {
  switch (p) {
  case Profile::Box:
    return "box";
  case Profile::Octagon:
    return "octagon";
  case Profile::LoopChain:
    return "loop-chain";
  }
  return "?";
}

std::string gen(std::uint64_t seed, Profile profile) {
  std::mt19937_64 rng(seed);
  Trace t;
  switch (profile) {
  case Profile::Box:
    genBox(rng, t);
    break;
  case Profile::Octagon:
    genOctagon(rng, t);
    break;
  case Profile::LoopChain:
    genLoopChain(rng, t);
    break;
  }
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i].line = i + 1;
  return print(t);
}

} // namespace poly::trace
