#include "poly/oracle.hpp"

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <numeric>

namespace poly::oracle {

Rational evalAt(const SparseVector &a, const Point &x) {
  Rational sum;
  a.forEach([&](SparseVector::Index i, const Rational &c) {
    if (i < x.size())
      sum = sum + c * x[i];
  });
  return sum;
}

bool satisfiesAt(const Constraint &c, const Point &x) {
  Rational lhs = evalAt(c.term, x);
  switch (c.cmp) {
  case Cmp::LE:
    return lhs <= c.bound;
  case Cmp::LT:
    return lhs < c.bound;
  case Cmp::EQ:
    return lhs == c.bound;
  }
  return false;
}

bool satisfiesAllAt(const std::vector<Constraint> &cs, const Point &x) {
  return std::all_of(cs.begin(), cs.end(),
                     [&](const Constraint &c) { return satisfiesAt(c, x); });
}

std::vector<Constraint> splitEqs(std::vector<Constraint> cs) {
  std::vector<Constraint> out;
  for (Constraint &c : cs) {
    if (c.cmp == Cmp::EQ) {
      out.push_back({c.term, Cmp::LE, c.bound});
      out.push_back({-c.term, Cmp::LE, -c.bound});
    } else {
      out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<Constraint> fmEliminate(std::vector<Constraint> cs,
                                    SparseVector::Index var) {
  std::vector<Constraint> lower, upper, rest;
  for (Constraint &c : cs) {
    assert(c.cmp != Cmp::EQ && "split equalities before eliminating");
    Rational a = c.term.get(var);
    if (a.isZero())
      rest.push_back(std::move(c));
    else if (a.sign() > 0)
      upper.push_back(std::move(c));
    else
      lower.push_back(std::move(c));
  }
  for (const Constraint &u : upper)
    for (const Constraint &l : lower) {
      // Cross-multiply so the variable cancels exactly; both factors are
      // positive, so the comparator survives (strict if either side is).
      Rational ku = -l.term.get(var), kl = u.term.get(var);
      rest.push_back({scale(ku, u.term) + scale(kl, l.term),
                      (u.cmp == Cmp::LT || l.cmp == Cmp::LT) ? Cmp::LT
                                                             : Cmp::LE,
                      ku * u.bound + kl * l.bound});
    }
  return rest;
}

std::vector<Constraint> fmProject(std::vector<Constraint> cs,
                                  const std::vector<SparseVector::Index> &vars) {
  std::vector<Constraint> rows = splitEqs(std::move(cs));
  for (SparseVector::Index v : vars)
    rows = fmEliminate(std::move(rows), v);
  return rows;
}

bool fmFeasible(std::uint32_t nvars, std::vector<Constraint> cs) {
  std::vector<Constraint> rows = splitEqs(std::move(cs));
  for (SparseVector::Index v = 0; v < nvars; ++v)
    rows = fmEliminate(std::move(rows), v);
  for (const Constraint &c : rows) {
    assert(c.term.isEmpty() && "a row mentions a variable past nvars");
    if (c.triviallyFalse())
      return false;
  }
  return true;
}

bool fmEntails(std::uint32_t nvars, const std::vector<Constraint> &sys,
               const Constraint &c) {
  if (c.cmp == Cmp::EQ)
    return fmEntails(nvars, sys, {c.term, Cmp::LE, c.bound}) &&
           fmEntails(nvars, sys, {-c.term, Cmp::LE, -c.bound});
  std::vector<Constraint> probe = sys;
  probe.push_back(complement(c));
  return !fmFeasible(nvars, std::move(probe));
}

bool sameSet(std::uint32_t nvars, const std::vector<Constraint> &a,
             const std::vector<Constraint> &b) {
  for (const Constraint &c : b)
    if (!fmEntails(nvars, a, c))
      return false;
  for (const Constraint &c : a)
    if (!fmEntails(nvars, b, c))
      return false;
  return true;
}

SolveResult solveDense(std::vector<std::vector<Rational>> a,
                       std::vector<Rational> b) {
  std::size_t m = a.size(), k = m ? a[0].size() : 0;
  assert(b.size() == m);
  std::vector<std::size_t> pivotCol;
  std::size_t row = 0;
  for (std::size_t col = 0; col < k && row < m; ++col) {
    std::size_t piv = row;
    while (piv < m && a[piv][col].isZero())
      ++piv;
    if (piv == m)
      continue;
    std::swap(a[piv], a[row]);
    std::swap(b[piv], b[row]);
    Rational inv = a[row][col].reciprocal();
    for (std::size_t j = col; j < k; ++j)
      a[row][j] = a[row][j] * inv;
    b[row] = b[row] * inv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == row || a[r][col].isZero())
        continue;
      Rational f = a[r][col];
      for (std::size_t j = col; j < k; ++j)
        a[r][j] = a[r][j] - f * a[row][j];
      b[r] = b[r] - f * b[row];
    }
    pivotCol.push_back(col);
    ++row;
  }
  for (std::size_t r = row; r < m; ++r)
    if (!b[r].isZero())
      return {SolveKind::Inconsistent, {}};
  if (pivotCol.size() < k)
    return {SolveKind::Underdetermined, {}};
  Point x(k);
  for (std::size_t r = 0; r < k; ++r)
    x[pivotCol[r]] = b[r];
  return {SolveKind::Unique, std::move(x)};
}

namespace {

/// Visit every size-k index subset of {0, ..., m-1} in lexicographic order.
template <typename F> void forEachSubset(std::size_t m, std::size_t k, F &&f) {
  if (k > m)
    return;
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  if (k == 0) {
    f(idx);
    return;
  }
  while (true) {
    f(idx);
    std::size_t i = k;
    while (i-- > 0) {
      if (idx[i] != i + m - k) {
        ++idx[i];
        for (std::size_t j = i + 1; j < k; ++j)
          idx[j] = idx[j - 1] + 1;
        break;
      }
      if (i == 0)
        return;
    }
  }
}

} // namespace

std::vector<Point> vertexEnum(std::uint32_t nvars,
                              const std::vector<Constraint> &cs) {
  assert(nvars <= 4 && "brute-force enumeration only pays off in low dimension");
  std::vector<Point> out;
  if (nvars == 0) {
    if (satisfiesAllAt(cs, {}))
      out.push_back({});
    return out;
  }
  for (const Constraint &c : cs) {
    assert(c.cmp != Cmp::LT && "vertices are only enumerated for closed systems");
    (void)c;
  }
  forEachSubset(cs.size(), nvars, [&](const std::vector<std::size_t> &idx) {
    std::vector<std::vector<Rational>> a;
    std::vector<Rational> b;
    for (std::size_t i : idx) {
      std::vector<Rational> rowCoeffs(nvars);
      cs[i].term.forEach([&](SparseVector::Index v, const Rational &coef) {
        if (v < nvars)
          rowCoeffs[v] = coef;
      });
      a.push_back(std::move(rowCoeffs));
      b.push_back(cs[i].bound);
    }
    SolveResult s = solveDense(std::move(a), std::move(b));
    if (s.kind == SolveKind::Unique && satisfiesAllAt(cs, s.point))
      out.push_back(std::move(s.point));
  });
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool convMember(const Point &p, const std::vector<Point> &verts) {
  std::size_t d = p.size();
  // A member has an affinely independent witness subset of at most d+1
  // points, and affine independence makes the coefficients unique.
  for (std::size_t k = 1; k <= std::min(d + 1, verts.size()); ++k) {
    bool found = false;
    forEachSubset(verts.size(), k, [&](const std::vector<std::size_t> &idx) {
      if (found)
        return;
      std::vector<std::vector<Rational>> a(d + 1,
                                           std::vector<Rational>(k));
      std::vector<Rational> b(d + 1);
      for (std::size_t j = 0; j < k; ++j) {
        const Point &v = verts[idx[j]];
        assert(v.size() == d);
        for (std::size_t i = 0; i < d; ++i)
          a[i][j] = v[i];
        a[d][j] = Rational(1);
      }
      for (std::size_t i = 0; i < d; ++i)
        b[i] = p[i];
      b[d] = Rational(1);
      SolveResult s = solveDense(std::move(a), std::move(b));
      if (s.kind != SolveKind::Unique)
        return;
      if (std::all_of(s.point.begin(), s.point.end(),
                      [](const Rational &l) { return l.sign() >= 0; }))
        found = true;
    });
    if (found)
      return true;
  }
  return false;
}

std::vector<Constraint> recessionRows(const std::vector<Constraint> &cs) {
  std::vector<Constraint> out;
  for (const Constraint &c : cs)
    out.push_back({c.term, c.cmp == Cmp::EQ ? Cmp::EQ : Cmp::LE, Rational()});
  return out;
}

bool isBounded(std::uint32_t nvars, const std::vector<Constraint> &cs) {
  std::vector<Constraint> cone = recessionRows(cs);
  // A nonzero recession direction has a nonzero coordinate, so probing each
  // coordinate at +1 and -1 is a complete test.
  for (SparseVector::Index v = 0; v < nvars; ++v)
    for (int s : {1, -1}) {
      std::vector<Constraint> probe = cone;
      probe.push_back({SparseVector::unit(v, Rational(1)), Cmp::EQ, Rational(s)});
      if (fmFeasible(nvars, std::move(probe)))
        return false;
    }
  return true;
}

} // namespace poly::oracle
