#include "poly/simplex.hpp"

#include <algorithm>
#include <cassert>
#include <map>

namespace poly {

std::uint64_t gChecks, gPivots, gUpdates, gRowTouches; // TEMP instrumentation

SimplexProblem::SimplexProblem(std::uint32_t numVars) : nOriginal(numVars) {
  vars.resize(numVars);
}

const Rational *SimplexProblem::find(const std::vector<RowEntry> &entries,
                                     VarId j) {
  auto it = std::lower_bound(
      entries.begin(), entries.end(), j,
      [](const RowEntry &e, VarId v) { return e.first < v; });
  return it != entries.end() && it->first == j ? &it->second : nullptr;
}

void SimplexProblem::addScaledRow(std::vector<RowEntry> &dst,
                                  const Rational &c,
                                  const std::vector<RowEntry> &src) {
  scratch.clear();
  std::size_t i = 0, k = 0;
  while (i < dst.size() || k < src.size()) {
    if (k == src.size() || (i < dst.size() && dst[i].first < src[k].first)) {
      scratch.push_back(std::move(dst[i++]));
    } else if (i == dst.size() || src[k].first < dst[i].first) {
      Rational v = c * src[k].second;
      if (!v.isZero())
        scratch.emplace_back(src[k].first, std::move(v));
      ++k;
    } else {
      Rational v = std::move(dst[i].second) + c * src[k].second;
      if (!v.isZero())
        scratch.emplace_back(dst[i].first, std::move(v));
      ++i;
      ++k;
    }
  }
  dst.swap(scratch);
}

DeltaValue SimplexProblem::eval(const std::vector<RowEntry> &entries) const {
  DeltaValue sum;
  for (const auto &[v, c] : entries)
    sum += c * vars[v].value;
  return sum;
}

SimplexProblem::VarId SimplexProblem::slackForTerm(const SparseVector &term) {
  assert(!term.isEmpty() && term.leadingCoeff().sign() > 0);
  if (term.size() == 1) {
    assert(term.leadingCoeff() == Rational(1) &&
           "single-variable terms must be unit to act as their own slack");
    assert(*term.minIndex() < nOriginal);
    return *term.minIndex();
  }
  auto it = slackByTerm.find(term);
  if (it != slackByTerm.end())
    return it->second;

  // New slack: define it by the term with any currently-basic variable
  // replaced by its row, so the new row ranges over nonbasic variables only.
  std::vector<RowEntry> row;
  term.forEach([&](SparseVector::Index v, const Rational &c) {
    assert(v < nOriginal && "terms must range over original variables");
    if (vars[v].basic)
      addScaledRow(row, c, rows[std::size_t(vars[v].rowSlot)].entries);
    else
      addScaledRow(row, c, {{v, Rational(1)}});
  });
  assert(!row.empty() && "nonzero terms cannot collapse: nonbasic "
                         "variables are independent coordinates");
  VarId s = static_cast<VarId>(vars.size());
  vars.emplace_back();
  vars[s].basic = true;
  vars[s].rowSlot = static_cast<std::int32_t>(rows.size());
  vars[s].value = eval(row);
  rows.push_back(Row{s, std::move(row)});
  slackByTerm.emplace(term, s);
  return s;
}

std::vector<SimplexProblem::BoundSpec>
SimplexProblem::boundSpecs(const Constraint &c) {
  assert(!c.term.isEmpty() && "trivial constraints have no slack form");
  auto [norm, g] = gcdNormalize(c.term);
  bool flipped = norm.leadingCoeff().sign() < 0;
  SparseVector t = flipped ? -norm : norm;
  Rational b = c.bound / g;
  VarId var = slackForTerm(t);
  Rational invg = g.reciprocal();

  // Unflipped: t.x (cmp) b, an upper bound; flipped: t.x (rev cmp) -b, a
  // lower bound. A unit multiplier on either inequality bound recovers 1/g
  // of the constraint; equality sides carry opposite signs.
  std::vector<BoundSpec> out;
  switch (c.cmp) {
  case Cmp::LE:
  case Cmp::LT: {
    bool strict = c.cmp == Cmp::LT;
    if (!flipped)
      out.push_back({var, Side::Upper,
                     DeltaValue{b, Rational(strict ? -1 : 0)}, invg});
    else
      out.push_back({var, Side::Lower,
                     DeltaValue{-b, Rational(strict ? 1 : 0)}, invg});
    break;
  }
  case Cmp::EQ: {
    DeltaValue v{flipped ? -b : b, Rational(0)};
    Rational up = flipped ? -invg : invg;
    out.push_back({var, Side::Upper, v, up});
    out.push_back({var, Side::Lower, v, -up});
    break;
  }
  }
  return out;
}

void SimplexProblem::addConstraint(ConstraintId id, const Constraint &c) {
  for (const BoundSpec &spec : boundSpecs(c)) {
    const std::optional<BoundValue> &cur = bound(spec.var, spec.side);
    bool tighter = !cur || (spec.side == Side::Upper ? spec.value < cur->value
                                                     : spec.value > cur->value);
    if (tighter)
      setBound(spec.var, spec.side,
               BoundValue{spec.value, BoundOrigin{id, spec.factor}});
  }
}

const std::optional<SimplexProblem::BoundValue> &
SimplexProblem::bound(VarId v, Side s) const {
  return s == Side::Lower ? vars[v].lower : vars[v].upper;
}

std::optional<SimplexProblem::BoundValue>
SimplexProblem::setBound(VarId v, Side s, std::optional<BoundValue> b) {
  auto &slot = s == Side::Lower ? vars[v].lower : vars[v].upper;
  std::optional<BoundValue> old = std::move(slot);
  slot = std::move(b);

  // Keep nonbasic variables within their bounds; basic violations wait for
  // check(). Both sides need a look: clearing one side of a crossed pair can
  // re-expose the other. With bounds still crossed there is nowhere
  // consistent to move, and check() reports the crossing before values
  // matter.
  VarState &st = vars[v];
  if (!st.basic && !(st.lower && st.upper &&
                     st.upper->value < st.lower->value)) {
    if (st.lower && st.value < st.lower->value)
      update(v, st.lower->value);
    else if (st.upper && st.value > st.upper->value)
      update(v, st.upper->value);
  }
  return old;
}

void SimplexProblem::update(VarId j, const DeltaValue &v) {
  ++gUpdates;
  assert(!vars[j].basic);
  DeltaValue theta = v - vars[j].value;
  vars[j].value = v;
  for (const Row &r : rows) {
    ++gRowTouches;
    if (const Rational *akj = find(r.entries, j))
      vars[r.basicVar].value += *akj * theta;
  }
}

void SimplexProblem::pivotAndUpdate(VarId i, VarId j,
                                    const DeltaValue &target) {
  ++gPivots;
  const std::size_t slot = std::size_t(vars[i].rowSlot);
  const Rational *aij = find(rows[slot].entries, j);
  assert(aij && !aij->isZero());
  const Rational inv = aij->reciprocal();

  // Value shuffle first (uses the pre-pivot coefficients).
  DeltaValue theta = inv * (target - vars[i].value);
  vars[i].value = target;
  vars[j].value += theta;
  for (const Row &r : rows) {
    if (r.basicVar == i)
      continue;
    if (const Rational *akj = find(r.entries, j))
      vars[r.basicVar].value += *akj * theta;
  }

  // Row pivot: solve row i for x_j, then substitute everywhere else.
  //   x_i = sum a_ik x_k   =>   x_j = (x_i - sum_{k != j} a_ik x_k) / a_ij
  // `delta` is x_j's new definition minus the unit entry on x_j itself, so
  // adding a_kj * delta to row k both removes its x_j entry and substitutes.
  std::vector<RowEntry> delta;
  delta.reserve(rows[slot].entries.size() + 1);
  for (const RowEntry &e : rows[slot].entries)
    delta.emplace_back(e.first, e.first == j ? Rational(-1) : -inv * e.second);
  auto ipos = std::lower_bound(
      delta.begin(), delta.end(), i,
      [](const RowEntry &e, VarId v) { return e.first < v; });
  delta.emplace(ipos, i, inv);

  for (Row &r : rows) {
    if (r.basicVar == i)
      continue;
    if (const Rational *akj = find(r.entries, j)) {
      Rational c = *akj; // the merge rewrites the entry the pointer aims at
      addScaledRow(r.entries, c, delta);
    }
  }

  std::vector<RowEntry> rowJ = std::move(delta);
  for (RowEntry &e : rowJ)
    if (e.first == j) {
      std::swap(e, rowJ.back());
      rowJ.pop_back();
      break;
    }
  std::sort(rowJ.begin(), rowJ.end(),
            [](const RowEntry &a, const RowEntry &b) {
              return a.first < b.first;
            });
  rows[slot].basicVar = j;
  rows[slot].entries = std::move(rowJ);
  vars[j].basic = true;
  vars[j].rowSlot = static_cast<std::int32_t>(slot);
  vars[i].basic = false;
  vars[i].rowSlot = -1;
}

namespace {

/// Folds (multiplier, origin) pairs into per-constraint coefficients and
/// scales the result so the smallest positive coefficient (or smallest
/// magnitude, when all are negative) becomes 1.
SimplexProblem::UnsatWitness
foldWitness(const std::vector<std::pair<Rational, SimplexProblem::BoundOrigin>>
                &parts) {
  std::map<std::uint32_t, Rational> acc;
  for (const auto &[mult, origin] : parts)
    acc[origin.cid.value] += mult * origin.factor;

  std::optional<Rational> unit; // smallest positive, else smallest magnitude
  bool unitPositive = false;
  for (const auto &[cid, coef] : acc) {
    if (coef.isZero())
      continue;
    bool pos = coef.sign() > 0;
    Rational mag = coef.abs();
    if (!unit || (pos && !unitPositive) || (pos == unitPositive && mag < *unit)) {
      unit = mag;
      unitPositive = pos;
    }
  }

  SimplexProblem::UnsatWitness out;
  for (auto &[cid, coef] : acc)
    if (!coef.isZero())
      out.emplace_back(ConstraintId{cid}, coef / *unit);
  return out;
}

} // namespace

SimplexProblem::Infeasible SimplexProblem::stuckWitness(VarId bad,
                                                        bool belowLower) const {
  std::vector<std::pair<Rational, BoundOrigin>> parts;
  const VarState &st = vars[bad];
  const BoundValue &own = belowLower ? *st.lower : *st.upper;
  assert(own.origin && "witness requires an origin on every bound");
  parts.emplace_back(Rational(1), *own.origin);

  // Row identity: x_bad - sum a_j x_j = 0. Each nonbasic variable is pinned
  // at the bound that blocks progress; adding those bounds with the row's
  // coefficients cancels every variable and leaves an impossible constant.
  for (const auto &[j, a] : rows[std::size_t(st.rowSlot)].entries) {
    bool wantUpper = belowLower ? a.sign() > 0 : a.sign() < 0;
    const std::optional<BoundValue> &b =
        wantUpper ? vars[j].upper : vars[j].lower;
    assert(b && b->origin && "stuck row: every column is pinned at a bound");
    parts.emplace_back(a.abs(), *b->origin);
  }
  return Infeasible{foldWitness(parts)};
}

SimplexProblem::Outcome SimplexProblem::check() {
  ++gChecks;
  // Crossed bound pairs clash without any pivoting.
  for (VarId v = 0; v < vars.size(); ++v) {
    const VarState &st = vars[v];
    if (st.lower && st.upper && st.upper->value < st.lower->value) {
      assert(st.lower->origin && st.upper->origin);
      return Infeasible{foldWitness({{Rational(1), *st.lower->origin},
                                     {Rational(1), *st.upper->origin}})};
    }
  }

  for (;;) {
    // Bland's rule, first half: the violating basic variable of smallest id.
    VarId bad = 0;
    bool belowLower = false, found = false;
    for (VarId v = 0; v < vars.size() && !found; ++v) {
      const VarState &st = vars[v];
      if (!st.basic)
        continue;
      if (st.lower && st.value < st.lower->value) {
        bad = v;
        belowLower = true;
        found = true;
      } else if (st.upper && st.value > st.upper->value) {
        bad = v;
        belowLower = false;
        found = true;
      }
    }
    if (!found)
      break;

    // Second half: the smallest nonbasic variable with slack to move the
    // right way. Row entries are sorted by id.
    const VarState &st = vars[bad];
    std::optional<VarId> enter;
    for (const auto &[j, a] : rows[std::size_t(st.rowSlot)].entries) {
      const VarState &cand = vars[j];
      bool canGrow = !cand.upper || cand.value < cand.upper->value;
      bool canShrink = !cand.lower || cand.value > cand.lower->value;
      if (belowLower ? (a.sign() > 0 ? canGrow : canShrink)
                     : (a.sign() > 0 ? canShrink : canGrow)) {
        enter = j;
        break;
      }
    }
    if (!enter)
      return stuckWitness(bad, belowLower);
    pivotAndUpdate(bad, *enter,
                   belowLower ? st.lower->value : st.upper->value);
  }

  // Model extraction: pick an instantiation for the infinitesimal small
  // enough that every delta-comparison stays valid over the plain rationals.
  Rational eps(1);
  for (const VarState &st : vars) {
    const auto &[r, d] = st.value;
    if (st.lower) {
      const auto &[lr, ld] = st.lower->value;
      if (r > lr && ld > d)
        eps = std::min(eps, (r - lr) / (ld - d));
    }
    if (st.upper) {
      const auto &[ur, ud] = st.upper->value;
      if (r < ur && d > ud)
        eps = std::min(eps, (ur - r) / (d - ud));
    }
  }
  SparseVector point;
  for (VarId v = 0; v < nOriginal; ++v)
    point = point.with(v, vars[v].value.at(eps));
  return Feasible{point};
}

bool SimplexProblem::invariantHolds() const {
  for (VarId v = 0; v < vars.size(); ++v) {
    const VarState &st = vars[v];
    if (st.basic != (st.rowSlot >= 0 &&
                     std::size_t(st.rowSlot) < rows.size() &&
                     rows[std::size_t(st.rowSlot)].basicVar == v))
      return false;
    if (st.basic && !(eval(rows[std::size_t(st.rowSlot)].entries) == st.value))
      return false;
    bool crossed =
        st.lower && st.upper && st.upper->value < st.lower->value;
    if (!st.basic && !crossed) {
      if (st.lower && st.value < st.lower->value)
        return false;
      if (st.upper && st.value > st.upper->value)
        return false;
    }
  }
  for (const Row &r : rows) {
    if (!vars[r.basicVar].basic)
      return false;
    for (std::size_t k = 0; k < r.entries.size(); ++k) {
      if (k && !(r.entries[k - 1].first < r.entries[k].first))
        return false;
      if (r.entries[k].second.isZero() || vars[r.entries[k].first].basic)
        return false;
    }
  }
  return true;
}

} // namespace poly
