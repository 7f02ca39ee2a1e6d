#include <map>
#include <optional>
#include <sstream>
#include <utility>
#include <variant>
#include <vector>

#include "poly/checker.hpp"

namespace poly {

namespace {

/// A folded linear combination of premise rows. The comparator is the
/// strongest claim the fold supports: an equality when only equality rows
/// take part, strict when any strict row carries a nonzero multiplier.
struct Folded {
  SparseVector term;
  Rational bound;
  Cmp cmp = Cmp::EQ;
};

/// Sums coef * row over the fragment. Fails on unknown ids and on negative
/// multipliers for inequality rows, the two ways a fragment can lie.
std::variant<Folded, std::string>
fold(const std::map<std::uint32_t, const Constraint *> &rows,
     const CertFragment &frag) {
  Folded out;
  bool anyStrict = false, allEq = true;
  for (const auto &[coef, id] : frag) {
    auto it = rows.find(id.value);
    if (it == rows.end()) {
      std::ostringstream os;
      os << "fragment cites unknown constraint id " << id.value;
      return os.str();
    }
    const Constraint &c = *it->second;
    if (c.cmp != Cmp::EQ) {
      if (coef.sign() < 0) {
        std::ostringstream os;
        os << "negative multiplier " << coef.toString()
           << " on inequality id " << id.value;
        return os.str();
      }
      if (!coef.isZero()) {
        allEq = false;
        if (c.cmp == Cmp::LT)
          anyStrict = true;
      }
    }
    out.term = out.term + coef * c.term;
    out.bound = out.bound + coef * c.bound;
  }
  out.cmp = allEq ? Cmp::EQ : (anyStrict ? Cmp::LT : Cmp::LE);
  return out;
}

bool triviallyFalseFold(const Folded &f) {
  if (!f.term.isEmpty())
    return false;
  switch (f.cmp) {
  case Cmp::EQ:
    return !f.bound.isZero();
  case Cmp::LE:
    return f.bound.sign() < 0;
  case Cmp::LT:
    return f.bound.sign() <= 0;
  }
  return false;
}

bool triviallyTrueConstraint(const Constraint &c) {
  if (!c.term.isEmpty())
    return false;
  switch (c.cmp) {
  case Cmp::EQ:
    return c.bound.isZero();
  case Cmp::LE:
    return c.bound.sign() >= 0;
  case Cmp::LT:
    return c.bound.sign() > 0;
  }
  return false;
}

/// Whether the folded combination forces the target: the terms must agree
/// exactly, and the fold's bound must be at least as tight as the target's,
/// strictly so when a strict target rests on a non-strict fold. Producers
/// always emit combinations at the target's own scale, so accepting a
/// rescaled term would only widen what a corrupted certificate can pass.
bool entails(const Folded &f, const Constraint &target) {
  if (f.term.isEmpty())
    return triviallyFalseFold(f) || triviallyTrueConstraint(target);
  if (!(f.term == target.term))
    return false;
  switch (target.cmp) {
  case Cmp::EQ:
    return f.cmp == Cmp::EQ && f.bound == target.bound;
  case Cmp::LE:
    return f.bound <= target.bound;
  case Cmp::LT:
    return f.cmp == Cmp::LT ? f.bound <= target.bound : f.bound < target.bound;
  }
  return false;
}

/// An equality target also accepts its exact mirror image: the fold states
/// the same equality with the opposite orientation.
bool entailsEq(const Folded &f, const Constraint &target) {
  if (entails(f, target))
    return true;
  return target.cmp == Cmp::EQ && f.cmp == Cmp::EQ &&
         f.term == -target.term && f.bound == -target.bound;
}

std::string describe(ConstraintId id, const Constraint &c) {
  std::ostringstream os;
  os << "target " << id.value << " (" << c.toString() << ")";
  return os.str();
}

} // namespace

CheckOutcome checkCert(const CheckerPolyhedron &premise,
                       const CheckerPolyhedron &target, const Cert &cert) {
  std::map<std::uint32_t, const Constraint *> rows;
  for (const auto &[id, c] : premise)
    if (!rows.emplace(id.value, &c).second)
      return {false, "duplicate premise id"};

  if (const auto *empty = std::get_if<EmptyCert>(&cert)) {
    auto f = fold(rows, empty->combo);
    if (const auto *err = std::get_if<std::string>(&f))
      return {false, *err};
    if (!triviallyFalseFold(std::get<Folded>(f)))
      return {false, "emptiness combination is not trivially false"};
    return {true, {}};
  }

  const auto &incl = std::get<InclCert>(cert);
  std::map<std::uint32_t, const Constraint *> targets;
  for (const auto &[id, c] : target)
    if (!targets.emplace(id.value, &c).second)
      return {false, "duplicate target id"};
  std::map<std::uint32_t, std::vector<const CertFragment *>> byTarget;
  for (const CertItem &item : incl.items) {
    if (!targets.count(item.target.value))
      return {false, "item aims at an id outside the target system"};
    byTarget[item.target.value].push_back(&item.combo);
  }

  for (const auto &[id, c] : target) {
    auto it = byTarget.find(id.value);
    if (it == byTarget.end())
      return {false, "no item covers " + describe(id, c)};
    const auto &items = it->second;

    if (c.cmp != Cmp::EQ) {
      if (items.size() != 1)
        return {false, "inequality " + describe(id, c) + " needs one item"};
      auto f = fold(rows, *items[0]);
      if (const auto *err = std::get_if<std::string>(&f))
        return {false, *err};
      if (!entails(std::get<Folded>(f), c))
        return {false, "combination fails to prove " + describe(id, c)};
      continue;
    }

    // An equality target takes either one equality combination or one item
    // per direction, in either order.
    if (items.size() == 1) {
      auto f = fold(rows, *items[0]);
      if (const auto *err = std::get_if<std::string>(&f))
        return {false, *err};
      if (!entails(std::get<Folded>(f), c))
        return {false, "combination fails to prove " + describe(id, c)};
      continue;
    }
    if (items.size() != 2)
      return {false, "equality " + describe(id, c) + " needs one or two items"};
    Constraint leHalf{c.term, Cmp::LE, c.bound};
    Constraint geHalf{-c.term, Cmp::LE, -c.bound};
    std::optional<std::string> bad;
    auto half = [&](const CertFragment &frag, const Constraint &h) {
      auto f = fold(rows, frag);
      if (const auto *err = std::get_if<std::string>(&f)) {
        bad = *err;
        return false;
      }
      return entails(std::get<Folded>(f), h);
    };
    bool order1 = half(*items[0], leHalf) && half(*items[1], geHalf);
    if (bad)
      return {false, *bad};
    if (!order1) {
      bool order2 = half(*items[0], geHalf) && half(*items[1], leHalf);
      if (bad)
        return {false, *bad};
      if (!order2)
        return {false, "halves fail to prove " + describe(id, c)};
    }
  }
  return {true, {}};
}

} // namespace poly
