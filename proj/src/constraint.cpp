#include "poly/constraint.hpp"

#include <cassert>
#include <cctype>
#include <charconv>
#include <stdexcept>
#include <utility>

namespace poly {

std::string_view cmpSymbol(Cmp c) {
  switch (c) {
  case Cmp::LE:
    return "<=";
  case Cmp::LT:
    return "<";
  case Cmp::EQ:
    return "=";
  }
  return "?";
}

bool Constraint::triviallyTrue() const {
  if (!term.isEmpty())
    return false;
  switch (cmp) {
  case Cmp::LE:
    return bound.sign() >= 0;
  case Cmp::LT:
    return bound.sign() > 0;
  case Cmp::EQ:
    return bound.isZero();
  }
  return false;
}

bool Constraint::triviallyFalse() const {
  return term.isEmpty() && !triviallyTrue();
}

std::string Constraint::toString() const {
  std::string out;
  if (term.isEmpty()) {
    out = "0";
  } else {
    bool first = true;
    term.forEach([&](SparseVector::Index i, const Rational &v) {
      if (!first)
        out += " + ";
      first = false;
      out += v.toString();
      out += "*x";
      out += std::to_string(i);
    });
  }
  out += ' ';
  out += cmpSymbol(cmp);
  out += ' ';
  out += bound.toString();
  return out;
}

bool satisfies(const Constraint &c, const SparseVector &point) {
  Rational lhs = dot(c.term, point);
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

Constraint canonical(const Constraint &c) {
  if (c.term.isEmpty())
    return c;
  auto [scaled, g] = gcdNormalize(c.term);
  Constraint out(std::move(scaled), c.cmp, c.bound / g);
  if (out.cmp == Cmp::EQ && out.term.leadingCoeff().sign() < 0) {
    out.term = -out.term;
    out.bound = -out.bound;
  }
  return out;
}

Constraint combine(const Rational &k1, const Constraint &c1,
                   const Rational &k2, const Constraint &c2) {
  if (k1.sign() < 0 && c1.cmp != Cmp::EQ)
    throw std::invalid_argument("combine: negative coefficient on inequality");
  if (k2.sign() < 0 && c2.cmp != Cmp::EQ)
    throw std::invalid_argument("combine: negative coefficient on inequality");
  Constraint out(scale(k1, c1.term) + scale(k2, c2.term), Cmp::LE,
                 k1 * c1.bound + k2 * c2.bound);
  if (c1.cmp == Cmp::EQ && c2.cmp == Cmp::EQ)
    out.cmp = Cmp::EQ;
  else if ((c1.cmp == Cmp::LT && !k1.isZero()) ||
           (c2.cmp == Cmp::LT && !k2.isZero()))
    out.cmp = Cmp::LT;
  return canonical(out);
}

Constraint complement(const Constraint &c) {
  switch (c.cmp) {
  case Cmp::LE:
    return Constraint(-c.term, Cmp::LT, -c.bound);
  case Cmp::LT:
    return Constraint(-c.term, Cmp::LE, -c.bound);
  case Cmp::EQ:
    break;
  }
  throw std::invalid_argument("complement: equality has no single complement");
}

std::optional<Rational> syntacticIncl(const Constraint &c1,
                                      const Constraint &c2) {
  if (c1.term.isEmpty() || c2.term.isEmpty())
    return std::nullopt;
  SparseVector::Index lead = *c1.term.minIndex();
  Rational denom = c1.term.get(lead);
  Rational k = c2.term.get(lead) / denom;
  if (k.sign() <= 0)
    return std::nullopt;
  if (scale(k, c1.term) != c2.term)
    return std::nullopt;
  Rational kb = k * c1.bound;
  bool ok = false;
  switch (c2.cmp) {
  case Cmp::LE:
    ok = kb <= c2.bound;
    break;
  case Cmp::LT:
    // A non-strict source only proves a strict target across a real gap.
    ok = c1.cmp == Cmp::LT ? kb <= c2.bound : kb < c2.bound;
    break;
  case Cmp::EQ:
    ok = c1.cmp == Cmp::EQ && kb == c2.bound;
    break;
  }
  if (!ok)
    return std::nullopt;
  return k;
}

SubstResult substitute(const Constraint &c, const std::vector<EqDef> &defs) {
  SubstResult out;
  out.result = c;
  out.coeffs.reserve(defs.size());
  for (const EqDef &def : defs) {
    assert(def.eq.cmp == Cmp::EQ && "definitions must be equalities");
    Rational coef = out.result.term.get(def.var);
    if (coef.isZero()) {
      out.coeffs.emplace_back();
      continue;
    }
    Rational mu = -coef / def.eq.term.get(def.var);
    out.result.term = out.result.term + scale(mu, def.eq.term);
    out.result.bound += mu * def.eq.bound;
    assert(!out.result.term.contains(def.var));
    out.coeffs.push_back(std::move(mu));
  }
  return out;
}

namespace {

std::string_view trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void parseFail(std::string_view text, const char *why) {
  throw std::invalid_argument("bad constraint '" + std::string(text) +
                              "': " + why);
}

} // namespace

Constraint parseConstraint(std::string_view text) {
  std::string_view rest = text;
  std::size_t pos = rest.find_first_of("<=");
  if (pos == std::string_view::npos)
    parseFail(text, "missing comparator");
  Cmp cmp;
  std::size_t cmpLen;
  if (rest[pos] == '=') {
    cmp = Cmp::EQ;
    cmpLen = 1;
  } else if (pos + 1 < rest.size() && rest[pos + 1] == '=') {
    cmp = Cmp::LE;
    cmpLen = 2;
  } else {
    cmp = Cmp::LT;
    cmpLen = 1;
  }
  std::string_view lhs = trimmed(rest.substr(0, pos));
  std::string_view rhs = trimmed(rest.substr(pos + cmpLen));
  if (rhs.find_first_of("<=") != std::string_view::npos)
    parseFail(text, "more than one comparator");

  Constraint out;
  out.cmp = cmp;
  try {
    out.bound = Rational::fromString(rhs);
  } catch (const std::invalid_argument &) {
    parseFail(text, "right-hand side is not a rational");
  }

  if (lhs.empty())
    parseFail(text, "empty left-hand side");
  while (!lhs.empty()) {
    std::size_t plus = lhs.find('+');
    std::string_view piece = trimmed(lhs.substr(0, plus));
    lhs = plus == std::string_view::npos ? std::string_view()
                                         : lhs.substr(plus + 1);
    if (piece == "0")
      continue;
    std::size_t star = piece.find('*');
    if (star == std::string_view::npos)
      parseFail(text, "term without '*' (write coef*x<i>, or 0)");
    std::string_view coefText = trimmed(piece.substr(0, star));
    std::string_view varText = trimmed(piece.substr(star + 1));
    Rational coef;
    try {
      coef = Rational::fromString(coefText);
    } catch (const std::invalid_argument &) {
      parseFail(text, "coefficient is not a rational");
    }
    if (varText.size() < 2 || varText[0] != 'x')
      parseFail(text, "variable must look like x<i>");
    SparseVector::Index idx = 0;
    auto [ptr, ec] = std::from_chars(varText.data() + 1,
                                     varText.data() + varText.size(), idx);
    if (ec != std::errc() || ptr != varText.data() + varText.size())
      parseFail(text, "variable must look like x<i>");
    out.term = out.term + SparseVector::unit(idx, coef);
  }
  return out;
}

} // namespace poly
