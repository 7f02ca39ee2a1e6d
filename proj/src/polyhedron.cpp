#include "poly/polyhedron.hpp"

#include <cassert>
#include <cctype>
#include <charconv>
#include <stdexcept>

namespace poly {

Polyhedron Polyhedron::top(std::uint32_t nvars) {
  Polyhedron p;
  p.nvars = nvars;
  return p;
}

Polyhedron Polyhedron::bottom(std::uint32_t nvars, CheckerPolyhedron premise,
                              CertFragment witness) {
  Polyhedron p;
  p.nvars = nvars;
  p.bot = BotState{std::move(premise), std::move(witness)};
  return p;
}

Polyhedron Polyhedron::make(
    std::uint32_t nvars, std::vector<DefinedEq> eqs,
    std::vector<std::pair<ConstraintId, Constraint>> ineqs) {
  Polyhedron p;
  p.nvars = nvars;
  p.eqsList = std::move(eqs);
  p.ineqsList = std::move(ineqs);
#ifndef NDEBUG
  std::uint32_t next = 0;
  for (const DefinedEq &eq : p.eqsList) {
    assert(eq.id.value == next++ && "ids are sequential, equalities first");
    assert(eq.cons.cmp == Cmp::EQ && !eq.cons.term.get(eq.var).isZero());
  }
  for (const auto &[id, cons] : p.ineqsList) {
    assert(id.value == next++);
    assert(cons.cmp != Cmp::EQ && !cons.term.isEmpty());
  }
#endif
  return p;
}

CheckerPolyhedron Polyhedron::flatten() const {
  if (bot)
    return bot->premise;
  CheckerPolyhedron out;
  out.reserve(eqsList.size() + ineqsList.size());
  for (const DefinedEq &eq : eqsList)
    out.emplace_back(eq.id, eq.cons);
  for (const auto &e : ineqsList)
    out.push_back(e);
  return out;
}

std::string Polyhedron::toString() const {
  std::string out = "poly " + std::to_string(nvars);
  if (bot)
    return out + " bot";
  out += " {";
  bool first = true;
  for (const auto &[id, cons] : flatten()) {
    out += first ? " " : "; ";
    first = false;
    out += std::to_string(id.value);
    out += ": ";
    out += cons.toString();
  }
  out += first ? "}" : " }";
  return out;
}

std::pair<std::uint32_t, CheckerPolyhedron>
parseRawSystem(std::string_view text) {
  std::size_t pos = 0;
  auto fail = [&](const char *why) -> void {
    throw std::invalid_argument("bad polyhedron at offset " +
                                std::to_string(pos) + ": " + why);
  };
  auto skip = [&] {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  };
  auto word = [&](std::string_view w) {
    skip();
    if (text.substr(pos, w.size()) != w)
      return false;
    pos += w.size();
    return true;
  };
  auto number = [&]() -> std::uint32_t {
    skip();
    std::uint32_t v = 0;
    auto [p, ec] =
        std::from_chars(text.data() + pos, text.data() + text.size(), v);
    if (ec != std::errc() || p == text.data() + pos)
      fail("expected a number");
    pos = p - text.data();
    return v;
  };

  if (!word("poly"))
    fail("expected 'poly'");
  std::uint32_t nvars = number();
  if (!word("{"))
    fail("expected '{'");

  CheckerPolyhedron cons;
  skip();
  while (pos < text.size() && text[pos] != '}') {
    // Optional positional id prefix: "<n>:".
    std::size_t save = pos;
    std::uint32_t id = static_cast<std::uint32_t>(cons.size());
    if (std::isdigit(static_cast<unsigned char>(text[pos]))) {
      std::uint32_t n = number();
      skip();
      if (pos < text.size() && text[pos] == ':') {
        ++pos;
        if (n != cons.size())
          fail("ids must be positional");
        id = n;
      } else {
        pos = save; // the digits belong to the constraint
      }
    }
    skip();
    std::size_t end = text.find_first_of(";}", pos);
    if (end == std::string_view::npos)
      fail("unterminated constraint list");
    cons.emplace_back(ConstraintId{id},
                      parseConstraint(text.substr(pos, end - pos)));
    pos = end;
    if (text[pos] == ';')
      ++pos;
    skip();
  }
  if (!word("}"))
    fail("expected '}'");
  skip();
  if (pos != text.size())
    fail("trailing characters");

  for (const auto &[id, c] : cons)
    c.term.forEach([&](SparseVector::Index i, const Rational &) {
      if (i >= nvars)
        throw std::invalid_argument("variable x" + std::to_string(i) +
                                    " out of range for poly " +
                                    std::to_string(nvars));
    });
  return {nvars, std::move(cons)};
}

} // namespace poly
