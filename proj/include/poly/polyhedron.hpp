#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "poly/certificate.hpp"
#include "poly/constraint.hpp"

namespace poly {

/// An equality kept as the definition of one of its variables. The defining
/// equations of a polyhedron are triangular: a defined variable never occurs
/// in a later definition, so substituting them in storage order eliminates
/// all of them.
struct DefinedEq {
  SparseVector::Index var;
  ConstraintId id;
  Constraint cons; // cmp == EQ, cons.term.get(var) != 0
};

/// Canonical-form convex polyhedron: either an explicit empty element
/// (carrying the premises it was detected over and the combination that
/// refutes them) or a minimized constraint system split into defining
/// equalities and irredundant inequalities.
///
/// Non-empty values maintain, by construction in the operators:
///  (1) no inequality holds with equality everywhere (those are promoted),
///  (2) no constraint is implied by the others,
///  (3) every constraint is gcd-canonical,
///  (4) defined variables do not occur in the inequalities,
///  (5) emptiness is always the explicit Bot form.
/// Constraint ids are sequential from 0, equalities first.
class Polyhedron {
public:
  static Polyhedron top(std::uint32_t nvars);
  static Polyhedron bottom(std::uint32_t nvars, CheckerPolyhedron premise,
                           CertFragment witness);
  static Polyhedron make(std::uint32_t nvars, std::vector<DefinedEq> eqs,
                         std::vector<std::pair<ConstraintId, Constraint>> ineqs);

  std::uint32_t numVars() const { return nvars; }
  bool isBot() const { return bot.has_value(); }

  /// The refuted-premise payload; only present on Bot.
  const CheckerPolyhedron &botPremise() const { return bot->premise; }
  const CertFragment &botWitness() const { return bot->witness; }

  const std::vector<DefinedEq> &eqs() const { return eqsList; }
  const std::vector<std::pair<ConstraintId, Constraint>> &ineqs() const {
    return ineqsList;
  }
  std::size_t constraintCount() const {
    return isBot() ? 0 : eqsList.size() + ineqsList.size();
  }

  /// Checker view: id/constraint pairs. For Bot this is the stored premise
  /// (the system the emptiness combination refers to), not the empty list.
  CheckerPolyhedron flatten() const;

  /// `poly 2 { 0: 1*x0 = 1; 1: 1*x1 <= 2 }`; Bot prints as `poly 2 bot`.
  std::string toString() const;

private:
  struct BotState {
    CheckerPolyhedron premise;
    CertFragment witness;
  };

  std::uint32_t nvars = 0;
  std::optional<BotState> bot;
  std::vector<DefinedEq> eqsList;
  std::vector<std::pair<ConstraintId, Constraint>> ineqsList;
};

/// Parses `poly <nvars> { <id>: <constraint>; ... }` (ids optional; when
/// present they must be the position). Whitespace, including newlines, is
/// insignificant. Returns the raw system; it is not minimized here.
std::pair<std::uint32_t, CheckerPolyhedron>
parseRawSystem(std::string_view text);

} // namespace poly
