#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "poly/constraint.hpp"

namespace poly {

/// Identity of a constraint within one operator call. Ids only have meaning
/// relative to the constraint list they came with; certificates reference
/// constraints by id, never by position.
struct ConstraintId {
  std::uint32_t value = 0;
  auto operator<=>(const ConstraintId &) const = default;
};

/// A nonnegative-combination recipe: coefficients attached to constraint ids,
/// sorted by id, zero coefficients dropped. Negative coefficients are legal
/// only against equalities; that is enforced where fragments are recombined,
/// since the fragment itself does not know the comparators.
using CertFragment = std::vector<std::pair<Rational, ConstraintId>>;

/// k1*f1 + k2*f2: merges two fragments, combining coefficients on shared ids
/// and dropping entries that cancel.
CertFragment fragScaleConcat(const Rational &k1, const CertFragment &f1,
                             const Rational &k2, const CertFragment &f2);

/// Proof that one target constraint follows from the source constraints:
/// recombining `combo` over the sources must entail the constraint with id
/// `target` on the other side.
struct CertItem {
  ConstraintId target;
  CertFragment combo;
};

/// Inclusion certificate: one item per target inequality, and either one item
/// (an equality combination) or two (the two bounding halves) per target
/// equality.
struct InclCert {
  std::vector<CertItem> items;
};

/// Emptiness certificate: the combination recombines to a trivially false
/// constraint over the source system.
struct EmptyCert {
  CertFragment combo;
};

using Cert = std::variant<InclCert, EmptyCert>;

/// The checker-facing view of a constraint system: ids paired with
/// constraints, in no particular id order.
using CheckerPolyhedron = std::vector<std::pair<ConstraintId, Constraint>>;

/// A constraint carried together with the recipe that rebuilds it from some
/// fixed source system.
struct TaggedConstraint {
  CertFragment frag;
  Constraint cons;
};

/// Identity tagging: each constraint gets the one-entry fragment [(1, id)].
std::vector<TaggedConstraint> initFragments(const CheckerPolyhedron &p);

/// Text forms:
///   incl { 3: [(1, 0), (2, 1)]; 4: [(1, 2)] }
///   empty [(1, 0), (1, 1)]
/// Fragment entries are (coefficient, source id); item keys are target ids.
std::string toString(const Cert &cert);
Cert parseCert(std::string_view text);

} // namespace poly
