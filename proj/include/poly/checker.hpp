#pragma once

#include <string>

#include "poly/certificate.hpp"

namespace poly {

/// Verdict of an independent certificate check.
struct CheckOutcome {
  bool ok;
  std::string reason; ///< First failure found; empty when ok.
};

/// Verifies `cert` against plain constraint lists: an inclusion certificate
/// must prove every target constraint from the premise rows, an emptiness
/// certificate must recombine the premise into a trivially false constraint.
/// The check is pure arithmetic over exact rationals -- fold the cited rows
/// with their multipliers, compare against the target -- with no solver and
/// no dependence on how the certificate was produced.
CheckOutcome checkCert(const CheckerPolyhedron &premise,
                       const CheckerPolyhedron &target, const Cert &cert);

} // namespace poly
