#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "poly/domain.hpp"

namespace poly::trace {

/// Statement forms of the trace language, one per line:
///
///   P := poly 2 { 1*x1 <= 1; 2*x0 + 1*x1 <= 2 }
///   M := meet A B          J := join A B         W := widen A B
///   Q := project A x0 x2
///   R := assign A x0 := 1*x1 + 2, x1 := 3
///   incl A B true          incl A B false        incl A B
///   assert_eq A B
///
/// `#` starts a comment; blank lines are skipped.
enum class OpKind { Define, Meet, Join, Widen, Project, Assign, Incl, AssertEq };

/// The statement keyword ("poly", "meet", ..., "incl", "assert_eq"); also
/// used as the operation label in reports.
std::string_view opKindName(OpKind k);

/// One parsed statement. A single struct rather than a variant keeps replay
/// and printing table-driven; fields a form does not use stay empty.
struct Stmt {
  OpKind kind = OpKind::Define;
  std::size_t line = 0; ///< 1-based source line, for error messages.
  std::string dst;      ///< Result name; empty for incl / assert_eq.
  std::string a, b;     ///< Operand names; b only for the binary forms.
  std::uint32_t nvars = 0;               ///< Define.
  std::vector<Constraint> constraints;   ///< Define.
  std::vector<SparseVector::Index> vars; ///< Project.
  std::vector<AssignClause> clauses;     ///< Assign.
  std::optional<bool> expected;          ///< Incl.

  /// Structural equality; the source line is presentation, not content.
  bool operator==(const Stmt &o) const {
    return kind == o.kind && dst == o.dst && a == o.a && b == o.b &&
           nvars == o.nvars && constraints == o.constraints &&
           vars == o.vars && clauses == o.clauses && expected == o.expected;
  }
};

using Trace = std::vector<Stmt>;

/// Parses trace text. Beyond syntax, checks that every operand was defined
/// by an earlier statement, that both operands of a binary form range over
/// the same number of variables, and that every variable index is in range.
/// Throws std::invalid_argument with "line N: ..." messages.
Trace parse(std::string_view text);

/// Prints a trace in the form parse accepts; parse(print(t)) == t.
std::string print(const Trace &t);

struct ReplayOptions {
  /// Run every emitted certificate through the independent checker and
  /// validate inclusion counterexamples against both systems.
  bool checkCerts = false;
  /// Cross-check each result against the brute-force reference
  /// implementations. Instances over more than four variables (or too many
  /// rows for exponential elimination) are skipped with a notice.
  bool oracle = false;
};

/// One executed statement. Problem size is the sum of the operands'
/// constraint counts; sizes of at most one are flagged trivial and left out
/// of report totals.
struct OpRecord {
  OpKind kind = OpKind::Define;
  std::size_t line = 0;
  std::string dst;
  std::uint64_t problemSize = 0;
  bool trivial = false;
  double ms = 0; ///< Wall time of the operator call alone.
  std::uint32_t resultEqs = 0, resultIneqs = 0;
  bool resultBot = false;
  std::optional<bool> inclVerdict; ///< Incl only.
  std::size_t certsChecked = 0;
  std::optional<bool> oracleOk; ///< Unset when the oracle did not run.
  std::string resultText;       ///< Result polyhedron or verdict, rendered.
};

struct RunReport {
  std::vector<OpRecord> records;
  std::vector<std::string> failures; ///< Expectation/cert/oracle violations.
  std::vector<std::string> notices;  ///< Oracle skips and the like.
  bool ok() const { return failures.empty(); }
};

/// Executes a parsed trace in order. Timing covers the domain calls only,
/// never parsing or bookkeeping. Nothing aborts: expectation mismatches,
/// rejected certificates, and oracle disagreements are collected as
/// failures with their source line.
RunReport replay(const Trace &t, const ReplayOptions &opts = {});

/// Problem-size buckets used for aggregation:
///   0-1, 2-5, 6-10, 11-15, 16-20, 21-25, 26-30, 31+
inline constexpr std::size_t kNumBuckets = 8;
std::size_t bucketOf(std::uint64_t problemSize);
std::string_view bucketLabel(std::size_t bucket);

/// Human-readable aggregation: per operation and size bucket, count, median
/// and total milliseconds. The overall totals line skips trivial records.
std::string formatReport(const RunReport &r);

/// The same aggregation as JSON, plus the raw per-record data.
std::string statsJson(const RunReport &r);

enum class Profile { Box, Octagon, LoopChain };

/// "box", "octagon", or "loop-chain".
std::optional<Profile> profileFromName(std::string_view name);
std::string_view profileName(Profile p);

/// Deterministic synthetic trace for a seed.
///   box:        hypercube pairs under meet/join/project with known-true
///               inclusions.
///   octagon:    +-xi +- xj systems with meets, joins, projections.
///   loop-chain: assign/join/widen iteration in the shape of a loop
///               analysis, run until the invariant is stable.
std::string gen(std::uint64_t seed, Profile profile);

} // namespace poly::trace
