#include "poly/trace.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cctype>
#include <charconv>
#include <chrono>
#include <map>
#include <stdexcept>

#include "json.hpp"
#include "poly/checker.hpp"
#include "poly/oracle.hpp"

namespace orc = poly::oracle;

namespace poly::trace {

std::string_view opKindName(OpKind k) {
  switch (k) {
  case OpKind::Define:
    return "poly";
  case OpKind::Meet:
    return "meet";
  case OpKind::Join:
    return "join";
  case OpKind::Widen:
    return "widen";
  case OpKind::Project:
    return "project";
  case OpKind::Assign:
    return "assign";
  case OpKind::Incl:
    return "incl";
  case OpKind::AssertEq:
    return "assert_eq";
  }
  return "?";
}

namespace {

std::string_view trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(std::size_t line, const std::string &msg) {
  throw std::invalid_argument("line " + std::to_string(line) + ": " + msg);
}

bool isKeyword(std::string_view s) {
  return s == "poly" || s == "meet" || s == "join" || s == "widen" ||
         s == "project" || s == "assign" || s == "incl" || s == "assert_eq" ||
         s == "true" || s == "false";
}

bool validName(std::string_view s) {
  if (s.empty() || isKeyword(s))
    return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')
    return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

std::vector<std::string_view> splitWs(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i])))
      ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])))
      ++j;
    if (j > i)
      out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<SparseVector::Index> parseVarTok(std::string_view tok) {
  if (tok.size() < 2 || tok[0] != 'x')
    return std::nullopt;
  SparseVector::Index idx = 0;
  auto [p, ec] =
      std::from_chars(tok.data() + 1, tok.data() + tok.size(), idx);
  if (ec != std::errc() || p != tok.data() + tok.size())
    return std::nullopt;
  return idx;
}

std::optional<SparseVector::Index> maxIndex(const SparseVector &v) {
  std::optional<SparseVector::Index> m;
  v.forEach([&](SparseVector::Index i, const Rational &) { m = i; });
  return m;
}

/// `<rat>*x<i>` and bare `<rat>` pieces joined by '+'.
std::pair<SparseVector, Rational> parseLinExpr(std::string_view text,
                                               std::size_t line) {
  SparseVector term;
  Rational constant;
  std::string_view lhs = trimmed(text);
  if (lhs.empty())
    fail(line, "empty assignment expression");
  while (!lhs.empty()) {
    std::size_t plus = lhs.find('+');
    std::string_view piece = trimmed(lhs.substr(0, plus));
    lhs = plus == std::string_view::npos ? std::string_view()
                                         : trimmed(lhs.substr(plus + 1));
    if (piece.empty())
      fail(line, "empty term in assignment expression");
    std::size_t star = piece.find('*');
    if (star == std::string_view::npos) {
      try {
        constant = constant + Rational::fromString(piece);
      } catch (const std::invalid_argument &) {
        fail(line, "'" + std::string(piece) + "' is not a rational");
      }
      continue;
    }
    Rational coef;
    try {
      coef = Rational::fromString(trimmed(piece.substr(0, star)));
    } catch (const std::invalid_argument &) {
      fail(line, "coefficient is not a rational");
    }
    auto var = parseVarTok(trimmed(piece.substr(star + 1)));
    if (!var)
      fail(line, "variable must look like x<i>");
    term = term + SparseVector::unit(*var, coef);
  }
  return {std::move(term), std::move(constant)};
}

std::string linExprText(const SparseVector &e, const Rational &c) {
  std::string out;
  e.forEach([&](SparseVector::Index i, const Rational &v) {
    if (!out.empty())
      out += " + ";
    out += v.toString();
    out += "*x";
    out += std::to_string(i);
  });
  if (out.empty())
    return c.toString();
  if (!c.isZero()) {
    out += " + ";
    out += c.toString();
  }
  return out;
}

} // namespace

Trace parse(std::string_view text) {
  Trace out;
  // Name -> variable count, for operand and index validation.
  std::map<std::string, std::uint32_t, std::less<>> defined;

  std::size_t lineNo = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                      : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineNo;

    std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos)
      raw = raw.substr(0, hash);
    raw = trimmed(raw);
    if (raw.empty())
      continue;

    Stmt s;
    s.line = lineNo;
    auto requireDefined = [&](std::string_view nm) -> std::uint32_t {
      auto it = defined.find(nm);
      if (it == defined.end())
        fail(lineNo, "unknown name '" + std::string(nm) + "'");
      return it->second;
    };
    auto requireSameVars = [&](std::uint32_t na, std::uint32_t nb) {
      if (na != nb)
        fail(lineNo, "operands range over different variable counts (" +
                         std::to_string(na) + " vs " + std::to_string(nb) +
                         ")");
    };

    if (raw.starts_with("incl ") || raw == "incl") {
      auto toks = splitWs(raw);
      if (toks.size() != 3 && toks.size() != 4)
        fail(lineNo, "incl takes two names and an optional true/false");
      s.kind = OpKind::Incl;
      s.a = toks[1];
      s.b = toks[2];
      std::uint32_t na = requireDefined(s.a);
      requireSameVars(na, requireDefined(s.b));
      if (toks.size() == 4) {
        if (toks[3] == "true")
          s.expected = true;
        else if (toks[3] == "false")
          s.expected = false;
        else
          fail(lineNo, "expected true or false, got '" + std::string(toks[3]) +
                           "'");
      }
      out.push_back(std::move(s));
      continue;
    }
    if (raw.starts_with("assert_eq ") || raw == "assert_eq") {
      auto toks = splitWs(raw);
      if (toks.size() != 3)
        fail(lineNo, "assert_eq takes two names");
      s.kind = OpKind::AssertEq;
      s.a = toks[1];
      s.b = toks[2];
      std::uint32_t na = requireDefined(s.a);
      requireSameVars(na, requireDefined(s.b));
      out.push_back(std::move(s));
      continue;
    }

    std::size_t def = raw.find(":=");
    if (def == std::string_view::npos)
      fail(lineNo, "unrecognized statement");
    std::string_view name = trimmed(raw.substr(0, def));
    if (!validName(name))
      fail(lineNo, "'" + std::string(name) + "' is not a valid name");
    s.dst = std::string(name);
    std::string_view rest = trimmed(raw.substr(def + 2));
    std::size_t sp = rest.find_first_of(" \t");
    std::string_view kw =
        sp == std::string_view::npos ? rest : rest.substr(0, sp);
    std::string_view args =
        sp == std::string_view::npos ? std::string_view() : trimmed(rest.substr(sp));

    if (kw == "poly") {
      s.kind = OpKind::Define;
      std::size_t brace = args.find('{');
      if (brace == std::string_view::npos || args.back() != '}')
        fail(lineNo, "poly takes a variable count and a { ... } block");
      std::string_view numTok = trimmed(args.substr(0, brace));
      auto [p, ec] = std::from_chars(numTok.data(), numTok.data() + numTok.size(),
                                     s.nvars);
      if (ec != std::errc() || numTok.empty() ||
          p != numTok.data() + numTok.size())
        fail(lineNo, "poly needs a variable count");
      std::string_view body =
          trimmed(args.substr(brace + 1, args.size() - brace - 2));
      while (!body.empty()) {
        std::size_t semi = body.find(';');
        std::string_view one = trimmed(body.substr(0, semi));
        body = semi == std::string_view::npos ? std::string_view()
                                              : trimmed(body.substr(semi + 1));
        if (one.empty())
          fail(lineNo, "empty constraint");
        Constraint c;
        try {
          c = parseConstraint(one);
        } catch (const std::invalid_argument &e) {
          fail(lineNo, e.what());
        }
        if (auto mi = maxIndex(c.term); mi && *mi >= s.nvars)
          fail(lineNo, "variable x" + std::to_string(*mi) +
                           " out of range (poly has " +
                           std::to_string(s.nvars) + ")");
        s.constraints.push_back(std::move(c));
      }
      defined.insert_or_assign(s.dst, s.nvars);
    } else if (kw == "meet" || kw == "join" || kw == "widen") {
      s.kind = kw == "meet"  ? OpKind::Meet
               : kw == "join" ? OpKind::Join
                              : OpKind::Widen;
      auto toks = splitWs(args);
      if (toks.size() != 2)
        fail(lineNo, std::string(kw) + " takes two names");
      s.a = toks[0];
      s.b = toks[1];
      std::uint32_t na = requireDefined(s.a);
      requireSameVars(na, requireDefined(s.b));
      defined.insert_or_assign(s.dst, na);
    } else if (kw == "project") {
      s.kind = OpKind::Project;
      auto toks = splitWs(args);
      if (toks.size() < 2)
        fail(lineNo, "project takes a name and at least one variable");
      s.a = toks[0];
      std::uint32_t na = requireDefined(s.a);
      for (std::size_t i = 1; i < toks.size(); ++i) {
        auto var = parseVarTok(toks[i]);
        if (!var)
          fail(lineNo, "variable must look like x<i>");
        if (*var >= na)
          fail(lineNo, "variable x" + std::to_string(*var) +
                           " out of range (operand has " + std::to_string(na) +
                           ")");
        if (std::find(s.vars.begin(), s.vars.end(), *var) != s.vars.end())
          fail(lineNo, "duplicate variable x" + std::to_string(*var));
        s.vars.push_back(*var);
      }
      defined.insert_or_assign(s.dst, na);
    } else if (kw == "assign") {
      s.kind = OpKind::Assign;
      std::size_t asp = args.find_first_of(" \t");
      if (asp == std::string_view::npos)
        fail(lineNo, "assign takes a name and at least one clause");
      s.a = std::string(trimmed(args.substr(0, asp)));
      std::uint32_t na = requireDefined(s.a);
      std::string_view clauses = trimmed(args.substr(asp));
      while (true) {
        std::size_t comma = clauses.find(',');
        std::string_view one = trimmed(clauses.substr(0, comma));
        if (one.empty())
          fail(lineNo, "empty assignment clause");
        std::size_t cd = one.find(":=");
        if (cd == std::string_view::npos)
          fail(lineNo, "assignment clause needs ':='");
        auto var = parseVarTok(trimmed(one.substr(0, cd)));
        if (!var)
          fail(lineNo, "assignment target must look like x<i>");
        if (*var >= na)
          fail(lineNo, "variable x" + std::to_string(*var) +
                           " out of range (operand has " + std::to_string(na) +
                           ")");
        for (const AssignClause &prev : s.clauses)
          if (prev.var == *var)
            fail(lineNo, "duplicate assignment target x" +
                             std::to_string(*var));
        auto [expr, cst] = parseLinExpr(one.substr(cd + 2), lineNo);
        if (auto mi = maxIndex(expr); mi && *mi >= na)
          fail(lineNo, "variable x" + std::to_string(*mi) +
                           " out of range (operand has " + std::to_string(na) +
                           ")");
        s.clauses.push_back({*var, std::move(expr), std::move(cst)});
        if (comma == std::string_view::npos)
          break;
        clauses = trimmed(clauses.substr(comma + 1));
      }
      defined.insert_or_assign(s.dst, na);
    } else {
      fail(lineNo, "unrecognized statement");
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string print(const Trace &t) {
  std::string out;
  for (const Stmt &s : t) {
    switch (s.kind) {
    case OpKind::Define: {
      out += s.dst;
      out += " := poly ";
      out += std::to_string(s.nvars);
      out += " {";
      bool first = true;
      for (const Constraint &c : s.constraints) {
        out += first ? " " : "; ";
        first = false;
        out += c.toString();
      }
      out += first ? "}" : " }";
      break;
    }
    case OpKind::Meet:
    case OpKind::Join:
    case OpKind::Widen:
      out += s.dst;
      out += " := ";
      out += opKindName(s.kind);
      out += ' ';
      out += s.a;
      out += ' ';
      out += s.b;
      break;
    case OpKind::Project:
      out += s.dst;
      out += " := project ";
      out += s.a;
      for (SparseVector::Index v : s.vars) {
        out += " x";
        out += std::to_string(v);
      }
      break;
    case OpKind::Assign: {
      out += s.dst;
      out += " := assign ";
      out += s.a;
      out += ' ';
      bool first = true;
      for (const AssignClause &cl : s.clauses) {
        if (!first)
          out += ", ";
        first = false;
        out += 'x';
        out += std::to_string(cl.var);
        out += " := ";
        out += linExprText(cl.expr, cl.constant);
      }
      break;
    }
    case OpKind::Incl:
      out += "incl ";
      out += s.a;
      out += ' ';
      out += s.b;
      if (s.expected)
        out += *s.expected ? " true" : " false";
      break;
    case OpKind::AssertEq:
      out += "assert_eq ";
      out += s.a;
      out += ' ';
      out += s.b;
      break;
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Replay.

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

std::vector<Constraint> strip(const CheckerPolyhedron &rows) {
  std::vector<Constraint> out;
  out.reserve(rows.size());
  for (const auto &[id, c] : rows)
    out.push_back(c);
  return out;
}

bool anyStrict(const std::vector<Constraint> &cs) {
  return std::any_of(cs.begin(), cs.end(),
                     [](const Constraint &c) { return c.cmp == Cmp::LT; });
}

/// Brute-force verdict for one executed statement. Returns an error message
/// on a mismatch. May append notices (partial checks).
std::optional<std::string>
oracleForStmt(const Stmt &s, const Polyhedron *a, const Polyhedron *b,
              const Polyhedron *result, std::optional<bool> verdict,
              std::vector<std::string> &notices) {
  auto line = [&] { return "line " + std::to_string(s.line) + ": "; };
  switch (s.kind) {
  case OpKind::Define: {
    bool feas = orc::fmFeasible(s.nvars, s.constraints);
    if (feas == result->isBot())
      return "feasibility disagrees with the emptiness flag";
    if (!result->isBot() &&
        !orc::sameSet(s.nvars, s.constraints, strip(result->flatten())))
      return "minimized system is not equivalent to the input";
    return std::nullopt;
  }
  case OpKind::Meet: {
    std::uint32_t n = a->numVars();
    if (a->isBot() || b->isBot())
      return result->isBot()
                 ? std::nullopt
                 : std::optional<std::string>(
                       "meet with an empty operand is not empty");
    std::vector<Constraint> uni = strip(a->flatten());
    for (Constraint &c : strip(b->flatten()))
      uni.push_back(std::move(c));
    if (orc::fmFeasible(n, uni) == result->isBot())
      return "feasibility disagrees with the emptiness flag";
    if (!result->isBot() &&
        !orc::sameSet(n, uni, strip(result->flatten())))
      return "meet differs from the constraint union";
    return std::nullopt;
  }
  case OpKind::Join: {
    std::uint32_t n = a->numVars();
    if (a->isBot() && b->isBot())
      return result->isBot() ? std::nullopt
                             : std::optional<std::string>(
                                   "join of two empty operands is not empty");
    if (a->isBot() || b->isBot()) {
      const Polyhedron *live = a->isBot() ? b : a;
      if (result->isBot())
        return "join dropped the nonempty operand";
      if (!orc::sameSet(n, strip(live->flatten()), strip(result->flatten())))
        return "join with an empty operand differs from the other operand";
      return std::nullopt;
    }
    std::vector<Constraint> fa = strip(a->flatten()),
                            fb = strip(b->flatten()),
                            fr = strip(result->flatten());
    for (const Constraint &c : fr) {
      if (!orc::fmEntails(n, fa, c))
        return "hull row is not a consequence of the first operand";
      if (!orc::fmEntails(n, fb, c))
        return "hull row is not a consequence of the second operand";
    }
    if (!anyStrict(fa) && !anyStrict(fb) && !anyStrict(fr) &&
        orc::isBounded(n, fa) && orc::isBounded(n, fb)) {
      std::vector<orc::Point> v = orc::vertexEnum(n, fa);
      for (orc::Point &p : orc::vertexEnum(n, fb))
        v.push_back(std::move(p));
      for (const orc::Point &w : orc::vertexEnum(n, fr))
        if (!orc::convMember(w, v))
          return "hull has a vertex outside the span of the operands";
    } else {
      notices.push_back(line() + "oracle checked hull soundness only "
                                 "(unbounded or strict operands)");
    }
    return std::nullopt;
  }
  case OpKind::Widen: {
    std::uint32_t n = a->numVars();
    if (a->isBot() || b->isBot()) {
      const Polyhedron *live = a->isBot() ? b : a;
      if (live->isBot())
        return result->isBot() ? std::nullopt
                               : std::optional<std::string>(
                                     "widening of empty operands is not empty");
      if (result->isBot() ||
          !orc::sameSet(n, strip(live->flatten()), strip(result->flatten())))
        return "widening with an empty operand differs from the other operand";
      return std::nullopt;
    }
    if (result->isBot())
      return "widening of nonempty operands is empty";
    for (const Constraint &c : strip(result->flatten())) {
      if (!orc::fmEntails(n, strip(a->flatten()), c))
        return "widening row is not a consequence of the first operand";
      if (!orc::fmEntails(n, strip(b->flatten()), c))
        return "widening row is not a consequence of the second operand";
    }
    return std::nullopt;
  }
  case OpKind::Project: {
    std::uint32_t n = a->numVars();
    if (a->isBot())
      return result->isBot() ? std::nullopt
                             : std::optional<std::string>(
                                   "projection of an empty operand is not empty");
    if (result->isBot())
      return "projection of a nonempty operand is empty";
    std::vector<Constraint> expect =
        orc::fmProject(strip(a->flatten()), s.vars);
    if (!orc::sameSet(n, expect, strip(result->flatten())))
      return "projection differs from pairwise elimination";
    return std::nullopt;
  }
  case OpKind::Assign: {
    std::uint32_t n = a->numVars();
    if (a->isBot())
      return result->isBot() ? std::nullopt
                             : std::optional<std::string>(
                                   "assignment on an empty operand is not empty");
    if (result->isBot())
      return "assignment on a nonempty operand is empty";
    // Reference construction: move each target out of the way to a fresh
    // index, pin the target to its expression over pre-state values, then
    // eliminate the pre-state copies.
    auto renamed = [&](SparseVector::Index i) -> SparseVector::Index {
      for (std::size_t j = 0; j < s.clauses.size(); ++j)
        if (s.clauses[j].var == i)
          return n + static_cast<SparseVector::Index>(j);
      return i;
    };
    std::vector<Constraint> rows;
    for (const Constraint &c : strip(a->flatten()))
      rows.push_back({c.term.remap(renamed), c.cmp, c.bound});
    std::vector<SparseVector::Index> fresh;
    for (std::size_t j = 0; j < s.clauses.size(); ++j) {
      rows.push_back({SparseVector::unit(s.clauses[j].var, Rational(1)) +
                          (-s.clauses[j].expr.remap(renamed)),
                      Cmp::EQ, s.clauses[j].constant});
      fresh.push_back(n + static_cast<SparseVector::Index>(j));
    }
    std::vector<Constraint> expect = orc::fmProject(std::move(rows), fresh);
    if (!orc::sameSet(n, expect, strip(result->flatten())))
      return "assignment differs from substitute-and-eliminate";
    return std::nullopt;
  }
  case OpKind::Incl:
  case OpKind::AssertEq: {
    std::uint32_t n = a->numVars();
    auto contained = [&](const Polyhedron &p1, const Polyhedron &p2) {
      if (p1.isBot())
        return true;
      if (p2.isBot())
        return false;
      for (const Constraint &c : strip(p2.flatten()))
        if (!orc::fmEntails(n, strip(p1.flatten()), c))
          return false;
      return true;
    };
    bool expect = s.kind == OpKind::Incl
                      ? contained(*a, *b)
                      : contained(*a, *b) && contained(*b, *a);
    if (verdict && expect != *verdict)
      return "inclusion decision disagrees with brute force";
    return std::nullopt;
  }
  }
  return std::nullopt;
}

} // namespace

std::size_t bucketOf(std::uint64_t problemSize) {
  if (problemSize <= 1)
    return 0;
  if (problemSize <= 5)
    return 1;
  if (problemSize <= 10)
    return 2;
  if (problemSize <= 15)
    return 3;
  if (problemSize <= 20)
    return 4;
  if (problemSize <= 25)
    return 5;
  if (problemSize <= 30)
    return 6;
  return 7;
}

std::string_view bucketLabel(std::size_t bucket) {
  constexpr std::string_view labels[kNumBuckets] = {
      "0-1", "2-5", "6-10", "11-15", "16-20", "21-25", "26-30", "31+"};
  assert(bucket < kNumBuckets);
  return labels[bucket];
}

RunReport replay(const Trace &t, const ReplayOptions &opts) {
  RunReport rep;
  std::map<std::string, Polyhedron> env;

  for (const Stmt &s : t) {
    OpRecord rec;
    rec.kind = s.kind;
    rec.line = s.line;
    rec.dst = s.dst;

    auto get = [&](const std::string &nm) -> const Polyhedron & {
      auto it = env.find(nm);
      assert(it != env.end() && "parse guarantees operands are defined");
      return it->second;
    };
    auto describe = [&](const Polyhedron &p) {
      rec.resultBot = p.isBot();
      if (!p.isBot()) {
        rec.resultEqs = static_cast<std::uint32_t>(p.eqs().size());
        rec.resultIneqs = static_cast<std::uint32_t>(p.ineqs().size());
      }
      rec.resultText = p.toString();
    };
    auto checkObs = [&](const std::vector<Obligation> &obs) {
      if (!opts.checkCerts)
        return;
      for (const Obligation &ob : obs) {
        ++rec.certsChecked;
        CheckOutcome oc = checkCert(ob.premise, ob.target, ob.cert);
        if (!oc.ok)
          rep.failures.push_back("line " + std::to_string(s.line) +
                                 ": certificate rejected: " + oc.reason);
      }
    };
    auto runOracle = [&](const Polyhedron *a, const Polyhedron *b,
                         const Polyhedron *result,
                         std::optional<bool> verdict) {
      if (!opts.oracle)
        return;
      std::uint32_t n = s.kind == OpKind::Define ? s.nvars : a->numVars();
      std::uint64_t rows = rec.problemSize +
                           (result && !result->isBot()
                                ? result->constraintCount()
                                : 0);
      if (n > 4 || rows > 14) {
        rep.notices.push_back(
            "line " + std::to_string(s.line) +
            ": oracle skipped (instance too large for brute force)");
        return;
      }
      auto err = oracleForStmt(s, a, b, result, verdict, rep.notices);
      rec.oracleOk = !err.has_value();
      if (err)
        rep.failures.push_back("line " + std::to_string(s.line) +
                               ": oracle mismatch: " + *err);
    };

    switch (s.kind) {
    case OpKind::Define: {
      rec.problemSize = s.constraints.size();
      Timer tm;
      CertifiedResult r = minimize(s.nvars, s.constraints);
      rec.ms = tm.ms();
      describe(r.value);
      checkObs(r.obligations);
      runOracle(nullptr, nullptr, &r.value, std::nullopt);
      env.insert_or_assign(s.dst, std::move(r.value));
      break;
    }
    case OpKind::Meet:
    case OpKind::Join: {
      const Polyhedron &pa = get(s.a), &pb = get(s.b);
      rec.problemSize = pa.constraintCount() + pb.constraintCount();
      Timer tm;
      CertifiedResult r =
          s.kind == OpKind::Meet ? meet(pa, pb) : join(pa, pb);
      rec.ms = tm.ms();
      describe(r.value);
      checkObs(r.obligations);
      runOracle(&pa, &pb, &r.value, std::nullopt);
      env.insert_or_assign(s.dst, std::move(r.value));
      break;
    }
    case OpKind::Widen: {
      const Polyhedron &pa = get(s.a), &pb = get(s.b);
      rec.problemSize = pa.constraintCount() + pb.constraintCount();
      Timer tm;
      Polyhedron w = widen(pa, pb);
      rec.ms = tm.ms();
      describe(w);
      runOracle(&pa, &pb, &w, std::nullopt);
      env.insert_or_assign(s.dst, std::move(w));
      break;
    }
    case OpKind::Project: {
      const Polyhedron &pa = get(s.a);
      rec.problemSize = pa.constraintCount();
      Timer tm;
      CertifiedResult r = project(pa, s.vars);
      rec.ms = tm.ms();
      describe(r.value);
      checkObs(r.obligations);
      runOracle(&pa, nullptr, &r.value, std::nullopt);
      env.insert_or_assign(s.dst, std::move(r.value));
      break;
    }
    case OpKind::Assign: {
      const Polyhedron &pa = get(s.a);
      rec.problemSize = pa.constraintCount();
      Timer tm;
      CertifiedResult r = assign(pa, s.clauses);
      rec.ms = tm.ms();
      describe(r.value);
      checkObs(r.obligations);
      runOracle(&pa, nullptr, &r.value, std::nullopt);
      env.insert_or_assign(s.dst, std::move(r.value));
      break;
    }
    case OpKind::Incl: {
      const Polyhedron &pa = get(s.a), &pb = get(s.b);
      rec.problemSize = pa.constraintCount() + pb.constraintCount();
      Timer tm;
      InclAnswer ans = incl(pa, pb);
      rec.ms = tm.ms();
      bool holds = ans.cert.has_value();
      rec.inclVerdict = holds;
      rec.resultText = holds ? "true" : "false";
      if (s.expected && holds != *s.expected)
        rep.failures.push_back("line " + std::to_string(s.line) +
                               ": incl expected " +
                               (*s.expected ? "true" : "false") + ", got " +
                               (holds ? "true" : "false"));
      if (opts.checkCerts && ans.cert) {
        ++rec.certsChecked;
        CheckOutcome oc = checkCert(pa.flatten(), pb.flatten(), *ans.cert);
        if (!oc.ok)
          rep.failures.push_back("line " + std::to_string(s.line) +
                                 ": certificate rejected: " + oc.reason);
      }
      if (opts.checkCerts && ans.counterexample) {
        bool inA = true, inB = true;
        for (const auto &[id, c] : pa.flatten())
          inA = inA && satisfies(c, *ans.counterexample);
        for (const auto &[id, c] : pb.flatten())
          inB = inB && satisfies(c, *ans.counterexample);
        if (!inA || inB)
          rep.failures.push_back("line " + std::to_string(s.line) +
                                 ": inclusion counterexample is invalid");
      }
      runOracle(&pa, &pb, nullptr, holds);
      break;
    }
    case OpKind::AssertEq: {
      const Polyhedron &pa = get(s.a), &pb = get(s.b);
      rec.problemSize = pa.constraintCount() + pb.constraintCount();
      Timer tm;
      InclAnswer fwd = incl(pa, pb);
      InclAnswer bwd = incl(pb, pa);
      rec.ms = tm.ms();
      bool equal = fwd.cert.has_value() && bwd.cert.has_value();
      rec.inclVerdict = equal;
      rec.resultText = equal ? "true" : "false";
      if (!equal)
        rep.failures.push_back(
            "line " + std::to_string(s.line) + ": assert_eq failed: " +
            (!fwd.cert ? s.a + " is not included in " + s.b
                       : s.b + " is not included in " + s.a));
      if (opts.checkCerts) {
        auto checkAns = [&](const InclAnswer &ans, const Polyhedron &p1,
                            const Polyhedron &p2) {
          if (!ans.cert)
            return;
          ++rec.certsChecked;
          CheckOutcome oc = checkCert(p1.flatten(), p2.flatten(), *ans.cert);
          if (!oc.ok)
            rep.failures.push_back("line " + std::to_string(s.line) +
                                   ": certificate rejected: " + oc.reason);
        };
        checkAns(fwd, pa, pb);
        checkAns(bwd, pb, pa);
      }
      runOracle(&pa, &pb, nullptr, equal);
      break;
    }
    }
    rec.trivial = rec.problemSize <= 1;
    rep.records.push_back(std::move(rec));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Aggregation.

namespace {

struct BucketAgg {
  std::vector<double> times;
  double total = 0;

  double median() const {
    if (times.empty())
      return 0;
    std::vector<double> v = times;
    std::sort(v.begin(), v.end());
    std::size_t mid = v.size() / 2;
    return v.size() % 2 ? v[mid] : (v[mid - 1] + v[mid]) / 2;
  }
};

using Aggregate = std::map<OpKind, std::array<BucketAgg, kNumBuckets>>;

Aggregate aggregate(const RunReport &r) {
  Aggregate agg;
  for (const OpRecord &rec : r.records) {
    BucketAgg &cell = agg[rec.kind][bucketOf(rec.problemSize)];
    cell.times.push_back(rec.ms);
    cell.total += rec.ms;
  }
  return agg;
}

} // namespace

std::string formatReport(const RunReport &r) {
  Aggregate agg = aggregate(r);
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %-6s %7s %12s %12s\n", "op", "size",
                "count", "median(ms)", "total(ms)");
  out += buf;
  for (const auto &[kind, buckets] : agg) {
    for (std::size_t b = 0; b < kNumBuckets; ++b) {
      if (buckets[b].times.empty())
        continue;
      std::snprintf(buf, sizeof buf, "%-10s %-6s %7zu %12.4f %12.4f\n",
                    std::string(opKindName(kind)).c_str(),
                    std::string(bucketLabel(b)).c_str(),
                    buckets[b].times.size(), buckets[b].median(),
                    buckets[b].total);
      out += buf;
    }
  }
  std::size_t counted = 0, trivial = 0;
  double totalMs = 0;
  for (const OpRecord &rec : r.records) {
    if (rec.trivial) {
      ++trivial;
      continue;
    }
    ++counted;
    totalMs += rec.ms;
  }
  std::snprintf(buf, sizeof buf,
                "ops: %zu, total %.4f ms (%zu trivial excluded)\n", counted,
                totalMs, trivial);
  out += buf;
  for (const std::string &n : r.notices)
    out += "notice: " + n + "\n";
  for (const std::string &f : r.failures)
    out += "FAIL: " + f + "\n";
  return out;
}

std::string statsJson(const RunReport &r) {
  nlohmann::json j;
  j["buckets"] = nlohmann::json::array();
  for (std::size_t b = 0; b < kNumBuckets; ++b)
    j["buckets"].push_back(std::string(bucketLabel(b)));

  j["records"] = nlohmann::json::array();
  for (const OpRecord &rec : r.records) {
    nlohmann::json jr;
    jr["op"] = std::string(opKindName(rec.kind));
    jr["line"] = rec.line;
    if (!rec.dst.empty())
      jr["dst"] = rec.dst;
    jr["size"] = rec.problemSize;
    jr["bucket"] = std::string(bucketLabel(bucketOf(rec.problemSize)));
    jr["trivial"] = rec.trivial;
    jr["ms"] = rec.ms;
    jr["bot"] = rec.resultBot;
    jr["eqs"] = rec.resultEqs;
    jr["ineqs"] = rec.resultIneqs;
    jr["certs_checked"] = rec.certsChecked;
    if (rec.inclVerdict)
      jr["verdict"] = *rec.inclVerdict;
    if (rec.oracleOk)
      jr["oracle_ok"] = *rec.oracleOk;
    j["records"].push_back(std::move(jr));
  }

  Aggregate agg = aggregate(r);
  nlohmann::json ja = nlohmann::json::object();
  for (const auto &[kind, buckets] : agg) {
    nlohmann::json jk = nlohmann::json::object();
    for (std::size_t b = 0; b < kNumBuckets; ++b) {
      if (buckets[b].times.empty())
        continue;
      jk[std::string(bucketLabel(b))] = {
          {"count", buckets[b].times.size()},
          {"median_ms", buckets[b].median()},
          {"total_ms", buckets[b].total}};
    }
    ja[std::string(opKindName(kind))] = std::move(jk);
  }
  j["aggregate"] = std::move(ja);

  std::size_t counted = 0, trivial = 0;
  double totalMs = 0;
  for (const OpRecord &rec : r.records) {
    if (rec.trivial) {
      ++trivial;
      continue;
    }
    ++counted;
    totalMs += rec.ms;
  }
  j["totals"] = {{"ops", counted},
                 {"total_ms", totalMs},
                 {"trivial_excluded", trivial}};
  j["failures"] = r.failures;
  j["notices"] = r.notices;
  return j.dump(2);
}

} // namespace poly::trace
