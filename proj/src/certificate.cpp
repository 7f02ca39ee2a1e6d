#include "poly/certificate.hpp"

#include <cctype>
#include <charconv>
#include <stdexcept>

namespace poly {

CertFragment fragScaleConcat(const Rational &k1, const CertFragment &f1,
                             const Rational &k2, const CertFragment &f2) {
  CertFragment out;
  out.reserve(f1.size() + f2.size());
  auto it1 = f1.begin(), it2 = f2.begin();
  auto push = [&out](Rational v, ConstraintId id) {
    if (!v.isZero())
      out.emplace_back(std::move(v), id);
  };
  while (it1 != f1.end() && it2 != f2.end()) {
    if (it1->second < it2->second) {
      push(k1 * it1->first, it1->second);
      ++it1;
    } else if (it2->second < it1->second) {
      push(k2 * it2->first, it2->second);
      ++it2;
    } else {
      push(k1 * it1->first + k2 * it2->first, it1->second);
      ++it1;
      ++it2;
    }
  }
  for (; it1 != f1.end(); ++it1)
    push(k1 * it1->first, it1->second);
  for (; it2 != f2.end(); ++it2)
    push(k2 * it2->first, it2->second);
  return out;
}

std::vector<TaggedConstraint> initFragments(const CheckerPolyhedron &p) {
  std::vector<TaggedConstraint> out;
  out.reserve(p.size());
  for (const auto &[id, cons] : p)
    out.push_back({CertFragment{{Rational(1), id}}, cons});
  return out;
}

namespace {

void printFragment(std::string &out, const CertFragment &frag) {
  out += '[';
  bool first = true;
  for (const auto &[coef, id] : frag) {
    if (!first)
      out += ", ";
    first = false;
    out += '(';
    out += coef.toString();
    out += ", ";
    out += std::to_string(id.value);
    out += ')';
  }
  out += ']';
}

/// Tiny cursor over the certificate text; all parse errors throw
/// std::invalid_argument naming the offending position.
struct Cursor {
  std::string_view text;
  std::size_t pos = 0;

  void skipSpace() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }
  bool atEnd() {
    skipSpace();
    return pos == text.size();
  }
  bool tryConsume(char c) {
    skipSpace();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!tryConsume(c))
      fail(std::string("expected '") + c + "'");
  }
  bool tryConsumeWord(std::string_view w) {
    skipSpace();
    if (text.substr(pos, w.size()) == w) {
      pos += w.size();
      return true;
    }
    return false;
  }
  /// Longest run of rational-literal characters: sign, digits, '/'.
  Rational rational() {
    skipSpace();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '-' || text[pos] == '/'))
      ++pos;
    if (start == pos)
      fail("expected a rational");
    return Rational::fromString(text.substr(start, pos - start));
  }
  std::uint32_t id() {
    skipSpace();
    std::uint32_t v = 0;
    auto [ptr, ec] =
        std::from_chars(text.data() + pos, text.data() + text.size(), v);
    if (ec != std::errc() || ptr == text.data() + pos)
      fail("expected a constraint id");
    pos = ptr - text.data();
    return v;
  }
  [[noreturn]] void fail(const std::string &why) {
    throw std::invalid_argument("bad certificate at offset " +
                                std::to_string(pos) + ": " + why);
  }
};

CertFragment parseFragment(Cursor &cur) {
  CertFragment frag;
  cur.expect('[');
  if (cur.tryConsume(']'))
    return frag;
  do {
    cur.expect('(');
    Rational coef = cur.rational();
    cur.expect(',');
    ConstraintId id{cur.id()};
    cur.expect(')');
    frag.emplace_back(std::move(coef), id);
  } while (cur.tryConsume(','));
  cur.expect(']');
  return frag;
}

} // namespace

std::string toString(const Cert &cert) {
  std::string out;
  if (const auto *empty = std::get_if<EmptyCert>(&cert)) {
    out = "empty ";
    printFragment(out, empty->combo);
    return out;
  }
  const auto &incl = std::get<InclCert>(cert);
  out = "incl {";
  bool first = true;
  for (const CertItem &item : incl.items) {
    out += first ? " " : "; ";
    first = false;
    out += std::to_string(item.target.value);
    out += ": ";
    printFragment(out, item.combo);
  }
  out += " }";
  return out;
}

Cert parseCert(std::string_view text) {
  Cursor cur{text};
  if (cur.tryConsumeWord("empty")) {
    EmptyCert cert{parseFragment(cur)};
    if (!cur.atEnd())
      cur.fail("trailing characters");
    return cert;
  }
  if (!cur.tryConsumeWord("incl"))
    cur.fail("expected 'incl' or 'empty'");
  InclCert cert;
  cur.expect('{');
  if (!cur.tryConsume('}')) {
    do {
      CertItem item;
      item.target = ConstraintId{cur.id()};
      cur.expect(':');
      item.combo = parseFragment(cur);
      cert.items.push_back(std::move(item));
    } while (cur.tryConsume(';'));
    cur.expect('}');
  }
  if (!cur.atEnd())
    cur.fail("trailing characters");
  return cert;
}

} // namespace poly
