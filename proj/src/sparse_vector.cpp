#include "poly/sparse_vector.hpp"

#include <bit>
#include <cassert>

namespace poly {

// Leaf: bit == 0, prefix is the full key, value is the coefficient.
// Branch: bit is the single branching bit; prefix holds the key bits strictly
// above it (everything at or below the bit zeroed). Keys with the bit clear
// live in left, keys with it set in right, so in-order traversal ascends.
struct SparseVector::Node {
  Index prefix;
  Index bit;
  Rational value;
  NodePtr left, right;
  std::size_t count;

  Node(Index key, Rational v)
      : prefix(key), bit(0), value(std::move(v)), count(1) {}
  Node(Index p, Index b, NodePtr l, NodePtr r)
      : prefix(p), bit(b), left(std::move(l)), right(std::move(r)),
        count(left->count + right->count) {}
};

namespace {

using Node = SparseVector::Node;
using NodePtr = std::shared_ptr<const Node>;
using Index = SparseVector::Index;

NodePtr makeLeaf(Index key, Rational v) {
  return std::make_shared<const Node>(key, std::move(v));
}

Index lowMask(Index bit) { return bit | (bit - 1); }
Index maskAbove(Index key, Index bit) { return key & ~lowMask(bit); }
bool matchPrefix(Index key, Index prefix, Index bit) {
  return maskAbove(key, bit) == prefix;
}
bool bitClear(Index key, Index bit) { return (key & bit) == 0; }

NodePtr makeBranch(Index prefix, Index bit, NodePtr l, NodePtr r) {
  if (!l)
    return r;
  if (!r)
    return l;
  return std::make_shared<const Node>(prefix, bit, std::move(l), std::move(r));
}

/// Combines two trees whose key sets live under different prefixes.
NodePtr joinTrees(Index p0, NodePtr t0, Index p1, NodePtr t1) {
  Index bit = std::bit_floor(p0 ^ p1);
  Index prefix = maskAbove(p0, bit);
  if (bitClear(p0, bit))
    return makeBranch(prefix, bit, std::move(t0), std::move(t1));
  return makeBranch(prefix, bit, std::move(t1), std::move(t0));
}

const Rational *find(const NodePtr &t, Index key) {
  const Node *n = t.get();
  while (n) {
    if (n->bit == 0)
      return n->prefix == key ? &n->value : nullptr;
    if (!matchPrefix(key, n->prefix, n->bit))
      return nullptr;
    n = bitClear(key, n->bit) ? n->left.get() : n->right.get();
  }
  return nullptr;
}

/// Inserts key/v, combining with any existing entry via +. A combined value of
/// zero removes the entry.
NodePtr insertCombine(const NodePtr &t, Index key, const Rational &v) {
  if (!t)
    return makeLeaf(key, v);
  if (t->bit == 0) {
    if (t->prefix == key) {
      Rational s = t->value + v;
      return s.isZero() ? nullptr : makeLeaf(key, std::move(s));
    }
    return joinTrees(key, makeLeaf(key, v), t->prefix, t);
  }
  if (!matchPrefix(key, t->prefix, t->bit))
    return joinTrees(key, makeLeaf(key, v), t->prefix, t);
  if (bitClear(key, t->bit))
    return makeBranch(t->prefix, t->bit, insertCombine(t->left, key, v), t->right);
  return makeBranch(t->prefix, t->bit, t->left, insertCombine(t->right, key, v));
}

/// Replaces (rather than combines) the entry at key; v = 0 removes it.
NodePtr insertReplace(const NodePtr &t, Index key, const Rational &v) {
  if (!t)
    return v.isZero() ? nullptr : makeLeaf(key, v);
  if (t->bit == 0) {
    if (t->prefix == key)
      return v.isZero() ? nullptr : makeLeaf(key, v);
    if (v.isZero())
      return t;
    return joinTrees(key, makeLeaf(key, v), t->prefix, t);
  }
  if (!matchPrefix(key, t->prefix, t->bit)) {
    if (v.isZero())
      return t;
    return joinTrees(key, makeLeaf(key, v), t->prefix, t);
  }
  if (bitClear(key, t->bit))
    return makeBranch(t->prefix, t->bit, insertReplace(t->left, key, v), t->right);
  return makeBranch(t->prefix, t->bit, t->left, insertReplace(t->right, key, v));
}

NodePtr mergeAdd(const NodePtr &s, const NodePtr &t) {
  if (!s)
    return t;
  if (!t)
    return s;
  if (s->bit == 0)
    return insertCombine(t, s->prefix, s->value);
  if (t->bit == 0)
    return insertCombine(s, t->prefix, t->value);
  if (s->bit == t->bit && s->prefix == t->prefix)
    return makeBranch(s->prefix, s->bit, mergeAdd(s->left, t->left),
                      mergeAdd(s->right, t->right));
  if (s->bit > t->bit && matchPrefix(t->prefix, s->prefix, s->bit)) {
    if (bitClear(t->prefix, s->bit))
      return makeBranch(s->prefix, s->bit, mergeAdd(s->left, t), s->right);
    return makeBranch(s->prefix, s->bit, s->left, mergeAdd(s->right, t));
  }
  if (t->bit > s->bit && matchPrefix(s->prefix, t->prefix, t->bit)) {
    if (bitClear(s->prefix, t->bit))
      return makeBranch(t->prefix, t->bit, mergeAdd(s, t->left), t->right);
    return makeBranch(t->prefix, t->bit, t->left, mergeAdd(s, t->right));
  }
  return joinTrees(s->prefix, s, t->prefix, t);
}

NodePtr mapScale(const NodePtr &t, const Rational &k) {
  if (!t)
    return nullptr;
  if (t->bit == 0)
    return makeLeaf(t->prefix, k * t->value);
  return makeBranch(t->prefix, t->bit, mapScale(t->left, k), mapScale(t->right, k));
}

bool structEq(const NodePtr &a, const NodePtr &b) {
  if (a == b)
    return true;
  if (!a || !b)
    return false;
  if (a->bit != b->bit || a->prefix != b->prefix || a->count != b->count)
    return false;
  if (a->bit == 0)
    return a->value == b->value;
  return structEq(a->left, b->left) && structEq(a->right, b->right);
}

void visit(const Node *n, const std::function<void(Index, const Rational &)> &f) {
  if (!n)
    return;
  if (n->bit == 0) {
    f(n->prefix, n->value);
    return;
  }
  visit(n->left.get(), f);
  visit(n->right.get(), f);
}

} // namespace

SparseVector SparseVector::unit(Index i, const Rational &v) {
  return v.isZero() ? SparseVector() : SparseVector(makeLeaf(i, v));
}

SparseVector SparseVector::fromEntries(std::initializer_list<Entry> entries) {
  SparseVector r;
  for (const auto &[i, v] : entries)
    r = r.with(i, v);
  return r;
}

SparseVector SparseVector::fromEntries(const std::vector<Entry> &entries) {
  SparseVector r;
  for (const auto &[i, v] : entries)
    r = r.with(i, v);
  return r;
}

std::size_t SparseVector::size() const { return root ? root->count : 0; }

Rational SparseVector::get(Index i) const {
  const Rational *v = find(root, i);
  return v ? *v : Rational();
}

bool SparseVector::contains(Index i) const { return find(root, i) != nullptr; }

SparseVector SparseVector::with(Index i, const Rational &v) const {
  return SparseVector(insertReplace(root, i, v));
}

std::optional<SparseVector::Index> SparseVector::minIndex() const {
  if (!root)
    return std::nullopt;
  const Node *n = root.get();
  while (n->bit != 0)
    n = n->left.get();
  return n->prefix;
}

const Rational &SparseVector::leadingCoeff() const {
  assert(root && "leadingCoeff of empty vector");
  const Node *n = root.get();
  while (n->bit != 0)
    n = n->left.get();
  return n->value;
}

void SparseVector::forEach(
    const std::function<void(Index, const Rational &)> &f) const {
  visit(root.get(), f);
}

std::vector<SparseVector::Entry> SparseVector::entries() const {
  std::vector<Entry> out;
  out.reserve(size());
  visit(root.get(), [&](Index i, const Rational &v) { out.emplace_back(i, v); });
  return out;
}

SparseVector SparseVector::remap(const std::function<Index(Index)> &f) const {
  SparseVector r;
  forEach([&](Index i, const Rational &v) {
    Index j = f(i);
    assert(!r.contains(j) && "remap must be injective");
    r = r.with(j, v);
  });
  return r;
}

bool SparseVector::operator==(const SparseVector &o) const {
  return structEq(root, o.root);
}

std::strong_ordering SparseVector::operator<=>(const SparseVector &o) const {
  auto a = entries(), b = o.entries();
  std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].first != b[i].first)
      return a[i].first <=> b[i].first;
    if (auto c = a[i].second <=> b[i].second; c != 0)
      return c;
  }
  return a.size() <=> b.size();
}

SparseVector add(const SparseVector &a, const SparseVector &b) {
  return SparseVector(mergeAdd(a.root, b.root));
}

SparseVector scale(const Rational &k, const SparseVector &v) {
  if (k.isZero())
    return SparseVector();
  return SparseVector(mapScale(v.root, k));
}

Rational dot(const SparseVector &a, const SparseVector &b) {
  // Iterate the smaller side, probe the larger.
  const SparseVector &it = a.size() <= b.size() ? a : b;
  const SparseVector &probe = a.size() <= b.size() ? b : a;
  Rational acc;
  it.forEach([&](SparseVector::Index i, const Rational &v) {
    Rational w = probe.get(i);
    if (!w.isZero())
      acc += v * w;
  });
  return acc;
}

std::pair<SparseVector, Rational> gcdNormalize(const SparseVector &v) {
  assert(!v.isEmpty() && "gcdNormalize of empty vector");
  mpz_class lcmDen(1), gcdNum(0);
  v.forEach([&](SparseVector::Index, const Rational &r) {
    mpz_lcm(lcmDen.get_mpz_t(), lcmDen.get_mpz_t(), r.den().get_mpz_t());
  });
  v.forEach([&](SparseVector::Index, const Rational &r) {
    mpz_class scaled = r.num() * (lcmDen / r.den());
    mpz_gcd(gcdNum.get_mpz_t(), gcdNum.get_mpz_t(), scaled.get_mpz_t());
  });
  // gcdNum > 0: v is nonempty and zeros are never stored.
  mpq_class g(gcdNum, lcmDen);
  g.canonicalize();
  Rational factor = ratFromMpq(std::move(g));
  return {scale(factor.reciprocal(), v), factor};
}

} // namespace poly
