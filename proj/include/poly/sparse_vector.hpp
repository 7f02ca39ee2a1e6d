#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "poly/rational.hpp"

namespace poly {

/// Sparse map from variable index to nonzero Rational, stored as a
/// path-compressed big-endian radix tree over the index bits. Zeros are never
/// stored and branch nodes always have two nonempty children, so the layout is
/// canonical: two vectors equal as functions are structurally equal. Nodes are
/// immutable and shared between copies, making copies O(1).
///
/// Entries iterate in ascending index order (big-endian split), which the
/// constraint layer relies on for leading-coefficient rules and printing.
class SparseVector {
public:
  using Index = std::uint32_t;
  using Entry = std::pair<Index, Rational>;

  SparseVector() = default;

  static SparseVector unit(Index i, const Rational &v);
  static SparseVector fromEntries(std::initializer_list<Entry> entries);
  static SparseVector fromEntries(const std::vector<Entry> &entries);

  bool isEmpty() const { return !root; }
  /// Number of stored (nonzero) entries.
  std::size_t size() const;
  /// Coefficient at index i; zero when absent.
  Rational get(Index i) const;
  bool contains(Index i) const;
  /// Functional update: returns a copy with index i set to v (erased if v=0).
  SparseVector with(Index i, const Rational &v) const;

  /// Lowest stored index; empty vectors have none.
  std::optional<Index> minIndex() const;
  /// Coefficient at the lowest stored index. Asserts nonempty.
  const Rational &leadingCoeff() const;

  /// In-order (ascending index) visit of all entries.
  void forEach(const std::function<void(Index, const Rational &)> &f) const;
  std::vector<Entry> entries() const;

  /// Rebuilds with indices mapped through f; f must be injective on the
  /// stored indices.
  SparseVector remap(const std::function<Index(Index)> &f) const;

  bool operator==(const SparseVector &o) const;
  /// Total order: lexicographic over the ascending entry sequence.
  std::strong_ordering operator<=>(const SparseVector &o) const;

  friend SparseVector add(const SparseVector &a, const SparseVector &b);
  friend SparseVector scale(const Rational &k, const SparseVector &v);
  friend Rational dot(const SparseVector &a, const SparseVector &b);

  // Implementation node; opaque outside sparse_vector.cpp.
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;

private:
  explicit SparseVector(NodePtr r) : root(std::move(r)) {}
  NodePtr root;
};

/// Entrywise sum; entries cancelling to zero disappear.
SparseVector add(const SparseVector &a, const SparseVector &b);
/// Entrywise scaling; k = 0 yields the empty vector.
SparseVector scale(const Rational &k, const SparseVector &v);
/// Sparse dot product over the shared support.
Rational dot(const SparseVector &a, const SparseVector &b);

inline SparseVector operator+(const SparseVector &a, const SparseVector &b) { return add(a, b); }
inline SparseVector operator*(const Rational &k, const SparseVector &v) { return scale(k, v); }
inline SparseVector operator-(const SparseVector &v) { return scale(Rational(-1), v); }

/// Scales a nonempty vector to integer entries with collective gcd 1,
/// preserving every entry's sign, and returns (scaled, g) with g > 0 and
/// v = g * scaled.
std::pair<SparseVector, Rational> gcdNormalize(const SparseVector &v);

} // namespace poly
