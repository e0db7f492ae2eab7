#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kk {

/// Dense element index in [0, |G|). Index 0 is the identity.
using Element = std::uint32_t;

/// Membership bitset over the elements of a group; bit i is element i.
using Mask = std::uint64_t;

/// Sets are single machine words, so groups are capped at 64 elements.
inline constexpr int kMaxOrder = 64;

/// A subgroup stored as the set of its members inside the ambient group.
class Subgroup {
 public:
  /// The trivial subgroup {0}.
  Subgroup() = default;

  Mask bits() const noexcept { return bits_; }
  int order() const noexcept { return order_; }
  bool contains(Element x) const noexcept { return x < 64 && ((bits_ >> x) & 1U); }

  /// Deserialization hook: no closure check. Use is_subgroup() before trusting it.
  static Subgroup unchecked(Mask bits);

  friend bool operator==(const Subgroup&, const Subgroup&) = default;
  friend std::strong_ordering operator<=>(const Subgroup& a, const Subgroup& b) {
    if (auto c = a.order_ <=> b.order_; c != 0) return c;
    return a.bits_ <=> b.bits_;
  }

 private:
  friend class Group;
  Subgroup(Mask bits, int order) : bits_(bits), order_(order) {}

  Mask bits_ = 1;
  int order_ = 1;
};

/// Finite abelian group Z_{n1} x ... x Z_{nk}.
///
/// Elements are encoded mixed-radix, little-endian in factor order:
/// index = r1 + n1*(r2 + n2*(r3 + ...)). The group is an immutable handle;
/// copies share the precomputed tables.
class Group {
 public:
  /// The trivial group.
  Group();
  explicit Group(std::vector<int> factors);

  /// Parses `Z<n>` atoms joined by `x` (case-insensitive, no whitespace).
  /// The empty string and "Z1" denote the trivial group.
  static Group parse(std::string_view spec);

  int order() const noexcept;
  std::span<const int> factors() const noexcept;
  /// Canonical spec string, e.g. "Z2xZ4"; the trivial group prints as "Z1".
  std::string spec() const;
  bool is_cyclic() const noexcept { return factors().size() <= 1; }

  Element add(Element x, Element y) const;
  Element neg(Element x) const;
  Element sub(Element x, Element y) const { return add(x, neg(y)); }
  /// n*x for a nonnegative multiplier.
  Element times(long n, Element x) const;
  /// Order of x as a group element.
  int element_order(Element x) const;

  std::vector<int> digits(Element x) const;
  Element from_digits(std::span<const int> residues) const;
  /// "3" for cyclic groups, "(1,3)" otherwise.
  std::string format(Element x) const;

  // Word-level set primitives. Inputs must be subsets of full().
  Mask full() const noexcept;
  Mask translate(Mask set, Element g) const;
  Mask negate(Mask set) const;

  /// Every subgroup exactly once, sorted by (order, bitset).
  const std::vector<Subgroup>& subgroups() const noexcept;
  /// Validates a bitset as a subgroup; throws ContractViolation otherwise.
  Subgroup subgroup(Mask bits) const;
  bool is_subgroup(Mask bits) const;
  /// Smallest subgroup containing every element of `gens`.
  Subgroup generated(Mask gens) const;
  Subgroup whole() const;
  Subgroup trivial() const { return Subgroup(); }

  void check(Element x) const;

  friend bool operator==(const Group& a, const Group& b);

 private:
  struct Data;
  std::shared_ptr<const Data> d_;
};

inline int popcount(Mask m) noexcept { return __builtin_popcountll(m); }
inline Element lowest(Mask m) noexcept { return static_cast<Element>(__builtin_ctzll(m)); }

/// Calls f(Element) for each member in ascending order.
template <class F>
void for_each_element(Mask m, F&& f) {
  while (m) {
    f(lowest(m));
    m &= m - 1;
  }
}

/// The quotient G/H with coset ids ordered by minimal representative.
///
/// `quotient_group` is an explicit direct sum of cyclic factors (invariant
/// factor form); `embedding[i]` is the coset id of the i-th element of that
/// group, so it is an isomorphism onto the coset ids.
struct QuotientMap {
  Group parent;
  Subgroup kernel;
  std::vector<int> coset_index;        ///< element -> coset id
  std::vector<Element> representatives;  ///< coset id -> minimal member
  Group quotient_group;
  std::vector<int> embedding;          ///< quotient element -> coset id
  bool cyclic = false;
  std::vector<int> generators;         ///< coset ids generating G/H, if cyclic

  int size() const { return static_cast<int>(representatives.size()); }
  /// Coset-id addition, i.e. the quotient operation.
  int add(int a, int b) const;
};

QuotientMap quotient(const Group& g, const Subgroup& h);

/// Minimal representative of the coset x + H.
Element coset_rep(const Group& g, const Subgroup& h, Element x);

/// Minimal representatives r of the cosets of H inside `universe` such that
/// r + H generates universe/H. Empty when the quotient is not cyclic.
std::vector<Element> cyclic_generators(const Group& g, const Subgroup& universe,
                                       const Subgroup& h);

}  // namespace kk
