#pragma once

#include <array>
#include <string>
#include <vector>

#include "kk/error.hpp"
#include "kk/group.hpp"
#include "kk/set.hpp"

namespace kk {

/// Three sets (A, B, C) inside a universe subgroup U with 0 not in A+B+C.
///
/// The universe is the whole group unless the trio is a continuation living
/// in a subgroup; elements keep their ambient labels either way.
class Trio {
 public:
  Trio(const GroupSet& a, const GroupSet& b, const GroupSet& c);
  Trio(const Subgroup& universe, const GroupSet& a, const GroupSet& b, const GroupSet& c);

  /// No validation; for deserialization and verifiers that inspect bad input.
  static Trio unchecked(Group g, Subgroup universe, std::array<Mask, 3> sets);

  const Group& group() const noexcept { return group_; }
  const Subgroup& universe() const noexcept { return universe_; }
  GroupSet set(int i) const { return {group_, sets_[i]}; }
  GroupSet a() const { return set(0); }
  GroupSet b() const { return set(1); }
  GroupSet c() const { return set(2); }
  Mask bits(int i) const noexcept { return sets_[i]; }
  const std::array<Mask, 3>& masks() const noexcept { return sets_; }

  /// All three sets nonempty.
  bool nontrivial() const noexcept { return sets_[0] && sets_[1] && sets_[2]; }

  friend bool operator==(const Trio& x, const Trio& y) {
    return x.group_ == y.group_ && x.universe_ == y.universe_ && x.sets_ == y.sets_;
  }

 private:
  Trio(Group g, Subgroup universe, std::array<Mask, 3> sets)
      : group_(std::move(g)), universe_(universe), sets_(sets) {}

  Group group_;
  Subgroup universe_;
  std::array<Mask, 3> sets_;
};

/// Universe subgroup, subset containment and 0 not in A+B+C.
bool is_trio(const Group& g, Mask universe, const std::array<Mask, 3>& sets);

/// "A;B;C" with element lists, e.g. "{0};{0,1};{1,2,3,4}".
std::string to_string(const Trio& t);

/// (A, B, U \ -(A+B)). Throws ContractViolation on empty input.
Trio make_trio(const GroupSet& a, const GroupSet& b);
Trio make_trio(const Subgroup& universe, const GroupSet& a, const GroupSet& b);

/// |A| + |B| + |C| - |U|.
int trio_deficiency(const Trio& t);
inline bool is_critical(const Trio& t) { return trio_deficiency(t) > 0; }

/// Each set equals the universe minus the negated sum of the other two.
bool is_maximal(const Trio& t);

/// Order in which the saturation loop refills the three sets.
using PassOrder = std::array<int, 3>;
inline constexpr PassOrder kDefaultPassOrder{2, 1, 0};

/// A maximal supertrio, obtained by refilling sets in `order` until nothing
/// changes.
Trio saturate(const Trio& t, PassOrder order = kDefaultPassOrder);

/// Distinct maximal supertrios reachable by the six pass orders.
std::vector<Trio> all_saturations(const Trio& t);

/// (X0, X1, X2) -> (X[perm[0]] + shift[0], X[perm[1]] + shift[1], X[perm[2]] + shift[2])
/// with the shifts summing to zero.
struct Similarity {
  std::array<int, 3> perm{0, 1, 2};
  std::array<Element, 3> shift{0, 0, 0};

  static Similarity identity() { return {}; }
  static Similarity permutation(std::array<int, 3> p) { return {p, {0, 0, 0}}; }
  /// Adds g to set i and -g to set j.
  static Similarity opposite_shift(const Group& g, int i, int j, Element by);

  friend bool operator==(const Similarity&, const Similarity&) = default;
};

bool is_valid(const Similarity& s, const Group& g, const Subgroup& universe);
Trio apply_similarity(const Trio& t, const Similarity& s);
/// Applying `first` then `second`.
Similarity compose(const Group& g, const Similarity& first, const Similarity& second);
Similarity inverse(const Group& g, const Similarity& s);

/// The six permutations of (0,1,2) in lexicographic order.
const std::array<std::array<int, 3>, 6>& permutations();

/// Lexicographically least (A, B, C) bitset triple over every similar trio.
Trio canonical_form(const Trio& t);

enum class PurifyFailure { TrioNotCritical, PairNotCritical, CosetInsideB, CosetOutsideB, BadInput };

class PurifyError : public Error {
 public:
  PurifyError(PurifyFailure reason, const std::string& what) : Error(what), reason_(reason) {}
  PurifyFailure reason() const noexcept { return reason_; }

 private:
  PurifyFailure reason_;
};

/// (A, B ∪ R, C ∩ S) with R = r + H and S = U \ -(A+R).
Trio purify(const Trio& t, const Subgroup& h, Element r);

}  // namespace kk
