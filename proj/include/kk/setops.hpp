#pragma once

#include <optional>
#include <vector>

#include "kk/group.hpp"
#include "kk/set.hpp"

namespace kk {

/// Word-level kernels. Every set argument is a bitset inside `g.full()`.
namespace kernel {

/// A + B: OR of the larger set translated by each member of the smaller one.
Mask sumset(const Group& g, Mask a, Mask b);

/// universe \ -(A+B): the largest C making (A, B, C) a trio inside `universe`.
inline Mask third(const Group& g, Mask universe, Mask a, Mask b) {
  return universe & ~g.negate(sumset(g, a, b));
}

/// Stabilizer of A; the whole group for the empty set.
Mask stabilizer(const Group& g, Mask a);

/// Subgroup H of the closure [A] = x + H. A must be nonempty.
Mask closure_subgroup(const Group& g, Mask a);

inline bool is_stable(const Group& g, Mask a, Mask h) { return sumset(g, a, h) == a; }

/// Position of an H-stable set along the cosets r+H, 2r+H, ... of universe/H.
struct Arc {
  int head = 0;    ///< k such that the head coset is k*r + H
  int length = 0;  ///< number of cosets
  int index = 0;   ///< |universe/H|
};

/// The arc occupied by the H-stable set `stable`, or nullopt when its cosets
/// are not consecutive. A full arc reports head 0.
std::optional<Arc> coset_arc(const Group& g, Mask universe, Mask h, Element r, Mask stable);

}  // namespace kernel

GroupSet sumset(const GroupSet& a, const GroupSet& b);

/// Stabilizer G_A = {g : g + A = A}. The empty set is stabilized by all of G.
Subgroup stabilizer(const GroupSet& a);

struct Closure {
  Subgroup subgroup;
  Element representative;  ///< minimal element of the coset [A]
};

/// Smallest coset x + H containing A. Throws ContractViolation on empty input.
Closure closure_coset(const GroupSet& a);

/// |A| + |B| - |A+B|; the pair is critical when this is positive.
int deficiency(const GroupSet& a, const GroupSet& b);

/// |A+B| - (|A+H| + |B+H| - |H|) with H the stabilizer of A+B.
int kneser_gap(const GroupSet& a, const GroupSet& b);

struct SetDeficiency {
  int value;
  Subgroup witness;
};

/// max δ(A,H) over subgroups H with A+H != G. Ties go to the smallest H, then
/// the smallest bitset. Throws ContractViolation when A is empty or all of G.
SetDeficiency deficiency_set(const GroupSet& a);

enum class Stability { Stable, Quasistable, Neither };

struct Quasistability {
  Stability kind;
  /// Minimal representatives of every coset R with A \ R H-stable.
  std::vector<Element> exceptional_cosets;
};

Quasistability quasistability(const GroupSet& a, const Subgroup& h);

struct SequenceProfile {
  Subgroup subgroup;
  Element generator = 0;          ///< minimal representative of R
  std::optional<Element> head;    ///< minimal representative of the head of A+H
  std::optional<Element> tail;
  int length = 0;                 ///< cosets in A+H when it is an R-sequence
  bool saturation_is_sequence = false;
  bool is_sequence = false;       ///< A itself is an R-sequence
  bool is_basic = false;
  bool is_near = false;
  bool is_fringed = false;
  bool is_proper = false;
  bool is_nontrivial = false;       ///< length >= 2 (plain sequences)
  bool is_nontrivial_near = false;  ///< |A| > |H| (near and fringed sequences)

  friend bool operator==(const SequenceProfile&, const SequenceProfile&) = default;
};

/// Classifies A against the cosets of H read in steps of R inside `universe`.
/// Throws ContractViolation if universe/H is not cyclic or R does not generate it.
SequenceProfile sequence_profile(const GroupSet& a, const Subgroup& h, Element r,
                                 const Subgroup& universe);
SequenceProfile sequence_profile(const GroupSet& a, const Subgroup& h, Element r);

struct SequenceMatch {
  Subgroup subgroup;
  Element generator;
  SequenceProfile profile;
};

/// Every proper H with universe/H cyclic and every generator R for which A is
/// an R-sequence, a near R-sequence or a fringed R-sequence; ordered by (H, R).
std::vector<SequenceMatch> recognize_sequences(const GroupSet& a, const Subgroup& universe);
std::vector<SequenceMatch> recognize_sequences(const GroupSet& a);

/// Every nonzero translate of B meets B in at most one point.
bool is_sidon(const GroupSet& b);

}  // namespace kk
