#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kk/error.hpp"
#include "kk/trio.hpp"

namespace kk {

enum class StructureKind { PureBeat, PureChord, ImpureBeat, ImpureChord };

/// "pure-beat", "pure-chord", "impure-beat", "impure-chord".
std::string_view to_string(StructureKind k);
StructureKind parse_structure_kind(std::string_view s);
inline bool is_pure(StructureKind k) {
  return k == StructureKind::PureBeat || k == StructureKind::PureChord;
}
inline bool is_chord(StructureKind k) {
  return k == StructureKind::PureChord || k == StructureKind::ImpureChord;
}

/// Witness that apply_similarity(trio, similarity) satisfies the definition
/// of `kind` relative to `subgroup` (and `generator` for chords) verbatim.
struct StructureTag {
  StructureKind kind;
  Subgroup subgroup;
  std::optional<Element> generator;  ///< minimal representative of R
  Similarity similarity;

  friend bool operator==(const StructureTag&, const StructureTag&) = default;
};

struct CertificateStep {
  Trio trio;
  StructureTag tag;

  friend bool operator==(const CertificateStep&, const CertificateStep&) = default;
};

/// Chain of trios in strictly descending universes, each impure step's
/// continuation being the next trio and the last step pure.
struct Certificate {
  std::vector<CertificateStep> steps;

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

struct MatchOptions {
  bool first_only = false;
  bool pure_beats = true;
  bool pure_chords = true;
  bool impure_beats = true;
  bool impure_chords = true;
};

/// Structure tags under which the trio is a pure/impure beat/chord.
///
/// Searches every proper subgroup H of the universe, every generator R of a
/// cyclic quotient, all six permutations and every relevant shift. One tag
/// per (kind, H, R, permutation), keeping the least shift; ordered by kind,
/// then H, R, permutation. Throws ContractViolation on trivial trios.
std::vector<StructureTag> match_structures(const Trio& t, const MatchOptions& options = {});

/// The first tag in match order, or nullopt.
std::optional<StructureTag> find_structure(const Trio& t);

/// Trio inside H induced by an impure tag: (A, B∩H, C∩H) for beats and
/// (A∩H, B∩H, C∩H) for chords, after applying the tag's similarity.
Trio continuation(const Trio& t, const StructureTag& tag);

enum class DecomposeFailure { Trivial, NotCritical, NotMaximal };

class DecomposeError : public Error {
 public:
  DecomposeError(DecomposeFailure reason, const std::string& what) : Error(what), reason_(reason) {}
  DecomposeFailure reason() const noexcept { return reason_; }

 private:
  DecomposeFailure reason_;
};

/// Raised when a maximal critical trio matches no structure at some step,
/// which would be a counterexample to the structure theorem.
class NoStructureFound : public Error {
 public:
  NoStructureFound(Trio trio, const std::string& what) : Error(what), trio_(std::move(trio)) {}
  const Trio& trio() const noexcept { return trio_; }

 private:
  Trio trio_;
};

/// Follows impure structures down to a pure one. Prefers pure beats, then pure
/// chords, impure beats, impure chords, smallest H first.
Certificate decompose(const Trio& t);

/// Every tag at each level of the chain that decompose() follows.
std::vector<std::vector<StructureTag>> decompose_all_tags(const Trio& t);

}  // namespace kk
