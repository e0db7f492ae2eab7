#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kk/classify.hpp"
#include "kk/trio.hpp"

namespace kk {

struct OracleOptions {
  /// Largest order for exhaustive enumeration of trios and pair spaces.
  int exhaustive_bound = 12;
  /// Kneser's inequality is checked exhaustively up to this order, sampled above.
  int kneser_exhaustive_bound = 10;
  /// Prime-order pair theorems (Cauchy-Davenport, Vosper) stay exhaustive up to here.
  int prime_exhaustive_bound = 13;
  std::uint64_t seed = 1;
  /// Sampled instances per group when a check runs above its exhaustive bound.
  long samples = 100'000;
  long purification_samples = 10'000;
  long soundness_samples = 2'000;
  /// 0 means std::thread::hardware_concurrency().
  int workers = 0;

  /// Defaults with `exhaustive_bound` taken from KK_MAX_EXHAUSTIVE when set.
  static OracleOptions from_env();
};

/// Abelian groups of order n up to isomorphism, one per partition of the prime
/// exponents, in invariant-factor form. Supports 1 <= n <= 24.
std::vector<Group> abelian_groups_of_order(int n);
/// All classes with 2 <= order <= max_order.
std::vector<Group> abelian_groups_up_to(int max_order);

/// Visits every nontrivial maximal critical trio of the whole group exactly
/// once, in increasing (A, B) bitset order. Single-threaded.
void for_each_maximal_critical_trio(const Group& g,
                                    const std::function<void(const std::array<Mask, 3>&)>& visit);

/// Every nontrivial maximal critical trio; one canonical representative per
/// similarity orbit when `dedup` is set. Throws SizeError above the bound.
std::vector<Trio> enumerate_maximal_critical_trios(const Group& g, bool dedup,
                                                   const OracleOptions& options = {});

inline constexpr std::size_t kMaxListedViolations = 20;

enum class TheoremId {
  CauchyDavenport,
  Kneser,
  KneserV2,
  Vosper,
  Kemperman,
  Mann,
  Purification,
  PurePairProp,
  MaximalTrioProp,
  BeatStability,
  ChordStability,
  StructuralSoundness,
  NearSequenceLemma,
  SidonClaim,
  DeficiencyOneClaim,
};

std::string_view to_string(TheoremId id);
TheoremId parse_theorem_id(std::string_view s);
const std::vector<TheoremId>& all_theorem_ids();

struct Violation {
  std::string detail;  ///< offending sets and the failed condition
  std::string repro;   ///< command line that exhibits the instance
};

struct TheoremReport {
  TheoremId theorem;
  std::string group;
  std::string mode;        ///< "exhaustive" or "sampled"
  long instances = 0;      ///< instances satisfying the hypotheses
  long violation_count = 0;
  std::vector<Violation> violations;  ///< the first kMaxListedViolations, in enumeration order
  double seconds = 0;      ///< wall time; not part of the rendered report

  bool passed() const { return violation_count == 0; }
};

/// Checks one statement over its whole quantifier domain for `g` (or a seeded
/// sample above the exhaustive bound). Throws ContractViolation when the
/// theorem does not apply to the group (e.g. vosper on a composite order).
TheoremReport check_theorem(const Group& g, TheoremId id, const OracleOptions& options = {});

/// Line-delimited records: one per violation, then a summary. Wall time is
/// left out so identical runs render identically.
std::string render_report(const TheoremReport& r, bool json);

struct AtlasRow {
  std::string group;
  long orbits = 0;
  std::array<long, 4> first_step{};  ///< orbits by the kind decompose() picks first
  std::array<long, 4> admits{};      ///< orbits admitting each kind at all
  std::array<std::optional<Trio>, 4> representative;  ///< least orbit per first-step kind
};

AtlasRow atlas_row(const Group& g, const OracleOptions& options = {});
std::vector<AtlasRow> build_atlas(int max_order, const OracleOptions& options = {});
std::string render_atlas(const std::vector<AtlasRow>& rows, bool json);

}  // namespace kk
