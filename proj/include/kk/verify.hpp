#pragma once

#include <string>

#include "kk/classify.hpp"

namespace kk {

struct Verdict {
  bool ok = true;
  int step = -1;        ///< index of the failing step, -1 when ok or global
  std::string failure;  ///< first failing condition
};

/// Re-checks a certificate from scratch using set and trio primitives only:
/// each tag's definition, continuation equality, strict subgroup descent,
/// deficiency preservation and a pure final step.
Verdict verify_certificate(const Certificate& c);

/// Why `t` fails the definition named by `tag`, or an empty string if it holds.
std::string check_tag(const Trio& t, const StructureTag& tag);

}  // namespace kk
