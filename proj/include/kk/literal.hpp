#pragma once

#include <array>
#include <string_view>

#include "kk/set.hpp"

namespace kk {

/// Parses `{e1,e2,...}` where each element is an index or a residue tuple
/// `(r1,...,rk)`; a leading `~` takes the complement. Whitespace is ignored.
GroupSet parse_set(const Group& g, std::string_view text);

/// Three set literals separated by `;`.
std::array<GroupSet, 3> parse_trio_sets(const Group& g, std::string_view text);

}  // namespace kk
