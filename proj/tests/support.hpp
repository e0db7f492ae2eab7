#pragma once

#include <initializer_list>
#include <vector>

#include "kk/group.hpp"
#include "kk/oracle.hpp"
#include "kk/set.hpp"

namespace support {

using kk::Element;
using kk::Group;
using kk::GroupSet;
using kk::Mask;

inline Mask bits(std::initializer_list<Element> xs) {
  Mask m = 0;
  for (Element x : xs) m |= Mask{1} << x;
  return m;
}

inline GroupSet set(const Group& g, std::initializer_list<Element> xs) { return {g, bits(xs)}; }

/// One group per isomorphism class of order 2..max, plus a few presentations
/// that are not in invariant-factor form.
inline std::vector<Group> groups_up_to(int max_order) {
  std::vector<Group> out = kk::abelian_groups_up_to(max_order);
  for (const char* spec : {"Z3xZ2", "Z2xZ3xZ2", "Z4xZ2"}) {
    Group g = Group::parse(spec);
    if (g.order() <= max_order) out.push_back(g);
  }
  return out;
}

/// Calls f(mask) for every nonempty subset of `universe`.
template <class F>
void for_each_nonempty_subset(Mask universe, F&& f) {
  for (Mask s = universe; s; s = (s - 1) & universe) f(s);
}

}  // namespace support
