#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "kk/group.hpp"

namespace kk {

/// A subset of a group's elements.
class GroupSet {
 public:
  GroupSet(Group group, Mask bits);
  static GroupSet of(const Group& group, std::initializer_list<Element> elements);
  static GroupSet from(const Group& group, const std::vector<Element>& elements);
  static GroupSet from(const Group& group, const Subgroup& h) { return {group, h.bits()}; }
  static GroupSet empty_set(const Group& group) { return {group, 0}; }
  static GroupSet all(const Group& group) { return {group, group.full()}; }

  const Group& group() const noexcept { return group_; }
  Mask bits() const noexcept { return bits_; }
  int size() const noexcept { return popcount(bits_); }
  bool empty() const noexcept { return bits_ == 0; }
  bool contains(Element x) const noexcept { return x < 64 && ((bits_ >> x) & 1U); }
  std::vector<Element> elements() const;

  GroupSet complement() const { return {group_, group_.full() & ~bits_}; }
  GroupSet negated() const { return {group_, group_.negate(bits_)}; }
  GroupSet translated(Element g) const;
  bool subset_of(const GroupSet& other) const { return (bits_ & ~other.bits_) == 0; }

  friend GroupSet operator|(const GroupSet& a, const GroupSet& b);
  friend GroupSet operator&(const GroupSet& a, const GroupSet& b);
  /// Set difference.
  friend GroupSet operator-(const GroupSet& a, const GroupSet& b);
  friend bool operator==(const GroupSet& a, const GroupSet& b) {
    return a.bits_ == b.bits_ && a.group_ == b.group_;
  }

 private:
  Group group_;
  Mask bits_;
};

/// Renders as `{0,1,5}` using element indices.
std::string to_string(const GroupSet& s);
std::string to_string(const Group& g, Mask bits);

void require_same_group(const GroupSet& a, const GroupSet& b);

}  // namespace kk
