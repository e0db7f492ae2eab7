#include "kk/setops.hpp"

#include <algorithm>

#include "kk/error.hpp"

namespace kk {

GroupSet::GroupSet(Group group, Mask bits) : group_(std::move(group)), bits_(bits) {
  if (bits_ & ~group_.full()) throw ContractViolation("set has members outside " + group_.spec());
}

GroupSet GroupSet::of(const Group& group, std::initializer_list<Element> elements) {
  return from(group, std::vector<Element>(elements));
}

GroupSet GroupSet::from(const Group& group, const std::vector<Element>& elements) {
  Mask bits = 0;
  for (Element x : elements) {
    group.check(x);
    bits |= Mask{1} << x;
  }
  return {group, bits};
}

std::vector<Element> GroupSet::elements() const {
  std::vector<Element> out;
  for_each_element(bits_, [&](Element x) { out.push_back(x); });
  return out;
}

GroupSet GroupSet::translated(Element g) const {
  group_.check(g);
  return {group_, group_.translate(bits_, g)};
}

void require_same_group(const GroupSet& a, const GroupSet& b) {
  if (!(a.group() == b.group())) {
    throw ContractViolation("sets belong to different groups: " + a.group().spec() + " vs " +
                            b.group().spec());
  }
}

GroupSet operator|(const GroupSet& a, const GroupSet& b) {
  require_same_group(a, b);
  return {a.group_, a.bits_ | b.bits_};
}

GroupSet operator&(const GroupSet& a, const GroupSet& b) {
  require_same_group(a, b);
  return {a.group_, a.bits_ & b.bits_};
}

GroupSet operator-(const GroupSet& a, const GroupSet& b) {
  require_same_group(a, b);
  return {a.group_, a.bits_ & ~b.bits_};
}

std::string to_string(const Group&, Mask bits) {
  std::string out = "{";
  bool first = true;
  for_each_element(bits, [&](Element x) {
    if (!first) out += ',';
    first = false;
    out += std::to_string(x);
  });
  return out + "}";
}

std::string to_string(const GroupSet& s) { return to_string(s.group(), s.bits()); }

namespace kernel {

Mask sumset(const Group& g, Mask a, Mask b) {
  if (popcount(a) > popcount(b)) std::swap(a, b);
  Mask out = 0;
  for_each_element(a, [&](Element x) { out |= g.translate(b, x); });
  return out;
}

Mask stabilizer(const Group& g, Mask a) {
  if (a == 0) return g.full();
  // Every stabilizing g maps min(A) into A, so g lies in A - min(A).
  const Mask candidates = g.translate(a, g.neg(lowest(a)));
  Mask out = 0;
  for_each_element(candidates, [&](Element x) {
    if (g.translate(a, x) == a) out |= Mask{1} << x;
  });
  return out;
}

Mask closure_subgroup(const Group& g, Mask a) {
  return g.generated(g.translate(a, g.neg(lowest(a)))).bits();
}

std::optional<Arc> coset_arc(const Group& g, Mask universe, Mask h, Element r, Mask stable) {
  const int index = popcount(universe) / popcount(h);
  // Walk the cosets 0, r, 2r, ... once; record membership as a bit string.
  std::uint64_t in = 0;
  Mask c = h;
  for (int k = 0; k < index; ++k) {
    if (stable & c) in |= std::uint64_t{1} << k;
    c = g.translate(c, r);
  }
  if (in == 0) return std::nullopt;
  const std::uint64_t all = index == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << index) - 1;
  const int length = popcount(in);
  if (in == all) return Arc{0, length, index};
  // Exactly one k with k in the run and k-1 outside.
  int head = -1;
  for (int k = 0; k < index; ++k) {
    const int prev = (k + index - 1) % index;
    if (((in >> k) & 1U) && !((in >> prev) & 1U)) {
      if (head >= 0) return std::nullopt;
      head = k;
    }
  }
  return Arc{head, length, index};
}

}  // namespace kernel

GroupSet sumset(const GroupSet& a, const GroupSet& b) {
  require_same_group(a, b);
  return {a.group(), kernel::sumset(a.group(), a.bits(), b.bits())};
}

Subgroup stabilizer(const GroupSet& a) {
  return a.group().subgroup(kernel::stabilizer(a.group(), a.bits()));
}

Closure closure_coset(const GroupSet& a) {
  if (a.empty()) throw ContractViolation("closure of the empty set is undefined");
  const Group& g = a.group();
  const Subgroup h = g.subgroup(kernel::closure_subgroup(g, a.bits()));
  return {h, coset_rep(g, h, lowest(a.bits()))};
}

int deficiency(const GroupSet& a, const GroupSet& b) {
  if (a.empty() || b.empty()) throw ContractViolation("deficiency needs nonempty sets");
  return a.size() + b.size() - sumset(a, b).size();
}

int kneser_gap(const GroupSet& a, const GroupSet& b) {
  if (a.empty() || b.empty()) throw ContractViolation("kneser_gap needs nonempty sets");
  require_same_group(a, b);
  const Group& g = a.group();
  const Mask s = kernel::sumset(g, a.bits(), b.bits());
  const Mask h = kernel::stabilizer(g, s);
  return popcount(s) - (popcount(kernel::sumset(g, a.bits(), h)) +
                        popcount(kernel::sumset(g, b.bits(), h)) - popcount(h));
}

SetDeficiency deficiency_set(const GroupSet& a) {
  const Group& g = a.group();
  if (a.empty()) throw ContractViolation("deficiency of the empty set is undefined");
  if (a.bits() == g.full()) throw ContractViolation("A = G has no partner B with A+B != G");
  std::optional<SetDeficiency> best;
  for (const Subgroup& h : g.subgroups()) {
    const Mask s = kernel::sumset(g, a.bits(), h.bits());
    if (s == g.full()) continue;
    const int d = a.size() + h.order() - popcount(s);
    if (!best || d > best->value) best = SetDeficiency{d, h};
  }
  return *best;  // H = {0} always qualifies since A != G
}

Quasistability quasistability(const GroupSet& a, const Subgroup& h) {
  const Group& g = a.group();
  if (!g.is_subgroup(h.bits())) throw ContractViolation("quasistability needs a subgroup");
  Quasistability out{Stability::Neither, {}};
  const bool stable = kernel::is_stable(g, a.bits(), h.bits());
  Mask seen = 0;
  for (Element x = 0; x < static_cast<Element>(g.order()); ++x) {
    if ((seen >> x) & 1U) continue;
    const Mask coset = g.translate(h.bits(), x);
    seen |= coset;
    if (kernel::is_stable(g, a.bits() & ~coset, h.bits())) out.exceptional_cosets.push_back(x);
  }
  if (stable) {
    out.kind = Stability::Stable;
  } else if (!out.exceptional_cosets.empty()) {
    out.kind = Stability::Quasistable;
  }
  return out;
}

namespace {

Mask coset_of(const Group& g, const Subgroup& h, Element k_times_r) {
  return g.translate(h.bits(), k_times_r);
}

}  // namespace

SequenceProfile sequence_profile(const GroupSet& a, const Subgroup& h, Element r,
                                 const Subgroup& universe) {
  const Group& g = a.group();
  if (!g.is_subgroup(universe.bits()) || !g.is_subgroup(h.bits()) ||
      (h.bits() & ~universe.bits()) || (a.bits() & ~universe.bits())) {
    throw ContractViolation("sequence_profile needs H <= universe and A inside the universe");
  }
  if (!universe.contains(r)) throw ContractViolation("R must lie in the universe");
  const auto gens = cyclic_generators(g, universe, h);
  if (gens.empty()) throw ContractViolation("quotient by H is not cyclic");
  const Element rep = coset_rep(g, h, r);
  if (std::find(gens.begin(), gens.end(), rep) == gens.end()) {
    throw ContractViolation("R does not generate the quotient by H");
  }

  SequenceProfile p;
  p.subgroup = h;
  p.generator = rep;
  const int size = a.size();
  p.is_proper = universe.order() - size >= 2 * h.order();
  p.is_nontrivial_near = size > h.order();
  if (a.empty()) return p;

  const Mask saturated = kernel::sumset(g, a.bits(), h.bits());
  const auto arc = kernel::coset_arc(g, universe.bits(), h.bits(), r, saturated);
  if (!arc) return p;

  p.saturation_is_sequence = true;
  p.length = arc->length;
  const Element head_elt = g.times(arc->head, r);
  const Element tail_elt = g.times(arc->head + arc->length - 1, r);
  p.head = coset_rep(g, h, head_elt);
  p.tail = coset_rep(g, h, tail_elt);
  p.is_basic = *p.head == 0;
  p.is_sequence = saturated == a.bits();
  p.is_nontrivial = p.length >= 2;
  p.is_near = popcount(saturated & ~a.bits()) < h.order();

  if (arc->length == arc->index) {
    // A+H is everything: any coset can serve as head or tail.
    p.is_fringed = quasistability(a, h).kind != Stability::Neither;
  } else {
    const Mask head_coset = coset_of(g, h, head_elt);
    const Mask tail_coset = coset_of(g, h, tail_elt);
    p.is_fringed = kernel::is_stable(g, a.bits() & ~head_coset, h.bits()) ||
                   kernel::is_stable(g, a.bits() & ~tail_coset, h.bits());
  }
  return p;
}

SequenceProfile sequence_profile(const GroupSet& a, const Subgroup& h, Element r) {
  return sequence_profile(a, h, r, a.group().whole());
}

std::vector<SequenceMatch> recognize_sequences(const GroupSet& a, const Subgroup& universe) {
  const Group& g = a.group();
  std::vector<SequenceMatch> out;
  if (a.empty()) return out;
  for (const Subgroup& h : g.subgroups()) {
    if (h == universe || (h.bits() & ~universe.bits())) continue;
    for (Element r : cyclic_generators(g, universe, h)) {
      auto p = sequence_profile(a, h, r, universe);
      if (p.is_sequence || p.is_near || p.is_fringed) out.push_back({h, r, p});
    }
  }
  return out;
}

std::vector<SequenceMatch> recognize_sequences(const GroupSet& a) {
  return recognize_sequences(a, a.group().whole());
}

bool is_sidon(const GroupSet& b) {
  const Group& g = b.group();
  for (Element x = 1; x < static_cast<Element>(g.order()); ++x) {
    if (popcount(g.translate(b.bits(), x) & b.bits()) > 1) return false;
  }
  return true;
}

}  // namespace kk
