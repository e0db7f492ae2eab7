#include "kk/trio.hpp"

#include <algorithm>
#include <tuple>

#include "kk/setops.hpp"

namespace kk {

bool is_trio(const Group& g, Mask universe, const std::array<Mask, 3>& sets) {
  if (!g.is_subgroup(universe)) return false;
  for (Mask s : sets) {
    if (s & ~universe) return false;
  }
  const Mask ab = kernel::sumset(g, sets[0], sets[1]);
  return (kernel::sumset(g, ab, sets[2]) & 1U) == 0;
}

Trio::Trio(const GroupSet& a, const GroupSet& b, const GroupSet& c)
    : Trio(a.group().whole(), a, b, c) {}

Trio::Trio(const Subgroup& universe, const GroupSet& a, const GroupSet& b, const GroupSet& c)
    : group_(a.group()), universe_(universe), sets_{a.bits(), b.bits(), c.bits()} {
  require_same_group(a, b);
  require_same_group(a, c);
  if (!group_.is_subgroup(universe_.bits())) throw ContractViolation("trio universe is not a subgroup");
  for (Mask s : sets_) {
    if (s & ~universe_.bits()) throw ContractViolation("trio set leaves its universe");
  }
  if (!is_trio(group_, universe_.bits(), sets_)) throw ContractViolation("0 lies in A+B+C");
}

Trio Trio::unchecked(Group g, Subgroup universe, std::array<Mask, 3> sets) {
  return Trio(std::move(g), universe, sets);
}

std::string to_string(const Trio& t) {
  return to_string(t.a()) + ";" + to_string(t.b()) + ";" + to_string(t.c());
}

Trio make_trio(const Subgroup& universe, const GroupSet& a, const GroupSet& b) {
  if (a.empty() || b.empty()) throw ContractViolation("make_trio needs nonempty sets");
  require_same_group(a, b);
  const Group& g = a.group();
  const GroupSet c(g, kernel::third(g, universe.bits(), a.bits(), b.bits()));
  return Trio(universe, a, b, c);
}

Trio make_trio(const GroupSet& a, const GroupSet& b) {
  return make_trio(a.group().whole(), a, b);
}

int trio_deficiency(const Trio& t) {
  return popcount(t.bits(0)) + popcount(t.bits(1)) + popcount(t.bits(2)) - t.universe().order();
}

bool is_maximal(const Trio& t) {
  const Group& g = t.group();
  const Mask u = t.universe().bits();
  const auto& s = t.masks();
  return s[2] == kernel::third(g, u, s[0], s[1]) && s[1] == kernel::third(g, u, s[0], s[2]) &&
         s[0] == kernel::third(g, u, s[1], s[2]);
}

Trio saturate(const Trio& t, PassOrder order) {
  const Group& g = t.group();
  const Mask u = t.universe().bits();
  auto s = t.masks();
  // Each refill only grows its set, so at most |U| productive passes per set.
  for (bool changed = true; changed;) {
    changed = false;
    for (int i : order) {
      const int j = (i + 1) % 3;
      const int k = (i + 2) % 3;
      const Mask next = kernel::third(g, u, s[j], s[k]);
      if (next != s[i]) {
        s[i] = next;
        changed = true;
      }
    }
  }
  return Trio::unchecked(g, t.universe(), s);
}

std::vector<Trio> all_saturations(const Trio& t) {
  std::vector<Trio> out;
  for (const auto& p : permutations()) {
    Trio s = saturate(t, p);
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const Trio& x, const Trio& y) { return x.masks() < y.masks(); });
  return out;
}

const std::array<std::array<int, 3>, 6>& permutations() {
  static const std::array<std::array<int, 3>, 6> perms{{
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  return perms;
}

Similarity Similarity::opposite_shift(const Group& g, int i, int j, Element by) {
  Similarity s;
  s.shift[i] = by;
  s.shift[j] = g.neg(by);
  return s;
}

bool is_valid(const Similarity& s, const Group& g, const Subgroup& universe) {
  auto sorted = s.perm;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != std::array<int, 3>{0, 1, 2}) return false;
  for (Element x : s.shift) {
    if (!universe.contains(x)) return false;
  }
  return g.add(g.add(s.shift[0], s.shift[1]), s.shift[2]) == 0;
}

Trio apply_similarity(const Trio& t, const Similarity& s) {
  const Group& g = t.group();
  if (!is_valid(s, g, t.universe())) throw ContractViolation("invalid similarity");
  std::array<Mask, 3> out{};
  for (int i = 0; i < 3; ++i) out[i] = g.translate(t.bits(s.perm[i]), s.shift[i]);
  return Trio::unchecked(g, t.universe(), out);
}

Similarity compose(const Group& g, const Similarity& first, const Similarity& second) {
  Similarity out;
  for (int i = 0; i < 3; ++i) {
    out.perm[i] = first.perm[second.perm[i]];
    out.shift[i] = g.add(first.shift[second.perm[i]], second.shift[i]);
  }
  return out;
}

Similarity inverse(const Group& g, const Similarity& s) {
  Similarity out;
  for (int i = 0; i < 3; ++i) out.perm[s.perm[i]] = i;
  for (int i = 0; i < 3; ++i) out.shift[i] = g.neg(s.shift[out.perm[i]]);
  return out;
}

Trio canonical_form(const Trio& t) {
  const Group& g = t.group();
  const Mask u = t.universe().bits();
  std::array<Mask, 3> best{~Mask{0}, ~Mask{0}, ~Mask{0}};
  for (const auto& p : permutations()) {
    const Mask x0 = t.bits(p[0]);
    const Mask y0 = t.bits(p[1]);
    const Mask z0 = t.bits(p[2]);
    // Minimize the first set over its translates, then the second.
    Mask min_x = ~Mask{0};
    for_each_element(u, [&](Element x) { min_x = std::min(min_x, g.translate(x0, x)); });
    if (min_x > best[0]) continue;
    for_each_element(u, [&](Element x) {
      if (g.translate(x0, x) != min_x) return;
      for_each_element(u, [&](Element y) {
        const std::array<Mask, 3> cand{min_x, g.translate(y0, y),
                                       g.translate(z0, g.neg(g.add(x, y)))};
        if (cand < best) best = cand;
      });
    });
  }
  return Trio::unchecked(g, t.universe(), best);
}

Trio purify(const Trio& t, const Subgroup& h, Element r) {
  const Group& g = t.group();
  const Mask u = t.universe().bits();
  if (!g.is_subgroup(h.bits()) || (h.bits() & ~u) || !t.universe().contains(r)) {
    throw PurifyError(PurifyFailure::BadInput, "purify needs H and R inside the trio's universe");
  }
  if (trio_deficiency(t) <= 0) throw PurifyError(PurifyFailure::TrioNotCritical, "trio is not critical");
  const Mask a = t.bits(0);
  if (a == 0 || popcount(a) + h.order() - popcount(kernel::sumset(g, a, h.bits())) <= 0) {
    throw PurifyError(PurifyFailure::PairNotCritical, "(A, H) is not critical");
  }
  const Mask coset = g.translate(h.bits(), r);
  const Mask inside = coset & t.bits(1);
  if (inside == 0) throw PurifyError(PurifyFailure::CosetOutsideB, "R does not meet B");
  if (inside == coset) throw PurifyError(PurifyFailure::CosetInsideB, "R already lies inside B");
  const Mask s = kernel::third(g, u, a, coset);
  return Trio::unchecked(g, t.universe(), {a, t.bits(1) | coset, t.bits(2) & s});
}

}  // namespace kk
