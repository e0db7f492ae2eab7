#include <algorithm>
#include <random>

#include "brute.hpp"
#include "doctest.h"
#include "kk/oracle.hpp"
#include "kk/setops.hpp"
#include "kk/trio.hpp"
#include "support.hpp"

using namespace kk;
using support::bits;
using support::for_each_nonempty_subset;
using support::set;

namespace {

Trio trio(const Group& g, std::initializer_list<Element> a, std::initializer_list<Element> b,
          std::initializer_list<Element> c) {
  return Trio(set(g, a), set(g, b), set(g, c));
}

bool contains(const Trio& big, const Trio& small) {
  for (int i = 0; i < 3; ++i) {
    if (small.bits(i) & ~big.bits(i)) return false;
  }
  return true;
}

Similarity random_similarity(const Group& g, std::mt19937_64& rng) {
  Similarity s;
  s.perm = permutations()[rng() % 6];
  s.shift[0] = static_cast<Element>(rng() % g.order());
  s.shift[1] = static_cast<Element>(rng() % g.order());
  s.shift[2] = g.neg(g.add(s.shift[0], s.shift[1]));
  return s;
}

}  // namespace

TEST_CASE("make_trio examples") {
  const Group z6 = Group::parse("Z6");
  CHECK(make_trio(set(z6, {0}), set(z6, {0, 1})).bits(2) == bits({1, 2, 3, 4}));
  const Group z5 = Group::parse("Z5");
  CHECK(make_trio(set(z5, {0, 1}), set(z5, {0, 1, 2})).bits(2) == bits({1}));
  const Trio full = make_trio(GroupSet::all(z6), set(z6, {3}));
  CHECK(full.bits(2) == 0);
  CHECK_FALSE(full.nontrivial());
  CHECK_THROWS_AS(make_trio(GroupSet::empty_set(z6), set(z6, {0})), ContractViolation);
  CHECK_THROWS_AS(Trio(set(z6, {0}), set(z6, {0}), set(z6, {0})), ContractViolation);
}

TEST_CASE("trio deficiency and maximality examples") {
  const Group z6 = Group::parse("Z6");
  CHECK(trio_deficiency(trio(z6, {0}, {0, 1}, {1, 2, 3, 4})) == 1);
  CHECK(trio_deficiency(trio(z6, {0}, {0, 1}, {1, 2})) == -1);
  CHECK_FALSE(is_critical(trio(z6, {0}, {0, 1}, {1, 2})));
  CHECK(trio_deficiency(Trio(GroupSet::all(z6), GroupSet::empty_set(z6), GroupSet::empty_set(z6))) == 0);

  CHECK(is_maximal(trio(z6, {0, 2}, {0, 1, 3, 5}, {2})));
  CHECK_FALSE(is_maximal(trio(z6, {0}, {0, 1}, {1, 2})));
  CHECK(is_maximal(trio(z6, {0}, {0, 1}, {1, 2, 3, 4})));
}

TEST_CASE("trios over a subgroup universe") {
  const Group z6 = Group::parse("Z6");
  const Subgroup h = z6.subgroup(bits({0, 2, 4}));
  const Trio t(h, set(z6, {0, 2}), set(z6, {0}), set(z6, {2}));
  CHECK(trio_deficiency(t) == 1);
  CHECK(is_maximal(t));
  CHECK(make_trio(h, set(z6, {0, 2}), set(z6, {0})).bits(2) == bits({2}));
  CHECK_THROWS_AS(Trio(h, set(z6, {0, 1}), set(z6, {0}), set(z6, {2})), ContractViolation);
  CHECK_THROWS_AS(Trio(Subgroup::unchecked(bits({0, 1})), set(z6, {0}), set(z6, {0}), set(z6, {1})),
                  ContractViolation);
}

TEST_CASE("pair and trio criticality coincide for completed pairs") {
  for (const Group& g : support::groups_up_to(10)) {
    CAPTURE(g.spec());
    long bad = 0;
    for_each_nonempty_subset(g.full(), [&](Mask a) {
      for_each_nonempty_subset(g.full(), [&](Mask b) {
        const Trio t = make_trio(GroupSet(g, a), GroupSet(g, b));
        if (!brute::is_trio(g, g.full(), t.bits(0), t.bits(1), t.bits(2))) ++bad;
        if (t.bits(2) != brute::third(g, g.full(), a, b)) ++bad;
        if (trio_deficiency(t) != deficiency(GroupSet(g, a), GroupSet(g, b))) ++bad;
      });
    });
    CHECK(bad == 0);
  }
}

TEST_CASE("saturation examples") {
  const Group z6 = Group::parse("Z6");
  CHECK(saturate(trio(z6, {0}, {0, 1}, {1, 2})) == trio(z6, {0}, {0, 1}, {1, 2, 3, 4}));
  const Trio m = trio(z6, {0, 2}, {0, 1, 3, 5}, {2});
  CHECK(saturate(m) == m);
  const Group z8 = Group::parse("Z8");
  const Trio t8 = trio(z8, {0, 1, 5}, {0, 1, 5}, {1, 4, 5});
  CHECK(is_maximal(t8));
  CHECK(saturate(t8) == t8);
}

TEST_CASE("saturation is monotone, maximal and idempotent on every trio") {
  for (const Group& g : support::groups_up_to(8)) {
    CAPTURE(g.spec());
    const Mask full = g.full();
    long trios = 0, bad = 0;
    for (Mask a = 0; a <= full; ++a) {
      for (Mask b = 0; b <= full; ++b) {
        const Mask cmax = brute::third(g, full, a, b);
        // Every C inside cmax, including the empty set.
        for (Mask c = cmax;; c = (c - 1) & cmax) {
          ++trios;
          const Trio t = Trio::unchecked(g, g.whole(), {a, b, c});
          const Trio s = saturate(t);
          if (!contains(s, t) || !is_maximal(s) || saturate(s) != s) ++bad;
          if (!brute::is_maximal(g, full, s.bits(0), s.bits(1), s.bits(2))) ++bad;
          if (c == 0) break;
        }
      }
    }
    CHECK(trios > 0);
    CHECK(bad == 0);
  }
}

TEST_CASE("all saturations are distinct maximal supertrios") {
  const Group z6 = Group::parse("Z6");
  const Trio t = trio(z6, {0}, {0}, {1});
  const auto sats = all_saturations(t);
  CHECK(std::find(sats.begin(), sats.end(), saturate(t)) != sats.end());
  for (std::size_t i = 0; i < sats.size(); ++i) {
    CHECK(is_maximal(sats[i]));
    CHECK(contains(sats[i], t));
    for (std::size_t j = i + 1; j < sats.size(); ++j) CHECK_FALSE(sats[i] == sats[j]);
  }
  CHECK(sats.size() > 1);
}

TEST_CASE("similarity examples") {
  const Group z6 = Group::parse("Z6");
  const Trio t = trio(z6, {0}, {0, 1}, {1, 2, 3, 4});
  CHECK(apply_similarity(t, Similarity::permutation({1, 0, 2})) == trio(z6, {0, 1}, {0}, {1, 2, 3, 4}));
  const Trio shifted = apply_similarity(t, Similarity::opposite_shift(z6, 0, 1, 1));
  CHECK(shifted == trio(z6, {1}, {5, 0}, {1, 2, 3, 4}));
  CHECK(trio_deficiency(shifted) == trio_deficiency(t));
  CHECK(apply_similarity(t, Similarity::identity()) == t);
  Similarity bad;
  bad.shift = {1, 0, 0};
  CHECK_FALSE(is_valid(bad, z6, z6.whole()));
  CHECK_THROWS_AS(apply_similarity(t, bad), ContractViolation);
  CHECK(permutations().size() == 6);
  CHECK(std::is_sorted(permutations().begin(), permutations().end()));
}

TEST_CASE("similarity preserves the trio invariants and composes as a group action") {
  std::mt19937_64 rng(11);
  for (const Group& g : support::groups_up_to(12)) {
    CAPTURE(g.spec());
    for (int i = 0; i < 400; ++i) {
      const Mask a = (rng() & g.full()) | 1;
      const Mask b = rng() & g.full();
      Trio t = make_trio(GroupSet(g, a), GroupSet(g, b | Mask{1} << (rng() % g.order())));
      if (i % 2) t = saturate(t);
      const Similarity s1 = random_similarity(g, rng);
      const Similarity s2 = random_similarity(g, rng);
      const Trio u = apply_similarity(t, s1);
      CHECK(is_trio(g, g.full(), u.masks()));
      CHECK(trio_deficiency(u) == trio_deficiency(t));
      CHECK(is_critical(u) == is_critical(t));
      CHECK(is_maximal(u) == is_maximal(t));
      CHECK(apply_similarity(u, s2) == apply_similarity(t, compose(g, s1, s2)));
      CHECK(apply_similarity(u, inverse(g, s1)) == t);
      CHECK(compose(g, s1, inverse(g, s1)) == Similarity::identity());
    }
  }
}

TEST_CASE("canonical form is the least member of the similarity orbit") {
  std::mt19937_64 rng(5);
  for (const Group& g : support::groups_up_to(9)) {
    CAPTURE(g.spec());
    for (int i = 0; i < 50; ++i) {
      const Trio t = saturate(make_trio(GroupSet(g, (rng() & g.full()) | 1), GroupSet(g, (rng() & g.full()) | 1)));
      const Trio c = canonical_form(t);
      // Brute force over the whole orbit.
      std::array<Mask, 3> least = t.masks();
      for (const auto& p : permutations()) {
        for (Element x = 0; x < static_cast<Element>(g.order()); ++x) {
          for (Element y = 0; y < static_cast<Element>(g.order()); ++y) {
            const Similarity s{p, {x, y, g.neg(g.add(x, y))}};
            least = std::min(least, apply_similarity(t, s).masks());
          }
        }
      }
      CHECK(c.masks() == least);
      CHECK(canonical_form(apply_similarity(t, random_similarity(g, rng))) == c);
    }
  }
}

TEST_CASE("purification example and failures") {
  const Group z6 = Group::parse("Z6");
  const Subgroup h = z6.subgroup(bits({0, 3}));
  const Trio t = trio(z6, {0, 3}, {0, 1, 3}, {1, 4});
  CHECK(trio_deficiency(t) == 1);
  const Trio p = purify(t, h, 1);
  CHECK(p == trio(z6, {0, 3}, {0, 1, 3, 4}, {1, 4}));
  CHECK(trio_deficiency(p) == 2);

  auto reason = [&](const Trio& x, const Subgroup& k, Element r) {
    try {
      purify(x, k, r);
    } catch (const PurifyError& e) {
      return e.reason();
    }
    return PurifyFailure::BadInput;
  };
  CHECK(reason(t, h, 0) == PurifyFailure::CosetInsideB);
  CHECK(reason(trio(z6, {0, 3}, {0, 3}, {1, 2, 4, 5}), h, 1) == PurifyFailure::CosetOutsideB);
  // (A, {0,2,4}) is not critical when A = {0,3}: A + H = G.
  CHECK(reason(t, z6.subgroup(bits({0, 2, 4})), 1) == PurifyFailure::PairNotCritical);
  CHECK(reason(trio(z6, {0}, {0, 1}, {1, 2}), z6.trivial(), 1) == PurifyFailure::TrioNotCritical);
}

TEST_CASE("purification never lowers deficiency on small groups") {
  OracleOptions o;
  o.purification_samples = 400;
  for (const Group& g : support::groups_up_to(8)) {
    const TheoremReport r = check_theorem(g, TheoremId::Purification, o);
    CAPTURE(render_report(r, false));
    CHECK(r.instances == 400);
    CHECK(r.passed());
  }
}

TEST_CASE("pure superpair and maximal trio propositions hold up to order 8") {
  for (const Group& g : support::groups_up_to(8)) {
    for (TheoremId id : {TheoremId::PurePairProp, TheoremId::MaximalTrioProp, TheoremId::KneserV2}) {
      const TheoremReport r = check_theorem(g, id);
      CAPTURE(render_report(r, false));
      CHECK(r.mode == "exhaustive");
      CHECK(r.instances > 0);
      CHECK(r.passed());
    }
  }
}

TEST_CASE("pure superpairs come from saturating by the sumset stabilizer") {
  // Observation: for H = G_{A+B}, the pair (A+H, B+H) is pure.
  for (const Group& g : support::groups_up_to(8)) {
    CAPTURE(g.spec());
    long bad = 0;
    for_each_nonempty_subset(g.full(), [&](Mask a) {
      for_each_nonempty_subset(g.full(), [&](Mask b) {
        const Mask h = kernel::stabilizer(g, kernel::sumset(g, a, b));
        const Mask a2 = kernel::sumset(g, a, h), b2 = kernel::sumset(g, b, h);
        const Mask s = kernel::stabilizer(g, kernel::sumset(g, a2, b2));
        if (kernel::stabilizer(g, a2) != s || kernel::stabilizer(g, b2) != s) ++bad;
      });
    });
    CHECK(bad == 0);
  }
}
