#include "doctest.h"
#include "kk/oracle.hpp"
#include "kk/verify.hpp"
#include "support.hpp"

using namespace kk;
using support::bits;
using support::set;

namespace {

Trio trio(const Group& g, std::initializer_list<Element> a, std::initializer_list<Element> b,
          std::initializer_list<Element> c) {
  return Trio(set(g, a), set(g, b), set(g, c));
}

Certificate z8_chain() {
  const Group z8 = Group::parse("Z8");
  return decompose(trio(z8, {0, 1, 5}, {0, 1, 5}, {1, 4, 5}));
}

Verdict expect_failure(const Certificate& c, int step, const std::string& why) {
  const Verdict v = verify_certificate(c);
  CHECK_FALSE(v.ok);
  CHECK(v.step == step);
  CHECK(v.failure == why);
  return v;
}

}  // namespace

TEST_CASE("decomposed certificates verify") {
  const Verdict v = verify_certificate(z8_chain());
  CHECK(v.ok);
  CHECK(v.step == -1);
  CHECK(v.failure.empty());
}

TEST_CASE("empty and non-maximal certificates") {
  expect_failure(Certificate{}, -1, "empty certificate");
  const Group z6 = Group::parse("Z6");
  const StructureTag tag{StructureKind::PureBeat, z6.trivial(), std::nullopt, Similarity::identity()};
  expect_failure(Certificate{{CertificateStep{trio(z6, {0}, {0, 1}, {1, 2}), tag}}}, 0, "first trio is not maximal");
  const Trio not_trio = Trio::unchecked(z6, z6.whole(), {bits({0}), bits({0}), bits({0})});
  expect_failure(Certificate{{CertificateStep{not_trio, tag}}}, 0, "first step is not a trio");
}

TEST_CASE("chain must descend strictly") {
  Certificate c = z8_chain();
  c.steps[1].trio = Trio::unchecked(c.steps[1].trio.group(), c.steps[0].trio.universe(), c.steps[1].trio.masks());
  expect_failure(c, 1, "chain not strictly descending");
}

TEST_CASE("final step must be pure") {
  Certificate c = z8_chain();
  c.steps.pop_back();
  expect_failure(c, 0, "final step not pure");

  Certificate d = z8_chain();
  d.steps.insert(d.steps.begin() + 1, d.steps.back());
  // The repeated universe is caught first.
  CHECK_FALSE(verify_certificate(d).ok);

  const Group z6 = Group::parse("Z6");
  Certificate e = decompose(trio(z6, {0}, {0, 1}, {1, 2, 3, 4}));
  const Trio inner = Trio::unchecked(z6, z6.trivial(), {bits({0}), bits({0}), bits({0})});
  e.steps.push_back({inner, e.steps[0].tag});
  CHECK_FALSE(verify_certificate(e).ok);
}

TEST_CASE("tampered subgroup, generator or similarity") {
  Certificate c = z8_chain();
  const Group& g = c.steps[0].trio.group();
  c.steps[0].tag.subgroup = Subgroup::unchecked(bits({0, 2, 4, 6}));
  CHECK_FALSE(verify_certificate(c).ok);
  CHECK(verify_certificate(c).step == 0);

  Certificate d = z8_chain();
  d.steps[0].tag.subgroup = Subgroup::unchecked(bits({0, 1}));
  expect_failure(d, 0, "impure-chord: H is not a subgroup");

  Certificate e = z8_chain();
  e.steps[0].tag.generator = std::nullopt;
  expect_failure(e, 0, "impure-chord: generator present iff chord");

  Certificate f = z8_chain();
  f.steps[0].tag.similarity = compose(g, f.steps[0].tag.similarity, Similarity::opposite_shift(g, 0, 1, 1));
  CHECK_FALSE(verify_certificate(f).ok);

  Certificate h = z8_chain();
  h.steps[0].tag.similarity.shift = {1, 0, 0};
  expect_failure(h, 0, "impure-chord: invalid similarity");
}

TEST_CASE("next step must be the continuation") {
  Certificate c = z8_chain();
  const Trio& next = c.steps[1].trio;
  // ({4},{0},{0}) is a trio in {0,4} with the same deficiency but not the continuation.
  c.steps[1].trio = Trio::unchecked(next.group(), next.universe(), {bits({4}), bits({0}), bits({0})});
  expect_failure(c, 0, "next trio is not the continuation");
}

TEST_CASE("deficiency must be preserved along the chain") {
  // Find a two-step certificate whose continuation lives in a subgroup of order at least 4,
  // then swap in a trio (K, K, H \ K) of deficiency |K| != δ.
  bool found = false;
  for (const Group& g : support::groups_up_to(12)) {
    for (const Trio& t : enumerate_maximal_critical_trios(g, true)) {
      Certificate c = decompose(t);
      if (c.steps.size() < 2) continue;
      const Subgroup h = c.steps[1].trio.universe();
      if (h.order() < 4) continue;
      const int delta = trio_deficiency(t);
      for (const Subgroup& k : g.subgroups()) {
        if ((k.bits() & ~h.bits()) || k == h || k.order() == delta) continue;
        c.steps[1].trio = Trio::unchecked(g, h, {k.bits(), k.bits(), h.bits() & ~k.bits()});
        expect_failure(c, 1, "deficiency not preserved");
        found = true;
        break;
      }
      if (found) break;
    }
    if (found) break;
  }
  CHECK(found);
}

TEST_CASE("group may not change along the chain") {
  Certificate c = z8_chain();
  const Group other = Group::parse("Z2xZ4");
  c.steps[1].trio = Trio::unchecked(other, other.trivial(), c.steps[1].trio.masks());
  expect_failure(c, 1, "group changes along the chain");
}

TEST_CASE("tag checks name the failed condition") {
  const Group z6 = Group::parse("Z6");
  const Trio t = trio(z6, {0}, {0, 1}, {1, 2, 3, 4});
  CHECK(check_tag(t, {StructureKind::PureBeat, z6.trivial(), std::nullopt, Similarity::identity()}).empty());
  CHECK(check_tag(t, {StructureKind::PureBeat, z6.subgroup(bits({0, 3})), std::nullopt, Similarity::identity()}) ==
        "A != H");
  CHECK(check_tag(t, {StructureKind::PureBeat, z6.whole(), std::nullopt, Similarity::identity()}) ==
        "H is not a proper subgroup of the universe");
  CHECK(check_tag(t, {StructureKind::PureChord, z6.trivial(), std::nullopt, Similarity::identity()}) ==
        "generator present iff chord");
}
