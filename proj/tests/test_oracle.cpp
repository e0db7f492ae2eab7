#include <algorithm>
#include <cstdlib>
#include <set>

#include "brute.hpp"
#include "doctest.h"
#include "json.hpp"
#include "kk/oracle.hpp"
#include "kk/setops.hpp"
#include "kk/verify.hpp"
#include "support.hpp"

using namespace kk;
using support::bits;

namespace {

std::set<std::array<Mask, 3>> masks_of(const std::vector<Trio>& trios) {
  std::set<std::array<Mask, 3>> out;
  for (const Trio& t : trios) out.insert(t.masks());
  return out;
}

}  // namespace

TEST_CASE("enumeration examples") {
  const auto z2 = enumerate_maximal_critical_trios(Group::parse("Z2"), true);
  REQUIRE(z2.size() == 1);
  CHECK(to_string(z2[0]) == "{0};{0};{1}");

  const Group z3 = Group::parse("Z3");
  const auto z3_orbits = masks_of(enumerate_maximal_critical_trios(z3, true));
  CHECK(z3_orbits.count({bits({0}), bits({0}), bits({1, 2})}) == 1);

  CHECK(enumerate_maximal_critical_trios(Group(), true).empty());
  CHECK(enumerate_maximal_critical_trios(Group(), false).empty());
}

TEST_CASE("enumeration agrees with a direct scan over all triples") {
  for (const Group& g : support::groups_up_to(6)) {
    CAPTURE(g.spec());
    const Mask full = g.full();
    std::set<std::array<Mask, 3>> direct, orbits;
    for (Mask a = 1; a <= full; ++a) {
      for (Mask b = 1; b <= full; ++b) {
        for (Mask c = 1; c <= full; ++c) {
          if (!brute::is_trio(g, full, a, b, c) || !brute::is_maximal(g, full, a, b, c)) continue;
          if (brute::size(a) + brute::size(b) + brute::size(c) <= g.order()) continue;
          direct.insert({a, b, c});
          orbits.insert(canonical_form(Trio::unchecked(g, g.whole(), {a, b, c})).masks());
        }
      }
    }
    CHECK(masks_of(enumerate_maximal_critical_trios(g, false)) == direct);
    CHECK(masks_of(enumerate_maximal_critical_trios(g, true)) == orbits);
    std::vector<std::array<Mask, 3>> visited;
    for_each_maximal_critical_trio(g, [&](const std::array<Mask, 3>& t) { visited.push_back(t); });
    CHECK(std::set<std::array<Mask, 3>>(visited.begin(), visited.end()) == direct);
    CHECK(visited.size() == direct.size());
  }
}

TEST_CASE("enumeration is independent of the worker count") {
  for (const char* spec : {"Z8", "Z2xZ6", "Z3xZ3"}) {
    const Group g = Group::parse(spec);
    OracleOptions one, many;
    one.workers = 1;
    many.workers = 5;
    for (bool dedup : {false, true}) {
      CHECK(enumerate_maximal_critical_trios(g, dedup, one) == enumerate_maximal_critical_trios(g, dedup, many));
    }
  }
}

TEST_CASE("enumeration bound") {
  CHECK_THROWS_AS(enumerate_maximal_critical_trios(Group::parse("Z13"), true), SizeError);
  OracleOptions small;
  small.exhaustive_bound = 6;
  CHECK_THROWS_AS(enumerate_maximal_critical_trios(Group::parse("Z8"), false, small), SizeError);
  CHECK_THROWS_AS(build_atlas(13), SizeError);
  CHECK_THROWS_AS(abelian_groups_of_order(0), SizeError);

  setenv("KK_MAX_EXHAUSTIVE", "7", 1);
  CHECK(OracleOptions::from_env().exhaustive_bound == 7);
  setenv("KK_MAX_EXHAUSTIVE", "lots", 1);
  CHECK_THROWS_AS(OracleOptions::from_env(), ParseError);
  unsetenv("KK_MAX_EXHAUSTIVE");
  CHECK(OracleOptions::from_env().exhaustive_bound == 12);
}

TEST_CASE("theorem ids") {
  CHECK(all_theorem_ids().size() == 15);
  for (TheoremId id : all_theorem_ids()) CHECK(parse_theorem_id(to_string(id)) == id);
  CHECK(to_string(TheoremId::CauchyDavenport) == "cauchy-davenport");
  CHECK(to_string(TheoremId::KneserV2) == "kneser-v2");
  CHECK_THROWS_AS(parse_theorem_id("fermat"), ParseError);
}

TEST_CASE("prime-only checks reject other groups") {
  CHECK_THROWS_AS(check_theorem(Group::parse("Z8"), TheoremId::Vosper), ContractViolation);
  CHECK_THROWS_AS(check_theorem(Group::parse("Z6"), TheoremId::CauchyDavenport), ContractViolation);
  CHECK_THROWS_AS(check_theorem(Group::parse("Z2xZ2"), TheoremId::Vosper), ContractViolation);
  CHECK_THROWS_AS(check_theorem(Group(), TheoremId::Kneser), ContractViolation);
}

TEST_CASE("theorem examples") {
  const TheoremReport cd = check_theorem(Group::parse("Z7"), TheoremId::CauchyDavenport);
  CHECK(cd.passed());
  CHECK(cd.mode == "exhaustive");
  CHECK(cd.instances == 127 * 127);
  CHECK(render_report(cd, false) == "cauchy-davenport Z7 exhaustive instances: 16129 violations: 0\n");

  const TheoremReport kn = check_theorem(Group::parse("Z8"), TheoremId::Kneser);
  CHECK(kn.passed());
  CHECK(kn.instances == 255 * 255);

  const TheoremReport km = check_theorem(Group::parse("Z2xZ4"), TheoremId::Kemperman);
  CHECK(km.passed());
  CHECK(km.instances == static_cast<long>(enumerate_maximal_critical_trios(Group::parse("Z2xZ4"), false).size()));
}

TEST_CASE("every check passes on small groups") {
  OracleOptions o;
  o.samples = 2000;
  o.purification_samples = 300;
  o.soundness_samples = 100;
  for (const Group& g : support::groups_up_to(8)) {
    for (TheoremId id : all_theorem_ids()) {
      TheoremReport r;
      try {
        r = check_theorem(g, id, o);
      } catch (const ContractViolation&) {
        continue;  // prime-only checks
      }
      CAPTURE(render_report(r, false));
      CHECK(r.passed());
      CHECK(r.group == g.spec());
      CHECK(r.theorem == id);
    }
  }
}

TEST_CASE("sampled checks are reproducible and independent of workers") {
  OracleOptions a;
  a.samples = 3000;
  a.workers = 1;
  OracleOptions b = a;
  b.workers = 4;
  const Group g = Group::parse("Z2xZ8");
  const TheoremReport ra = check_theorem(g, TheoremId::Kneser, a);
  const TheoremReport rb = check_theorem(g, TheoremId::Kneser, b);
  CHECK(ra.mode == "sampled");
  CHECK(ra.instances == 3000);
  CHECK(render_report(ra, true) == render_report(rb, true));

  a.purification_samples = b.purification_samples = 200;
  const TheoremReport pa = check_theorem(g, TheoremId::Purification, a);
  const TheoremReport pb = check_theorem(g, TheoremId::Purification, b);
  CHECK(pa.instances == 200);
  CHECK(render_report(pa, false) == render_report(pb, false));
}

TEST_CASE("report rendering") {
  TheoremReport r;
  r.theorem = TheoremId::Mann;
  r.group = "Z6";
  r.mode = "exhaustive";
  r.instances = 62;
  r.violation_count = 1;
  r.violations.push_back({"A={0,1}: subgroup max 1 != brute max 2", "kk deficiency -g Z6 \"{0,1}\""});
  r.seconds = 12.5;
  CHECK(render_report(r, false) ==
        "violation mann Z6: A={0,1}: subgroup max 1 != brute max 2\n"
        "  repro: kk deficiency -g Z6 \"{0,1}\"\n"
        "mann Z6 exhaustive instances: 62 violations: 1\n");
  const std::string json = render_report(r, true);
  CHECK(json ==
        "{\"record\":\"violation\",\"theorem\":\"mann\",\"group\":\"Z6\",\"detail\":\"A={0,1}: subgroup max 1 != "
        "brute max 2\",\"repro\":\"kk deficiency -g Z6 \\\"{0,1}\\\"\"}\n"
        "{\"record\":\"summary\",\"theorem\":\"mann\",\"group\":\"Z6\",\"mode\":\"exhaustive\",\"instances\":62,"
        "\"violations\":1}\n");
  CHECK_FALSE(r.passed());
}

TEST_CASE("atlas rows") {
  const auto two = build_atlas(2);
  REQUIRE(two.size() == 1);
  CHECK(two[0].group == "Z2");
  CHECK(two[0].orbits == 1);
  CHECK(two[0].first_step[static_cast<int>(StructureKind::PureBeat)] == 1);

  std::vector<std::string> names;
  for (const AtlasRow& r : build_atlas(4)) names.push_back(r.group);
  CHECK(names == std::vector<std::string>{"Z2", "Z3", "Z4", "Z2xZ2"});

  const auto eight = build_atlas(8);
  std::set<std::string> specs;
  for (const AtlasRow& r : eight) {
    specs.insert(r.group);
    CAPTURE(r.group);
    long sum = 0;
    for (int k = 0; k < 4; ++k) {
      sum += r.first_step[k];
      CHECK(r.admits[k] >= r.first_step[k]);
      CHECK(r.representative[k].has_value() == (r.first_step[k] > 0));
      if (!r.representative[k]) continue;
      const Trio& t = *r.representative[k];
      CHECK(is_maximal(t));
      CHECK(is_critical(t));
      CHECK(canonical_form(t) == t);
      const Certificate c = decompose(t);
      CHECK(static_cast<int>(c.steps[0].tag.kind) == k);
      CHECK(verify_certificate(c).ok);
    }
    CHECK(sum == r.orbits);
    CHECK(r.orbits == static_cast<long>(enumerate_maximal_critical_trios(Group::parse(r.group), true).size()));
  }
  CHECK(specs.count("Z8"));
  CHECK(specs.count("Z2xZ4"));
  CHECK(specs.count("Z2xZ2xZ2"));

  const std::string text = render_atlas(eight, false);
  CHECK(text.rfind("group", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(eight.size()) + 1);
  const std::string lines = render_atlas(eight, true);
  CHECK(std::count(lines.begin(), lines.end(), '\n') == static_cast<long>(eight.size()));
  CHECK(nlohmann::json::parse(lines.substr(0, lines.find('\n')))["group"] == "Z2");
}

TEST_CASE("prime cyclic orbits are small or progressions with a common difference") {
  const Group z5 = Group::parse("Z5");
  CHECK(check_theorem(z5, TheoremId::Vosper).passed());
  const AtlasRow row = atlas_row(z5);
  const auto orbits = enumerate_maximal_critical_trios(z5, true);
  CHECK(row.orbits == static_cast<long>(orbits.size()));
  for (const Trio& t : orbits) {
    CAPTURE(to_string(t));
    const int smallest = std::min({popcount(t.bits(0)), popcount(t.bits(1)), popcount(t.bits(2))});
    bool progression = false;
    for (Element r = 1; r < 5; ++r) {
      bool all = true;
      for (int i = 0; i < 3; ++i) {
        all = all && sequence_profile(t.set(i), z5.trivial(), r).is_sequence;
      }
      progression = progression || all;
    }
    CHECK((smallest == 1 || progression));
  }
}
