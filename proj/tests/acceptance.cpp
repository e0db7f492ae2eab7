// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "kk/oracle.hpp"

using namespace kk;

namespace {

struct Outcome {
  bool pass = true;
  long instances = 0;
  long violations = 0;
  std::string report;
  std::string note;
  double seconds = 0;
};

// Runs `id` on each group and folds the reports; `exhaustive` demands that no group fell back to sampling.
void run(Outcome& o, const std::vector<Group>& groups, TheoremId id, const OracleOptions& opt, bool exhaustive) {
  for (const Group& g : groups) {
    const TheoremReport r = check_theorem(g, id, opt);
    o.report += render_report(r, false);
    o.instances += r.instances;
    o.violations += r.violation_count;
    if (!r.passed()) o.pass = false;
    if (exhaustive && r.mode != "exhaustive") {
      o.pass = false;
      o.note += " " + r.group + " was not exhaustive;";
    }
  }
}

std::vector<Group> cyclic(std::initializer_list<int> orders) {
  std::vector<Group> out;
  for (int n : orders) out.push_back(Group::parse("Z" + std::to_string(n)));
  return out;
}

std::vector<Group> orders_between(int lo, int hi) {
  std::vector<Group> out;
  for (int n = lo; n <= hi; ++n) {
    for (const Group& g : abelian_groups_of_order(n)) out.push_back(g);
  }
  return out;
}

using Criterion = std::function<void(Outcome&)>;

std::vector<Criterion> criteria() {
  OracleOptions base;
  base.seed = 1;
  return {
      [=](Outcome& o) { run(o, cyclic({2, 3, 5, 7, 11, 13}), TheoremId::CauchyDavenport, base, true); },
      [=](Outcome& o) {
        run(o, orders_between(2, 10), TheoremId::Kneser, base, true);
        OracleOptions s = base;
        s.samples = 100'000;
        for (const Group& g : orders_between(11, 24)) {
          const TheoremReport r = check_theorem(g, TheoremId::Kneser, s);
          o.report += render_report(r, false);
          o.instances += r.instances;
          o.violations += r.violation_count;
          if (!r.passed() || r.instances < s.samples) o.pass = false;
        }
      },
      [=](Outcome& o) { run(o, orders_between(2, 12), TheoremId::KneserV2, base, true); },
      [=](Outcome& o) { run(o, cyclic({5, 7, 11}), TheoremId::Vosper, base, true); },
      [=](Outcome& o) { run(o, orders_between(2, 12), TheoremId::Kemperman, base, true); },
      [=](Outcome& o) { run(o, orders_between(2, 8), TheoremId::Mann, base, true); },
      [=](Outcome& o) {
        const std::vector<Group> groups = orders_between(2, 16);
        OracleOptions p = base;
        p.purification_samples = static_cast<long>(std::ceil(10'000.0 / static_cast<double>(groups.size())));
        run(o, groups, TheoremId::Purification, p, false);
        if (o.instances < 10'000) o.pass = false;
      },
      [=](Outcome& o) { run(o, orders_between(2, 12), TheoremId::StructuralSoundness, base, false); },
      [=](Outcome& o) {
        run(o, orders_between(2, 12), TheoremId::BeatStability, base, true);
        run(o, orders_between(2, 12), TheoremId::ChordStability, base, true);
      },
  };
}

std::vector<Outcome> run_all() {
  std::vector<Outcome> out;
  for (const Criterion& c : criteria()) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    c(o);
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace

int main() {
  std::vector<Outcome> first = run_all();
  // Wall-clock budgets apply to the first run only.
  if (first[0].seconds > 60) {
    first[0].pass = false;
    first[0].note += " took longer than 60 s;";
  }
  if (first[1].seconds > 300) {
    first[1].pass = false;
    first[1].note += " took longer than 5 min;";
  }
  if (first[4].seconds > 1800) {
    first[4].pass = false;
    first[4].note += " took longer than 30 min;";
  }
  bool all = true;
  for (std::size_t i = 0; i < first.size(); ++i) {
    const Outcome& o = first[i];
    if (o.instances == 0) all = false;
    std::printf("criterion %zu: %s instances %ld violations %ld time %.1fs%s\n", i + 1, o.pass ? "PASS" : "FAIL",
                o.instances, o.violations, o.seconds, o.note.c_str());
    if (!o.pass) {
      std::fputs(o.report.c_str(), stdout);
      all = false;
    }
  }

  const std::vector<Outcome> second = run_all();
  std::size_t differing = 0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    if (first[i].report != second[i].report) ++differing;
  }
  std::printf("criterion 10: %s %zu of %zu reports byte-identical on rerun\n", differing == 0 ? "PASS" : "FAIL",
              first.size() - differing, first.size());
  all = all && differing == 0;
  return all ? 0 : 1;
}
