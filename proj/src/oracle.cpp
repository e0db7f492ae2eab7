#include "kk/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "parallel.hpp"
#include "kk/setops.hpp"
#include "kk/verify.hpp"

namespace kk {

OracleOptions OracleOptions::from_env() {
  OracleOptions o;
  if (const char* v = std::getenv("KK_MAX_EXHAUSTIVE"); v && *v) {
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1 || n > kMaxOrder) {
      throw ParseError(std::string("KK_MAX_EXHAUSTIVE must be an integer in [1, 64], got '") + v + "'");
    }
    o.exhaustive_bound = static_cast<int>(n);
  }
  return o;
}

std::vector<Group> abelian_groups_of_order(int n) {
  static const std::map<int, std::vector<std::vector<int>>> table{
      {1, {{}}},
      {4, {{4}, {2, 2}}},
      {8, {{8}, {2, 4}, {2, 2, 2}}},
      {9, {{9}, {3, 3}}},
      {12, {{12}, {2, 6}}},
      {16, {{16}, {2, 8}, {4, 4}, {2, 2, 4}, {2, 2, 2, 2}}},
      {18, {{18}, {3, 6}}},
      {20, {{20}, {2, 10}}},
      {24, {{24}, {2, 12}, {2, 2, 6}}},
  };
  if (n < 1 || n > 24) throw SizeError("group classification is tabulated for orders 1..24");
  std::vector<Group> out;
  if (auto it = table.find(n); it != table.end()) {
    for (const auto& f : it->second) out.emplace_back(f);
  } else {
    out.emplace_back(std::vector<int>{n});
  }
  return out;
}

std::vector<Group> abelian_groups_up_to(int max_order) {
  std::vector<Group> out;
  for (int n = 2; n <= max_order; ++n) {
    for (Group& g : abelian_groups_of_order(n)) out.push_back(std::move(g));
  }
  return out;
}

namespace {

using Triple = std::array<Mask, 3>;

int worker_count(const OracleOptions& o) { return detail::resolve_workers(o.workers); }

struct Partial {
  long instances = 0;
  long violation_count = 0;
  std::vector<Violation> violations;

  void violate(std::string detail, std::string repro) {
    if (violations.size() < kMaxListedViolations) violations.push_back({std::move(detail), std::move(repro)});
    ++violation_count;
  }
  void absorb(Partial&& o) {
    instances += o.instances;
    violation_count += o.violation_count;
    for (auto& v : o.violations) {
      if (violations.size() < kMaxListedViolations) violations.push_back(std::move(v));
    }
  }
};

// Splits the first-set range [1, full] into contiguous slices.
template <class Fn>
Partial over_first_sets(const Group& g, int workers, Fn&& fn) {
  const Mask first = 1;
  const Mask total = g.full();  // masks 1..full
  const long slices = static_cast<long>(std::min<Mask>(total, 64));
  auto parts = detail::run_indexed<Partial>(slices, workers, [&](long i, Partial& out) {
    const Mask lo = first + total * static_cast<Mask>(i) / static_cast<Mask>(slices);
    const Mask hi = first + total * static_cast<Mask>(i + 1) / static_cast<Mask>(slices);
    fn(lo, hi, out);
  });
  Partial all;
  for (auto& p : parts) all.absorb(std::move(p));
  return all;
}

bool maximal_critical(const Group& g, Mask a, Mask b, Triple& out) {
  const Mask s = kernel::sumset(g, a, b);
  if (s == g.full() || popcount(a) + popcount(b) <= popcount(s)) return false;
  const Mask u = g.full();
  const Mask c = u & ~g.negate(s);
  if (kernel::third(g, u, a, c) != b || kernel::third(g, u, b, c) != a) return false;
  out = {a, b, c};
  return true;
}

template <class Visit>
void scan_trios(const Group& g, Mask lo, Mask hi, Visit&& visit) {
  const Mask full = g.full();
  Triple t;
  for (Mask a = lo; a < hi; ++a) {
    for (Mask b = 1; b <= full; ++b) {
      if (maximal_critical(g, a, b, t)) visit(t);
      if (b == full) break;
    }
  }
}

void require_exhaustive(const Group& g, int bound, const char* what) {
  if (g.order() > bound) {
    throw SizeError(std::string(what) + " on " + g.spec() + " exceeds the exhaustive bound " +
                    std::to_string(bound) + " (raise KK_MAX_EXHAUSTIVE to override)");
  }
}

// Deterministic streams: seeded from (seed, group, theorem, stream), never from the worker count.
constexpr int kStreams = 16;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t seed, const std::string& spec, TheoremId id, int stream) {
  std::uint64_t h = splitmix(seed);
  for (char ch : spec) h = splitmix(h ^ static_cast<unsigned char>(ch));
  h = splitmix(h ^ static_cast<std::uint64_t>(id));
  return splitmix(h ^ static_cast<std::uint64_t>(stream));
}

class Sampler {
 public:
  Sampler(const Group& g, std::uint64_t seed) : g_(g), rng_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = rng_();
      if (r >= threshold) return r % n;
    }
  }
  /// Uniform over nonempty subsets of `within`.
  Mask subset(Mask within) {
    for (;;) {
      Mask m = 0;
      if (within == g_.full()) {
        m = rng_() & within;
      } else {
        for_each_element(within, [&](Element x) {
          if (rng_() & 1U) m |= Mask{1} << x;
        });
      }
      if (m) return m;
    }
  }
  /// A nonempty subset whose size is uniform in [1, |within|].
  Mask sized_subset(Mask within) {
    std::vector<Element> xs;
    for_each_element(within, [&](Element x) { xs.push_back(x); });
    const std::size_t k = 1 + below(xs.size());
    Mask m = 0;
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(xs[i], xs[i + below(xs.size() - i)]);
      m |= Mask{1} << xs[i];
    }
    return m;
  }

 private:
  const Group& g_;
  std::mt19937_64 rng_;
};

// Splits `samples` draws over the fixed streams; fn(sampler, count, out).
template <class Fn>
Partial over_samples(const Group& g, TheoremId id, const OracleOptions& o, long samples, Fn&& fn) {
  auto parts = detail::run_indexed<Partial>(kStreams, worker_count(o), [&](long i, Partial& out) {
    const long count = samples / kStreams + (i < samples % kStreams ? 1 : 0);
    Sampler s(g, stream_seed(o.seed, g.spec(), id, static_cast<int>(i)));
    fn(s, count, out);
  });
  Partial all;
  for (auto& p : parts) all.absorb(std::move(p));
  return all;
}

std::string set_text(const Group& g, Mask m) { return to_string(g, m); }

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

std::string trio_text(const Group& g, const Triple& t) {
  return set_text(g, t[0]) + ";" + set_text(g, t[1]) + ";" + set_text(g, t[2]);
}

std::string pair_repro(const Group& g, const char* verb, Mask a, Mask b) {
  return std::string("kk ") + verb + " -g " + g.spec() + " " + quoted(set_text(g, a)) + " " +
         quoted(set_text(g, b));
}

std::string trio_repro(const Group& g, const char* verb, const Triple& t, const char* flags = "") {
  return std::string("kk ") + verb + " -g " + g.spec() + " " + quoted(trio_text(g, t)) + flags;
}

std::string pair_text(const Group& g, Mask a, Mask b) {
  return "A=" + set_text(g, a) + " B=" + set_text(g, b);
}

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

void require_prime_cyclic(const Group& g, TheoremId id) {
  if (!g.is_cyclic() || !is_prime(g.order())) {
    throw ContractViolation(std::string(to_string(id)) + " applies to cyclic groups of prime order, not " +
                            g.spec());
  }
}

Trio whole_trio(const Group& g, const Triple& t) { return Trio::unchecked(g, g.whole(), t); }

MatchOptions only(bool pb, bool pc, bool ib, bool ic, bool first_only) {
  MatchOptions m;
  m.first_only = first_only;
  m.pure_beats = pb;
  m.pure_chords = pc;
  m.impure_beats = ib;
  m.impure_chords = ic;
  return m;
}

bool is_proper_near_sequence(const Group& g, Mask m) {
  for (const SequenceMatch& s : recognize_sequences(GroupSet(g, m))) {
    if (s.profile.is_near && s.profile.is_proper) return true;
  }
  return false;
}

bool is_near_sequence(const Group& g, Mask m) {
  for (const SequenceMatch& s : recognize_sequences(GroupSet(g, m))) {
    if (s.profile.is_near) return true;
  }
  return false;
}

// A per-set predicate, tabulated over every subset up front when the group is
// small enough for exhaustive runs.
class MaskPredicate {
 public:
  MaskPredicate(const Group& g, const OracleOptions& o, bool tabulate, bool (*f)(const Group&, Mask))
      : g_(g), f_(f) {
    if (!tabulate) return;
    const Mask full = g.full();
    table_.assign(static_cast<std::size_t>(full) + 1, 0);
    const long slices = 64;
    detail::run_indexed<char>(slices, worker_count(o), [&](long i, char&) {
      for (Mask m = full * i / slices; m < full * (i + 1) / slices; ++m) table_[m] = f_(g_, m) ? 1 : 0;
    });
    table_[full] = f_(g_, full) ? 1 : 0;
  }
  bool operator()(Mask m) const { return table_.empty() ? f_(g_, m) : table_[m] == 1; }

 private:
  const Group& g_;
  bool (*f_)(const Group&, Mask);
  std::vector<char> table_;
};

// Runs `check` over every nontrivial maximal critical trio, or over saturated
// random pairs above the exhaustive bound.
template <class Check>
Partial over_trios(const Group& g, TheoremId id, const OracleOptions& o, bool exhaustive, Check&& check) {
  if (exhaustive) {
    return over_first_sets(g, worker_count(o), [&](Mask lo, Mask hi, Partial& out) {
      scan_trios(g, lo, hi, [&](const Triple& t) { check(t, out); });
    });
  }
  return over_samples(g, id, o, o.samples, [&](Sampler& s, long count, Partial& out) {
    const Mask full = g.full();
    for (long i = 0; i < count; ++i) {
      const Mask a = s.sized_subset(full);
      const Mask b = s.sized_subset(full);
      const Mask c = kernel::third(g, full, a, b);
      if (c == 0) continue;
      const Trio sat = saturate(Trio::unchecked(g, g.whole(), {a, b, c}));
      if (!sat.nontrivial() || !is_critical(sat)) continue;
      check(sat.masks(), out);
    }
  });
}

Partial check_cauchy_davenport(const Group& g, const OracleOptions& o, bool exhaustive) {
  const int p = g.order();
  auto body = [&](Mask a, Mask b, Partial& out) {
    ++out.instances;
    const int s = popcount(kernel::sumset(g, a, b));
    const int bound = std::min(p, popcount(a) + popcount(b) - 1);
    if (s < bound) {
      out.violate(pair_text(g, a, b) + " |A+B|=" + std::to_string(s) + " < " + std::to_string(bound),
                  pair_repro(g, "sumset", a, b));
    }
  };
  if (exhaustive) {
    return over_first_sets(g, worker_count(o), [&](Mask lo, Mask hi, Partial& out) {
      for (Mask a = lo; a < hi; ++a) {
        for (Mask b = 1; b <= g.full(); ++b) {
          body(a, b, out);
          if (b == g.full()) break;
        }
      }
    });
  }
  return over_samples(g, TheoremId::CauchyDavenport, o, o.samples, [&](Sampler& s, long n, Partial& out) {
    for (long i = 0; i < n; ++i) body(s.subset(g.full()), s.subset(g.full()), out);
  });
}

Partial check_kneser(const Group& g, const OracleOptions& o, bool exhaustive) {
  auto body = [&](Mask a, Mask b, Partial& out) {
    ++out.instances;
    const Mask s = kernel::sumset(g, a, b);
    const Mask h = kernel::stabilizer(g, s);
    const int rhs = popcount(kernel::sumset(g, a, h)) + popcount(kernel::sumset(g, b, h)) - popcount(h);
    if (popcount(s) < rhs) {
      out.violate(pair_text(g, a, b) + " |A+B|=" + std::to_string(popcount(s)) + " < " + std::to_string(rhs),
                  pair_repro(g, "sumset", a, b));
    }
  };
  if (exhaustive) {
    return over_first_sets(g, worker_count(o), [&](Mask lo, Mask hi, Partial& out) {
      for (Mask a = lo; a < hi; ++a) {
        for (Mask b = 1; b <= g.full(); ++b) {
          body(a, b, out);
          if (b == g.full()) break;
        }
      }
    });
  }
  return over_samples(g, TheoremId::Kneser, o, o.samples, [&](Sampler& s, long n, Partial& out) {
    for (long i = 0; i < n; ++i) body(s.subset(g.full()), s.subset(g.full()), out);
  });
}

Partial check_kneser_v2(const Group& g, const OracleOptions& o, bool exhaustive) {
  return over_trios(g, TheoremId::KneserV2, o, exhaustive, [&](const Triple& t, Partial& out) {
    ++out.instances;
    const Mask ha = kernel::stabilizer(g, t[0]);
    const int delta = popcount(t[0]) + popcount(t[1]) + popcount(t[2]) - g.order();
    if (kernel::stabilizer(g, t[1]) != ha || kernel::stabilizer(g, t[2]) != ha) {
      out.violate(trio_text(g, t) + " stabilizers differ", trio_repro(g, "trio", t));
    } else if (delta != popcount(ha)) {
      out.violate(trio_text(g, t) + " deficiency " + std::to_string(delta) + " != |G_A| " +
                      std::to_string(popcount(ha)),
                  trio_repro(g, "trio", t));
    }
  });
}

// Differences r with A an arithmetic progression of difference r, i.e. an
// R-sequence for H = {0} as reported by the sequence recognizer.
Mask progression_differences(const Group& g, Mask a) {
  Mask out = 0;
  for (const SequenceMatch& m : recognize_sequences(GroupSet(g, a))) {
    if (m.subgroup.order() == 1 && m.profile.is_sequence) out |= Mask{1} << m.generator;
  }
  return out;
}

Partial check_vosper(const Group& g, const OracleOptions& o, bool exhaustive) {
  const int p = g.order();
  const Mask full = g.full();
  std::vector<Mask> diffs(std::size_t{1} << p, 0);
  for (Mask m = 1; m < full; ++m) diffs[m] = progression_differences(g, m);
  auto body = [&](Mask a, Mask b, Mask c, Partial& out) {
    ++out.instances;
    if (std::min({popcount(a), popcount(b), popcount(c)}) == 1) return;
    if (diffs[a] & diffs[b] & diffs[c]) return;
    const Triple t{a, b, c};
    out.violate(trio_text(g, t) + " has no singleton and no common difference", trio_repro(g, "trio", t));
  };
  if (exhaustive) {
    return over_first_sets(g, worker_count(o), [&](Mask lo, Mask hi, Partial& out) {
      for (Mask a = lo; a < hi; ++a) {
        for (Mask b = 1; b < full; ++b) {
          const Mask cmax = kernel::third(g, full, a, b);
          const int need = p - popcount(a) - popcount(b);  // critical iff |C| > need
          if (cmax == 0 || popcount(cmax) <= need) continue;
          for (Mask c = cmax; c; c = (c - 1) & cmax) {
            if (popcount(c) > need) body(a, b, c, out);
          }
        }
      }
    });
  }
  return over_samples(g, TheoremId::Vosper, o, o.samples, [&](Sampler& s, long n, Partial& out) {
    for (long i = 0; i < n; ++i) {
      const Mask a = s.sized_subset(full);
      const Mask b = s.sized_subset(full);
      const Mask cmax = kernel::third(g, full, a, b);
      if (cmax == 0) continue;
      const Mask c = (i & 1) ? cmax : s.subset(cmax);
      if (popcount(a) + popcount(b) + popcount(c) > p) body(a, b, c, out);
    }
  });
}

Partial check_kemperman(const Group& g, const OracleOptions& o, bool exhaustive) {
  return over_trios(g, TheoremId::Kemperman, o, exhaustive, [&](const Triple& t, Partial& out) {
    ++out.instances;
    const Trio trio = whole_trio(g, t);
    try {
      const Certificate cert = decompose(trio);
      const Verdict v = verify_certificate(cert);
      if (!v.ok) {
        out.violate(trio_text(g, t) + " certificate rejected at step " + std::to_string(v.step) + ": " + v.failure,
                    trio_repro(g, "decompose", t));
      }
    } catch (const NoStructureFound& e) {
      out.violate(std::string("no structure: ") + e.what(), trio_repro(g, "decompose", t));
    }
  });
}

int brute_set_deficiency(const Group& g, Mask a) {
  int best = 0;
  bool any = false;
  for (Mask b = 1; b <= g.full(); ++b) {
    const Mask s = kernel::sumset(g, a, b);
    if (s != g.full()) {
      const int d = popcount(a) + popcount(b) - popcount(s);
      if (!any || d > best) best = d;
      any = true;
    }
    if (b == g.full()) break;
  }
  return best;
}

Partial check_mann(const Group& g, const OracleOptions& o, bool exhaustive) {
  const Mask full = g.full();
  if (exhaustive) {
    return over_first_sets(g, worker_count(o), [&](Mask lo, Mask hi, Partial& out) {
      for (Mask a = lo; a < hi && a < full; ++a) {
        ++out.instances;
        const SetDeficiency d = deficiency_set(GroupSet(g, a));
        const int brute = brute_set_deficiency(g, a);
        if (d.value != brute) {
          out.violate("A=" + set_text(g, a) + " subgroup max " + std::to_string(d.value) + " != brute force " +
                          std::to_string(brute),
                      "kk deficiency -g " + g.spec() + " " + quoted(set_text(g, a)));
        }
      }
    });
  }
  return over_samples(g, TheoremId::Mann, o, o.samples, [&](Sampler& s, long n, Partial& out) {
    for (long i = 0; i < n; ++i) {
      const Mask a = s.sized_subset(full);
      const Mask b = s.sized_subset(full);
      if (a == full) continue;
      const Mask sum = kernel::sumset(g, a, b);
      if (sum == full) continue;
      ++out.instances;
      const SetDeficiency d = deficiency_set(GroupSet(g, a));
      const int pair = popcount(a) + popcount(b) - popcount(sum);
      if (pair > d.value) {
        out.violate(pair_text(g, a, b) + " pair deficiency " + std::to_string(pair) + " exceeds subgroup max " +
                        std::to_string(d.value),
                    pair_repro(g, "deficiency", a, b));
      }
    }
  });
}

Partial check_purification(const Group& g, const OracleOptions& o) {
  const Mask full = g.full();
  const auto& subgroups = g.subgroups();
  return over_samples(g, TheoremId::Purification, o, o.purification_samples,
                      [&](Sampler& s, long n, Partial& out) {
    long attempts = 0;
    const long limit = 1000 * std::max(n, 1L);
    while (out.instances < n && attempts++ < limit) {
      const Mask a = s.sized_subset(full);
      const Mask b = s.sized_subset(full);
      const Mask cmax = kernel::third(g, full, a, b);
      const int need = g.order() - popcount(a) - popcount(b);
      Mask c = 0;
      if (need < 0) {
        c = cmax ? ((attempts & 1) ? s.subset(cmax) : 0) : 0;
      } else if (popcount(cmax) > need) {
        c = (attempts & 1) ? s.subset(cmax) : cmax;
        if (popcount(c) <= need) c = cmax;
      } else {
        continue;
      }
      std::vector<Subgroup> hs;
      for (const Subgroup& h : subgroups) {
        if (popcount(a) + h.order() > popcount(kernel::sumset(g, a, h.bits()))) hs.push_back(h);
      }
      const Subgroup& h = hs[s.below(hs.size())];
      std::vector<Element> cosets;
      Mask seen = 0;
      for_each_element(full, [&](Element x) {
        if ((seen >> x) & 1U) return;
        const Mask coset = g.translate(h.bits(), x);
        seen |= coset;
        if ((coset & b) && (coset & b) != coset) cosets.push_back(x);
      });
      if (cosets.empty()) continue;
      const Element r = cosets[s.below(cosets.size())];
      const Trio t = Trio::unchecked(g, g.whole(), {a, b, c});
      ++out.instances;
      const Trio p = purify(t, h, r);
      const std::string where = trio_text(g, t.masks()) + " H=" + set_text(g, h.bits()) + " R=" +
                                set_text(g, g.translate(h.bits(), r));
      if (!is_trio(g, full, p.masks())) {
        out.violate(where + " output is not a trio", trio_repro(g, "trio", t.masks()));
      } else if (trio_deficiency(p) < trio_deficiency(t)) {
        out.violate(where + " deficiency fell to " + std::to_string(trio_deficiency(p)),
                    trio_repro(g, "trio", t.masks()));
      }
    }
  });
}

class BitTable {
 public:
  explicit BitTable(std::size_t bits) : words_((bits + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }

 private:
  std::vector<std::uint64_t> words_;
};

// Calls f(sub) for every submask of `m` missing at most `budget` elements.
template <class F>
void for_each_near_submask(Mask m, int budget, F&& f) {
  if (budget < 0) return;
  const int size = popcount(m);
  if (budget >= size) {
    for (Mask r = m;; r = (r - 1) & m) {
      f(m & ~r);
      if (r == 0) break;
    }
    return;
  }
  // Enumerate removal sets by size.
  std::vector<Element> xs;
  for_each_element(m, [&](Element x) { xs.push_back(x); });
  std::vector<int> idx;
  auto rec = [&](auto&& self, std::size_t start, Mask removed) -> void {
    f(m & ~removed);
    if (static_cast<int>(idx.size()) == budget) return;
    for (std::size_t i = start; i < xs.size(); ++i) {
      idx.push_back(static_cast<int>(i));
      self(self, i + 1, removed | (Mask{1} << xs[i]));
      idx.pop_back();
    }
  };
  rec(rec, 0, 0);
}

bool is_pure_pair(const Group& g, Mask a, Mask b, Mask s) {
  const Mask h = kernel::stabilizer(g, s);
  return kernel::stabilizer(g, a) == h && kernel::stabilizer(g, b) == h;
}

Partial check_pure_pair_prop(const Group& g, const OracleOptions& o, bool exhaustive) {
  const Mask full = g.full();
  const int n = g.order();
  // Forward direction by construction: (A+H, B+H) with H = G_{A+B}.
  auto construct = [&](Mask a, Mask b, Mask s, Partial& out) {
    const Mask h = kernel::stabilizer(g, s);
    const Mask a2 = kernel::sumset(g, a, h);
    const Mask b2 = kernel::sumset(g, b, h);
    const Mask s2 = kernel::sumset(g, a2, b2);
    const bool ok = is_pure_pair(g, a2, b2, s2) && popcount(a2) + popcount(b2) > popcount(s2) &&
                    popcount(a2 & ~a) + popcount(b2 & ~b) < popcount(h);
    if (!ok) {
      out.violate(pair_text(g, a, b) + " critical but (A+H, B+H) is not a close pure critical superpair",
                  pair_repro(g, "deficiency", a, b));
    }
  };
  if (!exhaustive) {
    return over_samples(g, TheoremId::PurePairProp, o, o.samples, [&](Sampler& s, long cnt, Partial& out) {
      for (long i = 0; i < cnt; ++i) {
        const Mask a = s.sized_subset(full);
        const Mask b = s.sized_subset(full);
        const Mask sum = kernel::sumset(g, a, b);
        if (sum == full) continue;
        ++out.instances;
        if (popcount(a) + popcount(b) > popcount(sum)) construct(a, b, sum, out);
      }
    });
  }
  if (n > 13) throw SizeError("pure-pair-prop marking table is limited to order 13");
  // Pure critical nontrivial superpairs, then every subpair within |H| - 1 removals.
  struct Super {
    Mask a, b;
    int h;
  };
  const long slices = 64;
  auto supers = detail::run_indexed<std::vector<Super>>(slices, worker_count(o), [&](long i, std::vector<Super>& out) {
    const Mask lo = 1 + full * static_cast<Mask>(i) / slices;
    const Mask hi = 1 + full * static_cast<Mask>(i + 1) / slices;
    for (Mask a = lo; a < hi; ++a) {
      for (Mask b = 1; b <= full; ++b) {
        const Mask s = kernel::sumset(g, a, b);
        if (s != full && popcount(a) + popcount(b) > popcount(s) && is_pure_pair(g, a, b, s)) {
          out.push_back({a, b, popcount(kernel::stabilizer(g, s))});
        }
        if (b == full) break;
      }
    }
  });
  BitTable marked(std::size_t{1} << (2 * n));
  for (const auto& slice : supers) {
    for (const Super& sp : slice) {
      const int budget = sp.h - 1;
      for_each_near_submask(sp.a, budget, [&](Mask a) {
        if (a == 0) return;
        const int left = budget - popcount(sp.a & ~a);
        for_each_near_submask(sp.b, left, [&](Mask b) {
          if (b) marked.set((static_cast<std::size_t>(a) << n) | b);
        });
      });
    }
  }
  return over_first_sets(g, worker_count(o), [&](Mask lo, Mask hi, Partial& out) {
    for (Mask a = lo; a < hi; ++a) {
      for (Mask b = 1; b <= full; ++b) {
        const Mask s = kernel::sumset(g, a, b);
        if (s != full) {
          ++out.instances;
          const bool critical = popcount(a) + popcount(b) > popcount(s);
          const bool has_super = marked.test((static_cast<std::size_t>(a) << n) | b);
          if (critical != has_super) {
            out.violate(pair_text(g, a, b) + (critical ? " critical without" : " not critical but has") +
                            " a close pure critical superpair",
                        pair_repro(g, "deficiency", a, b));
          } else if (critical) {
            construct(a, b, s, out);
          }
        }
        if (b == full) break;
      }
    }
  });
}

Partial check_maximal_trio_prop(const Group& g, const OracleOptions& o, bool exhaustive) {
  const Mask full = g.full();
  // For C != third(A,B) neither side can hold (maximality forces C = third(A,B)),
  // so each pair is decided at C = third(A,B); the rest are counted as instances.
  auto body = [&](Mask a, Mask b, Partial& out) {
    const Mask s = kernel::sumset(g, a, b);
    const Mask c = full & ~g.negate(s);
    if (c == 0) return;
    out.instances += (1L << popcount(c)) - 1;
    const bool lhs = is_pure_pair(g, a, b, s) && popcount(a) + popcount(b) > popcount(s);
    const Triple t{a, b, c};
    const bool rhs = kernel::third(g, full, a, c) == b && kernel::third(g, full, b, c) == a &&
                     popcount(a) + popcount(b) + popcount(c) > g.order();
    if (lhs != rhs) {
      out.violate(trio_text(g, t) + (lhs ? " pure critical pair but trio not maximal critical"
                                         : " maximal critical trio from a non-pure or non-critical pair"),
                  trio_repro(g, "trio", t));
    }
  };
  if (exhaustive) {
    return over_first_sets(g, worker_count(o), [&](Mask lo, Mask hi, Partial& out) {
      for (Mask a = lo; a < hi; ++a) {
        for (Mask b = 1; b <= full; ++b) {
          body(a, b, out);
          if (b == full) break;
        }
      }
    });
  }
  return over_samples(g, TheoremId::MaximalTrioProp, o, o.samples, [&](Sampler& s, long n, Partial& out) {
    for (long i = 0; i < n; ++i) body(s.sized_subset(full), s.sized_subset(full), out);
  });
}

Partial check_beat_stability(const Group& g, const OracleOptions& o, bool exhaustive) {
  const Mask full = g.full();
  return over_trios(g, TheoremId::BeatStability, o, exhaustive, [&](const Triple& t, Partial& out) {
    const bool hyp = kernel::closure_subgroup(g, t[0]) != full || kernel::closure_subgroup(g, t[1]) != full ||
                     kernel::closure_subgroup(g, t[2]) != full;
    if (!hyp) return;
    ++out.instances;
    if (match_structures(whole_trio(g, t), only(true, false, true, false, true)).empty()) {
      out.violate(trio_text(g, t) + " has a member in a proper coset but matches no beat",
                  trio_repro(g, "classify", t, " --all"));
    }
  });
}

Partial check_chord_stability(const Group& g, const OracleOptions& o, bool exhaustive) {
  const Mask full = g.full();
  const MaskPredicate near(g, o, exhaustive, is_proper_near_sequence);
  return over_trios(g, TheoremId::ChordStability, o, exhaustive, [&](const Triple& t, Partial& out) {
    for (Mask m : t) {
      if (kernel::closure_subgroup(g, m) != full) return;
    }
    if (!near(t[0]) && !near(t[1]) && !near(t[2])) return;
    ++out.instances;
    if (match_structures(whole_trio(g, t), only(false, true, false, true, true)).empty()) {
      out.violate(trio_text(g, t) + " has a proper near sequence member but matches no chord",
                  trio_repro(g, "classify", t, " --all"));
    }
  });
}

void check_pure_tags(const Group& g, const Triple& t, Partial& out) {
  const Trio trio = whole_trio(g, t);
  for (const StructureTag& tag : match_structures(trio, only(true, true, false, false, false))) {
    ++out.instances;
    const int delta = trio_deficiency(trio);
    std::string why;
    if (!is_maximal(trio)) {
      why = "not maximal";
    } else if (delta <= 0) {
      why = "not critical";
    } else if (delta != tag.subgroup.order()) {
      why = "deficiency " + std::to_string(delta) + " != |H| " + std::to_string(tag.subgroup.order());
    } else {
      why = check_tag(trio, tag);
    }
    if (!why.empty()) {
      out.violate(trio_text(g, t) + " " + std::string(to_string(tag.kind)) + " H=" +
                      set_text(g, tag.subgroup.bits()) + ": " + why,
                  trio_repro(g, "classify", t, " --all"));
    }
  }
}

Partial check_structural_soundness(const Group& g, const OracleOptions& o, bool exhaustive) {
  const Mask full = g.full();
  Partial all = over_trios(g, TheoremId::StructuralSoundness, o, exhaustive,
                           [&](const Triple& t, Partial& out) { check_pure_tags(g, t, out); });
  // Arbitrary nontrivial trios too: any pure match there must still be maximal critical.
  all.absorb(over_samples(g, TheoremId::StructuralSoundness, o, o.soundness_samples,
                          [&](Sampler& s, long n, Partial& out) {
    for (long i = 0; i < n; ++i) {
      const Mask a = s.sized_subset(full);
      const Mask b = s.sized_subset(full);
      const Mask cmax = kernel::third(g, full, a, b);
      if (cmax == 0) continue;
      check_pure_tags(g, {a, b, (i & 1) ? cmax : s.subset(cmax)}, out);
    }
  }));
  return all;
}

Partial check_near_sequence_lemma(const Group& g, const OracleOptions& o, bool exhaustive) {
  const MaskPredicate near(g, o, exhaustive, is_proper_near_sequence);
  return over_trios(g, TheoremId::NearSequenceLemma, o, exhaustive, [&](const Triple& t, Partial& out) {
    if (match_structures(whole_trio(g, t), only(false, true, false, true, true)).empty()) return;
    const int budget = popcount(t[0]) + popcount(t[1]) + popcount(t[2]) - g.order() - 1;
    for_each_near_submask(t[0], budget, [&](Mask a) {
      if (!a) return;
      const int left_a = budget - popcount(t[0] & ~a);
      for_each_near_submask(t[1], left_a, [&](Mask b) {
        if (!b) return;
        const int left_b = left_a - popcount(t[1] & ~b);
        for_each_near_submask(t[2], left_b, [&](Mask c) {
          if (!c) return;
          ++out.instances;
          for (int i = 0; i < 3; ++i) {
            const Mask m = i == 0 ? a : (i == 1 ? b : c);
            if (!near(m)) {
              const Triple sub{a, b, c};
              out.violate(trio_text(g, sub) + " inside chord " + trio_text(g, t) + ": member " +
                              set_text(g, m) + " is not a proper near sequence",
                          trio_repro(g, "trio", sub));
              return;
            }
          }
        });
      });
    });
  });
}

Partial check_sidon_claim(const Group& g, const OracleOptions& o, bool exhaustive) {
  const Mask full = g.full();
  const MaskPredicate near(g, o, exhaustive, is_near_sequence);
  return over_trios(g, TheoremId::SidonClaim, o, exhaustive, [&](const Triple& t, Partial& out) {
    std::array<Mask, 3> s = t;
    std::stable_sort(s.begin(), s.end(), [](Mask x, Mask y) { return popcount(x) < popcount(y); });
    if (popcount(s[0]) < 3) return;
    for (Mask m : s) {
      if (kernel::closure_subgroup(g, m) != full) return;
    }
    for (Mask m : s) {
      if (near(m)) return;
    }
    ++out.instances;
    if (is_sidon(GroupSet(g, s[1]))) {
      out.violate(trio_text(g, t) + " middle set " + set_text(g, s[1]) + " is a Sidon set",
                  trio_repro(g, "classify", t, " --all"));
    }
  });
}

Partial check_deficiency_one_claim(const Group& g, const OracleOptions& o, bool exhaustive) {
  const Mask full = g.full();
  std::vector<Subgroup> middle;
  for (const Subgroup& h : g.subgroups()) {
    if (h.order() > 1 && h.bits() != full) middle.push_back(h);
  }
  auto body = [&](Mask a, Mask d, Partial& out) {
    const Mask s = kernel::sumset(g, a, d);
    if (s == full) return;
    const int delta = popcount(a) + popcount(d) - popcount(s);
    if (delta <= 0) return;
    ++out.instances;
    if (delta != 1) {
      out.violate(pair_text(g, a, d) + " deficiency " + std::to_string(delta) + " != 1",
                  pair_repro(g, "deficiency", a, d));
    } else if (popcount(d) != 1 && kernel::closure_subgroup(g, d) != full) {
      out.violate(pair_text(g, a, d) + " B is neither a singleton nor generating",
                  pair_repro(g, "deficiency", a, d));
    }
  };
  auto hypothesis = [&](Mask a) {
    if (kernel::closure_subgroup(g, a) != full) return false;
    for (const Subgroup& h : middle) {
      if (popcount(a) + h.order() > popcount(kernel::sumset(g, a, h.bits()))) return false;
    }
    return true;
  };
  if (exhaustive) {
    return over_first_sets(g, worker_count(o), [&](Mask lo, Mask hi, Partial& out) {
      for (Mask a = lo; a < hi; ++a) {
        if (!hypothesis(a)) continue;
        for (Mask d = 1; d <= full; ++d) {
          body(a, d, out);
          if (d == full) break;
        }
      }
    });
  }
  return over_samples(g, TheoremId::DeficiencyOneClaim, o, o.samples, [&](Sampler& s, long n, Partial& out) {
    for (long i = 0; i < n; ++i) {
      const Mask a = s.sized_subset(full);
      if (hypothesis(a)) body(a, s.sized_subset(full), out);
    }
  });
}

struct IdName {
  TheoremId id;
  std::string_view name;
};

constexpr IdName kNames[] = {
    {TheoremId::CauchyDavenport, "cauchy-davenport"},
    {TheoremId::Kneser, "kneser"},
    {TheoremId::KneserV2, "kneser-v2"},
    {TheoremId::Vosper, "vosper"},
    {TheoremId::Kemperman, "kemperman"},
    {TheoremId::Mann, "mann"},
    {TheoremId::Purification, "purification"},
    {TheoremId::PurePairProp, "pure-pair-prop"},
    {TheoremId::MaximalTrioProp, "maximal-trio-prop"},
    {TheoremId::BeatStability, "beat-stability"},
    {TheoremId::ChordStability, "chord-stability"},
    {TheoremId::StructuralSoundness, "structural-soundness"},
    {TheoremId::NearSequenceLemma, "near-sequence-lemma"},
    {TheoremId::SidonClaim, "sidon-claim"},
    {TheoremId::DeficiencyOneClaim, "deficiency-one-claim"},
};

}  // namespace

void for_each_maximal_critical_trio(const Group& g, const std::function<void(const std::array<Mask, 3>&)>& visit) {
  if (g.order() > 20) throw SizeError("trio enumeration is limited to order 20");
  scan_trios(g, 1, g.full() + 1, visit);
}

std::vector<Trio> enumerate_maximal_critical_trios(const Group& g, bool dedup, const OracleOptions& o) {
  require_exhaustive(g, o.exhaustive_bound, "trio enumeration");
  const Mask full = g.full();
  const long slices = static_cast<long>(std::min<Mask>(full, 64));
  auto parts = detail::run_indexed<std::vector<Triple>>(slices, worker_count(o), [&](long i, std::vector<Triple>& out) {
    const Mask lo = 1 + full * static_cast<Mask>(i) / static_cast<Mask>(slices);
    const Mask hi = 1 + full * static_cast<Mask>(i + 1) / static_cast<Mask>(slices);
    scan_trios(g, lo, hi, [&](const Triple& t) {
      out.push_back(dedup ? canonical_form(whole_trio(g, t)).masks() : t);
    });
    if (dedup) {
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    }
  });
  std::vector<Triple> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  if (dedup) {
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
  }
  std::vector<Trio> out;
  out.reserve(all.size());
  for (const Triple& t : all) out.push_back(whole_trio(g, t));
  return out;
}

std::string_view to_string(TheoremId id) {
  for (const auto& n : kNames) {
    if (n.id == id) return n.name;
  }
  return "?";
}

TheoremId parse_theorem_id(std::string_view s) {
  for (const auto& n : kNames) {
    if (n.name == s) return n.id;
  }
  throw ParseError("unknown theorem id '" + std::string(s) + "'");
}

const std::vector<TheoremId>& all_theorem_ids() {
  static const std::vector<TheoremId> ids = [] {
    std::vector<TheoremId> v;
    for (const auto& n : kNames) v.push_back(n.id);
    return v;
  }();
  return ids;
}

TheoremReport check_theorem(const Group& g, TheoremId id, const OracleOptions& o) {
  if (g.order() < 2) throw ContractViolation("theorem checks need a nontrivial group");
  const auto start = std::chrono::steady_clock::now();
  const bool within = g.order() <= o.exhaustive_bound;
  bool exhaustive = within;
  Partial p;
  switch (id) {
    case TheoremId::CauchyDavenport:
      require_prime_cyclic(g, id);
      exhaustive = g.order() <= std::max(o.exhaustive_bound, o.prime_exhaustive_bound);
      p = check_cauchy_davenport(g, o, exhaustive);
      break;
    case TheoremId::Kneser:
      exhaustive = g.order() <= o.kneser_exhaustive_bound;
      p = check_kneser(g, o, exhaustive);
      break;
    case TheoremId::KneserV2: p = check_kneser_v2(g, o, exhaustive); break;
    case TheoremId::Vosper:
      require_prime_cyclic(g, id);
      exhaustive = g.order() <= std::max(o.exhaustive_bound, o.prime_exhaustive_bound);
      p = check_vosper(g, o, exhaustive);
      break;
    case TheoremId::Kemperman: p = check_kemperman(g, o, exhaustive); break;
    case TheoremId::Mann: p = check_mann(g, o, exhaustive); break;
    case TheoremId::Purification:
      exhaustive = false;
      p = check_purification(g, o);
      break;
    case TheoremId::PurePairProp:
      exhaustive = within && g.order() <= 13;
      p = check_pure_pair_prop(g, o, exhaustive);
      break;
    case TheoremId::MaximalTrioProp: p = check_maximal_trio_prop(g, o, exhaustive); break;
    case TheoremId::BeatStability: p = check_beat_stability(g, o, exhaustive); break;
    case TheoremId::ChordStability: p = check_chord_stability(g, o, exhaustive); break;
    case TheoremId::StructuralSoundness: p = check_structural_soundness(g, o, exhaustive); break;
    case TheoremId::NearSequenceLemma: p = check_near_sequence_lemma(g, o, exhaustive); break;
    case TheoremId::SidonClaim: p = check_sidon_claim(g, o, exhaustive); break;
    case TheoremId::DeficiencyOneClaim: p = check_deficiency_one_claim(g, o, exhaustive); break;
  }
  TheoremReport r;
  r.theorem = id;
  r.group = g.spec();
  r.mode = exhaustive ? "exhaustive" : "sampled";
  r.instances = p.instances;
  r.violation_count = p.violation_count;
  r.violations = std::move(p.violations);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::string render_report(const TheoremReport& r, bool json) {
  std::ostringstream os;
  const std::string theorem(to_string(r.theorem));
  for (const Violation& v : r.violations) {
    if (json) {
      nlohmann::ordered_json j;
      j["record"] = "violation";
      j["theorem"] = theorem;
      j["group"] = r.group;
      j["detail"] = v.detail;
      j["repro"] = v.repro;
      os << j.dump() << '\n';
    } else {
      os << "violation " << theorem << " " << r.group << ": " << v.detail << "\n  repro: " << v.repro << '\n';
    }
  }
  if (json) {
    nlohmann::ordered_json j;
    j["record"] = "summary";
    j["theorem"] = theorem;
    j["group"] = r.group;
    j["mode"] = r.mode;
    j["instances"] = r.instances;
    j["violations"] = r.violation_count;
    os << j.dump() << '\n';
  } else {
    os << theorem << " " << r.group << " " << r.mode << " instances: " << r.instances
       << " violations: " << r.violation_count << '\n';
  }
  return os.str();
}

AtlasRow atlas_row(const Group& g, const OracleOptions& o) {
  require_exhaustive(g, o.exhaustive_bound, "atlas");
  AtlasRow row;
  row.group = g.spec();
  const auto orbits = enumerate_maximal_critical_trios(g, true, o);
  row.orbits = static_cast<long>(orbits.size());
  struct Counts {
    std::array<long, 4> first{};
    std::array<long, 4> admits{};
    std::array<std::optional<Trio>, 4> rep;
  };
  auto parts = detail::run_indexed<Counts>(row.orbits, worker_count(o), [&](long i, Counts& c) {
    const Trio& t = orbits[static_cast<std::size_t>(i)];
    const int first = static_cast<int>(decompose(t).steps.front().tag.kind);
    c.first[first] = 1;
    c.rep[first] = t;
    for (int k = 0; k < 4; ++k) {
      if (!match_structures(t, only(k == 0, k == 1, k == 2, k == 3, true)).empty()) c.admits[k] = 1;
    }
  });
  for (auto& c : parts) {
    for (int k = 0; k < 4; ++k) {
      row.first_step[k] += c.first[k];
      row.admits[k] += c.admits[k];
      if (c.rep[k] && !row.representative[k]) row.representative[k] = c.rep[k];
    }
  }
  return row;
}

std::vector<AtlasRow> build_atlas(int max_order, const OracleOptions& o) {
  if (max_order > o.exhaustive_bound) {
    throw SizeError("atlas order " + std::to_string(max_order) + " exceeds the exhaustive bound " +
                    std::to_string(o.exhaustive_bound) + " (raise KK_MAX_EXHAUSTIVE to override)");
  }
  std::vector<AtlasRow> rows;
  for (const Group& g : abelian_groups_up_to(max_order)) rows.push_back(atlas_row(g, o));
  return rows;
}

std::string render_atlas(const std::vector<AtlasRow>& rows, bool json) {
  static constexpr StructureKind kinds[] = {StructureKind::PureBeat, StructureKind::PureChord,
                                            StructureKind::ImpureBeat, StructureKind::ImpureChord};
  std::ostringstream os;
  if (json) {
    for (const AtlasRow& r : rows) {
      nlohmann::ordered_json j;
      j["group"] = r.group;
      j["orbits"] = r.orbits;
      for (const char* block : {"first_step", "admits"}) {
        nlohmann::ordered_json counts;
        for (int k = 0; k < 4; ++k) {
          counts[std::string(to_string(kinds[k]))] =
              std::string(block) == "first_step" ? r.first_step[k] : r.admits[k];
        }
        j[block] = counts;
      }
      nlohmann::ordered_json reps;
      for (int k = 0; k < 4; ++k) {
        if (r.representative[k]) reps[std::string(to_string(kinds[k]))] = to_string(*r.representative[k]);
      }
      j["representatives"] = reps;
      os << j.dump() << '\n';
    }
    return os.str();
  }
  os << std::left << std::setw(14) << "group" << std::right << std::setw(8) << "orbits";
  for (auto k : kinds) os << std::setw(14) << to_string(k);
  os << "   admits:";
  for (auto k : kinds) os << std::setw(14) << to_string(k);
  os << '\n';
  for (const AtlasRow& r : rows) {
    os << std::left << std::setw(14) << r.group << std::right << std::setw(8) << r.orbits;
    for (long c : r.first_step) os << std::setw(14) << c;
    os << "          ";
    for (long c : r.admits) os << std::setw(14) << c;
    os << '\n';
  }
  return os.str();
}

}  // namespace kk
