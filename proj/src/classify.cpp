#include "kk/classify.hpp"

#include <algorithm>

#include "kk/setops.hpp"

namespace kk {

std::string_view to_string(StructureKind k) {
  switch (k) {
    case StructureKind::PureBeat: return "pure-beat";
    case StructureKind::PureChord: return "pure-chord";
    case StructureKind::ImpureBeat: return "impure-beat";
    case StructureKind::ImpureChord: return "impure-chord";
  }
  return "?";
}

StructureKind parse_structure_kind(std::string_view s) {
  for (auto k : {StructureKind::PureBeat, StructureKind::PureChord, StructureKind::ImpureBeat,
                 StructureKind::ImpureChord}) {
    if (to_string(k) == s) return k;
  }
  throw ParseError("unknown structure kind '" + std::string(s) + "'");
}

namespace {

struct Ctx {
  const Group& g;
  Mask u;
};

bool single_coset(const Group& g, Mask h, Mask s) {
  return s != 0 && (s & ~g.translate(h, lowest(s))) == 0;
}

bool nontrivial_run(const Ctx& c, Mask h, Element r, Mask s) {
  if (!kernel::is_stable(c.g, s, h)) return false;
  auto arc = kernel::coset_arc(c.g, c.u, h, r, s);
  return arc && arc->length >= 2;
}

bool basic_run(const Ctx& c, Mask h, Element r, Mask s) {
  const Mask with_h = s | h;
  if (!kernel::is_stable(c.g, with_h, h)) return false;
  auto arc = kernel::coset_arc(c.g, c.u, h, r, with_h);
  return arc && arc->head == 0 && arc->length >= 2;
}

// The four definitions, checked on already-normalized sets (x, y, z).
bool pure_beat(const Ctx& c, Mask h, Mask x, Mask y, Mask z) {
  return x == h && kernel::stabilizer(c.g, y) == h && z != 0 && z == kernel::third(c.g, c.u, x, y);
}

bool pure_chord(const Ctx& c, Mask h, Element r, Mask x, Mask y, Mask z) {
  return nontrivial_run(c, h, r, x) && nontrivial_run(c, h, r, y) &&
         z == kernel::third(c.g, c.u, x, y) && z != 0 && !single_coset(c.g, h, z);
}

bool impure_beat(const Ctx& c, Mask h, Mask x, Mask y, Mask z) {
  if (x == 0 || (x & ~h) || kernel::closure_subgroup(c.g, x) != h) return false;
  if (!kernel::is_stable(c.g, y & ~h, h)) return false;
  if ((z & ~h) != (kernel::third(c.g, c.u, x, y) & ~h)) return false;
  return (y & h) && (z & h);
}

bool impure_chord(const Ctx& c, Mask h, Element r, Mask x, Mask y, Mask z) {
  if (!basic_run(c, h, r, x) || !basic_run(c, h, r, y)) return false;
  const Mask outside = kernel::third(c.g, c.u, x, y) & ~h;
  if ((z & ~h) != outside || outside == 0) return false;
  return (x & h) && (y & h) && (z & h);
}

bool satisfies(const Ctx& c, StructureKind kind, Mask h, Element r, const std::array<Mask, 3>& s) {
  switch (kind) {
    case StructureKind::PureBeat: return pure_beat(c, h, s[0], s[1], s[2]);
    case StructureKind::PureChord: return pure_chord(c, h, r, s[0], s[1], s[2]);
    case StructureKind::ImpureBeat: return impure_beat(c, h, s[0], s[1], s[2]);
    case StructureKind::ImpureChord: return impure_chord(c, h, r, s[0], s[1], s[2]);
  }
  return false;
}

// Shifts -m for m the least member of each H-coset met by `s`, ascending.
std::vector<Element> coset_shifts(const Group& g, Mask h, Mask s) {
  std::vector<Element> out;
  Mask seen = 0;
  for_each_element(s, [&](Element x) {
    if ((seen >> x) & 1U) return;
    seen |= g.translate(h, x);
    out.push_back(g.neg(x));
  });
  return out;
}

}  // namespace

std::vector<StructureTag> match_structures(const Trio& t, const MatchOptions& opt) {
  if (!t.nontrivial()) throw ContractViolation("match_structures needs a nontrivial trio");
  const Group& g = t.group();
  const Ctx c{g, t.universe().bits()};

  std::vector<Subgroup> hs;
  for (const Subgroup& h : g.subgroups()) {
    if ((h.bits() & ~c.u) == 0 && h.bits() != c.u) hs.push_back(h);
  }
  std::vector<std::vector<Element>> gens(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) gens[i] = cyclic_generators(g, t.universe(), hs[i]);

  std::vector<StructureTag> out;
  const auto& perms = permutations();

  // Tries each candidate shift pair in order and records the first that works.
  auto attempt = [&](StructureKind kind, const Subgroup& h, std::optional<Element> r,
                     const std::array<int, 3>& p, const std::vector<Element>& xs,
                     const std::vector<Element>& ys) {
    for (Element x : xs) {
      const Mask nx = g.translate(t.bits(p[0]), x);
      for (Element y : ys) {
        const Element z = g.neg(g.add(x, y));
        const std::array<Mask, 3> s{nx, g.translate(t.bits(p[1]), y), g.translate(t.bits(p[2]), z)};
        if (satisfies(c, kind, h.bits(), r.value_or(0), s)) {
          out.push_back({kind, h, r, Similarity{p, {x, y, z}}});
          return true;
        }
      }
    }
    return false;
  };
  const std::vector<Element> zero{0};

  if (opt.pure_beats) {
    for (const Subgroup& h : hs) {
      for (const auto& p : perms) {
        const Mask x = t.bits(p[0]);
        if (popcount(x) != h.order()) continue;
        if (attempt(StructureKind::PureBeat, h, std::nullopt, p, {g.neg(lowest(x))}, zero) &&
            opt.first_only) {
          return out;
        }
      }
    }
  }
  if (opt.pure_chords) {
    for (std::size_t i = 0; i < hs.size(); ++i) {
      for (Element r : gens[i]) {
        for (const auto& p : perms) {
          if (attempt(StructureKind::PureChord, hs[i], r, p, zero, zero) && opt.first_only) return out;
        }
      }
    }
  }
  if (opt.impure_beats) {
    for (const Subgroup& h : hs) {
      for (const auto& p : perms) {
        const Mask x = t.bits(p[0]);
        if (kernel::closure_subgroup(g, x) != h.bits()) continue;
        if (attempt(StructureKind::ImpureBeat, h, std::nullopt, p, {g.neg(lowest(x))},
                    coset_shifts(g, h.bits(), t.bits(p[1]))) &&
            opt.first_only) {
          return out;
        }
      }
    }
  }
  if (opt.impure_chords) {
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const Mask h = hs[i].bits();
      for (Element r : gens[i]) {
        for (const auto& p : perms) {
          if (attempt(StructureKind::ImpureChord, hs[i], r, p, coset_shifts(g, h, t.bits(p[0])),
                      coset_shifts(g, h, t.bits(p[1]))) &&
              opt.first_only) {
            return out;
          }
        }
      }
    }
  }
  return out;
}

std::optional<StructureTag> find_structure(const Trio& t) {
  auto tags = match_structures(t, MatchOptions{.first_only = true});
  if (tags.empty()) return std::nullopt;
  return tags.front();
}

Trio continuation(const Trio& t, const StructureTag& tag) {
  if (is_pure(tag.kind)) throw ContractViolation("pure structures have no continuation");
  const Group& g = t.group();
  const Ctx c{g, t.universe().bits()};
  const Mask h = tag.subgroup.bits();
  if (!g.is_subgroup(h) || (h & ~c.u) || h == c.u || !is_valid(tag.similarity, g, t.universe())) {
    throw ContractViolation("structure tag does not fit the trio");
  }
  if (tag.kind == StructureKind::ImpureChord) {
    const auto gens = cyclic_generators(g, t.universe(), tag.subgroup);
    if (!tag.generator || std::find(gens.begin(), gens.end(), *tag.generator) == gens.end()) {
      throw ContractViolation("chord tag carries no valid generator");
    }
  }
  const Trio n = apply_similarity(t, tag.similarity);
  if (!satisfies(c, tag.kind, h, tag.generator.value_or(0), n.masks())) {
    throw ContractViolation("trio does not satisfy its structure tag");
  }
  const Mask a = tag.kind == StructureKind::ImpureBeat ? n.bits(0) : (n.bits(0) & h);
  return Trio::unchecked(g, tag.subgroup, {a, n.bits(1) & h, n.bits(2) & h});
}

namespace {

void check_decomposable(const Trio& t) {
  if (!t.nontrivial()) throw DecomposeError(DecomposeFailure::Trivial, "trio is trivial: " + to_string(t));
  if (!is_critical(t)) throw DecomposeError(DecomposeFailure::NotCritical, "trio is not critical: " + to_string(t));
  if (!is_maximal(t)) throw DecomposeError(DecomposeFailure::NotMaximal, "trio is not maximal: " + to_string(t));
}

}  // namespace

Certificate decompose(const Trio& t) {
  check_decomposable(t);
  Certificate cert;
  Trio cur = t;
  for (;;) {
    auto tag = find_structure(cur);
    if (!tag) {
      throw NoStructureFound(cur, "no beat or chord structure for maximal critical trio " +
                                      to_string(cur) + " in " + cur.group().spec() + " universe " +
                                      to_string(cur.group(), cur.universe().bits()));
    }
    cert.steps.push_back({cur, *tag});
    if (is_pure(tag->kind)) break;
    cur = continuation(cur, *tag);
  }
  return cert;
}

std::vector<std::vector<StructureTag>> decompose_all_tags(const Trio& t) {
  std::vector<std::vector<StructureTag>> out;
  for (const CertificateStep& step : decompose(t).steps) out.push_back(match_structures(step.trio));
  return out;
}

}  // namespace kk
