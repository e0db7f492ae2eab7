#include "kk/verify.hpp"

#include "kk/setops.hpp"

namespace kk {

namespace {

// U \ -(A+B)
GroupSet completion(const GroupSet& universe, const GroupSet& a, const GroupSet& b) {
  return universe - sumset(a, b).negated();
}

bool h_stable(const GroupSet& s, const GroupSet& h) { return sumset(s, h) == s; }

std::string check_sequence_pair(const GroupSet& a, const GroupSet& b, const Subgroup& h, Element r,
                                const Subgroup& universe, bool basic) {
  try {
    for (const GroupSet& s : {a, b}) {
      const auto p = sequence_profile(s, h, r, universe);
      if (!p.is_sequence || !p.is_nontrivial) return "member is not a nontrivial R-sequence";
      if (basic && !p.is_basic) return "member sequence is not basic";
    }
  } catch (const ContractViolation& e) {
    return e.what();
  }
  return {};
}

}  // namespace

std::string check_tag(const Trio& t, const StructureTag& tag) {
  const Group& g = t.group();
  const Subgroup& u = t.universe();
  if (!g.is_subgroup(tag.subgroup.bits())) return "H is not a subgroup";
  if ((tag.subgroup.bits() & ~u.bits()) || tag.subgroup.bits() == u.bits()) {
    return "H is not a proper subgroup of the universe";
  }
  if (!is_valid(tag.similarity, g, u)) return "invalid similarity";
  if (is_chord(tag.kind) != tag.generator.has_value()) return "generator present iff chord";

  const Trio n = apply_similarity(t, tag.similarity);
  const GroupSet a = n.a(), b = n.b(), c = n.c();
  const GroupSet hs = GroupSet::from(g, tag.subgroup);
  const GroupSet us = GroupSet::from(g, u);
  const GroupSet third = completion(us, a, b);

  switch (tag.kind) {
    case StructureKind::PureBeat:
      if (!(a == hs)) return "A != H";
      if (!(stabilizer(b) == tag.subgroup)) return "stabilizer of B != H";
      if (!(c == third) || c.empty()) return "C is not the nonempty completion of A+B";
      return {};
    case StructureKind::PureChord: {
      if (auto why = check_sequence_pair(a, b, tag.subgroup, *tag.generator, u, false); !why.empty()) {
        return why;
      }
      if (!(c == third) || c.empty()) return "C is not the nonempty completion of A+B";
      if ((closure_coset(c).subgroup.bits() & ~tag.subgroup.bits()) == 0) {
        return "C lies in a single H-coset";
      }
      return {};
    }
    case StructureKind::ImpureBeat: {
      if (a.empty()) return "A is empty";
      const Closure cl = closure_coset(a);
      if (!(cl.subgroup == tag.subgroup) || cl.representative != 0) return "[A] != H";
      if (!h_stable(b - hs, hs)) return "B \\ H is not H-stable";
      if (!(c - hs == third - hs)) return "C \\ H differs from the completion";
      if ((b & hs).empty() || (c & hs).empty()) return "B or C misses H";
      return {};
    }
    case StructureKind::ImpureChord: {
      if (auto why = check_sequence_pair(a | hs, b | hs, tag.subgroup, *tag.generator, u, true);
          !why.empty()) {
        return why;
      }
      if (!(c - hs == third - hs) || (c - hs).empty()) return "C \\ H is not the nonempty completion";
      if ((a & hs).empty() || (b & hs).empty() || (c & hs).empty()) return "A, B or C misses H";
      return {};
    }
  }
  return "unknown kind";
}

Verdict verify_certificate(const Certificate& cert) {
  auto fail = [](int step, std::string why) { return Verdict{false, step, std::move(why)}; };
  if (cert.steps.empty()) return fail(-1, "empty certificate");

  const Trio& first = cert.steps.front().trio;
  const Group& g = first.group();
  if (!g.is_subgroup(first.universe().bits()) || !is_trio(g, first.universe().bits(), first.masks())) {
    return fail(0, "first step is not a trio");
  }
  if (!first.nontrivial()) return fail(0, "first trio is trivial");
  if (!is_maximal(first)) return fail(0, "first trio is not maximal");
  if (!is_critical(first)) return fail(0, "first trio is not critical");
  const int delta = trio_deficiency(first);

  for (std::size_t i = 0; i < cert.steps.size(); ++i) {
    const int si = static_cast<int>(i);
    const Trio& t = cert.steps[i].trio;
    if (!(t.group() == g)) return fail(si, "group changes along the chain");
    const Mask u = t.universe().bits();
    if (!g.is_subgroup(u)) return fail(si, "universe is not a subgroup");
    if (i > 0) {
      const Mask prev = cert.steps[i - 1].trio.universe().bits();
      if ((u & ~prev) || u == prev) return fail(si, "chain not strictly descending");
    }
    if (!is_trio(g, u, t.masks())) return fail(si, "sets do not form a trio in the universe");
    if (!t.nontrivial()) return fail(si, "trio is trivial");
    if (trio_deficiency(t) != delta) return fail(si, "deficiency not preserved");
  }

  for (std::size_t i = 0; i < cert.steps.size(); ++i) {
    const int si = static_cast<int>(i);
    const CertificateStep& step = cert.steps[i];
    const Trio& t = step.trio;
    if (auto why = check_tag(t, step.tag); !why.empty()) {
      return fail(si, std::string(to_string(step.tag.kind)) + ": " + why);
    }

    const bool last = i + 1 == cert.steps.size();
    if (is_pure(step.tag.kind)) {
      if (!last) return fail(si, "pure step is not final");
      continue;
    }
    if (last) return fail(si, "final step not pure");

    const Trio n = apply_similarity(t, step.tag.similarity);
    const Mask h = step.tag.subgroup.bits();
    const Mask a = step.tag.kind == StructureKind::ImpureBeat ? n.bits(0) : (n.bits(0) & h);
    const Trio& next = cert.steps[i + 1].trio;
    if (next.universe().bits() != h) return fail(si, "next universe is not H");
    if (next.masks() != std::array<Mask, 3>{a, n.bits(1) & h, n.bits(2) & h}) {
      return fail(si, "next trio is not the continuation");
    }
  }
  return {};
}

}  // namespace kk
