#include "kk/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kk/certify.hpp"
#include "kk/classify.hpp"
#include "kk/literal.hpp"
#include "kk/oracle.hpp"
#include "kk/setops.hpp"
#include "kk/verify.hpp"

namespace kk {

namespace {

using nlohmann::ordered_json;

struct Flags {
  std::string group;
  bool json = false;
  std::uint64_t seed = 1;
  int workers = 0;
  int max_order = 0;
  bool all = false;
  bool dedup = false;
  std::string universe;
  std::string report = "kk-check-report.txt";
  std::string out_dir = "atlas";
  std::vector<std::string> args;
};

// `@path` stands for the contents of the file, surrounding whitespace removed.
std::string expand(const std::string& arg) {
  if (arg.empty() || arg[0] != '@') return arg;
  std::ifstream in(arg.substr(1), std::ios::binary);
  if (!in) throw Error("cannot read " + arg.substr(1));
  std::stringstream buf;
  buf << in.rdbuf();
  std::string s = buf.str();
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

Group need_group(const Flags& f) {
  if (f.group.empty()) throw ParseError("this command needs -g/--group");
  return Group::parse(f.group);
}

Subgroup universe_of(const Group& g, const Flags& f) {
  if (f.universe.empty()) return g.whole();
  return g.subgroup(parse_set(g, expand(f.universe)).bits());
}

void expect_args(const Flags& f, std::size_t lo, std::size_t hi) {
  if (f.args.size() < lo || f.args.size() > hi) {
    throw ParseError("expected " + (lo == hi ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi)) +
                     " arguments, got " + std::to_string(f.args.size()));
  }
}

std::vector<Element> elems(Mask m) {
  std::vector<Element> out;
  for_each_element(m, [&](Element x) { out.push_back(x); });
  return out;
}

Trio parse_trio(const Group& g, const Subgroup& u, const std::string& text) {
  auto s = parse_trio_sets(g, expand(text));
  return Trio(u, s[0], s[1], s[2]);
}

ordered_json trio_json(const Trio& t) {
  ordered_json j;
  j["A"] = elems(t.bits(0));
  j["B"] = elems(t.bits(1));
  j["C"] = elems(t.bits(2));
  j["universe"] = elems(t.universe().bits());
  return j;
}

std::string tag_text(const Group& g, const StructureTag& tag) {
  std::ostringstream os;
  os << to_string(tag.kind) << " H=" << to_string(g, tag.subgroup.bits());
  if (tag.generator) os << " R=" << *tag.generator;
  const auto& s = tag.similarity;
  os << " perm=[" << s.perm[0] << "," << s.perm[1] << "," << s.perm[2] << "] shift=[" << s.shift[0] << ","
     << s.shift[1] << "," << s.shift[2] << "]";
  return os.str();
}

ordered_json tag_json(const StructureTag& tag) {
  ordered_json j;
  j["kind"] = std::string(to_string(tag.kind));
  j["H"] = elems(tag.subgroup.bits());
  if (tag.generator) j["R"] = *tag.generator;
  j["perm"] = tag.similarity.perm;
  j["shift"] = tag.similarity.shift;
  return j;
}

OracleOptions oracle_options(const Flags& f) {
  OracleOptions o = OracleOptions::from_env();
  o.seed = f.seed;
  o.workers = f.workers;
  return o;
}

int cmd_sumset(const Flags& f, std::ostream& out) {
  expect_args(f, 2, 2);
  const Group g = need_group(f);
  const GroupSet s = sumset(parse_set(g, expand(f.args[0])), parse_set(g, expand(f.args[1])));
  if (f.json) {
    out << ordered_json{{"sumset", s.elements()}}.dump() << '\n';
  } else {
    out << to_string(s) << '\n';
  }
  return kExitOk;
}

int cmd_stab(const Flags& f, std::ostream& out) {
  expect_args(f, 1, 1);
  const Group g = need_group(f);
  const Subgroup h = stabilizer(parse_set(g, expand(f.args[0])));
  if (f.json) {
    out << ordered_json{{"stabilizer", elems(h.bits())}, {"order", h.order()}}.dump() << '\n';
  } else {
    out << to_string(g, h.bits()) << '\n';
  }
  return kExitOk;
}

int cmd_closure(const Flags& f, std::ostream& out) {
  expect_args(f, 1, 1);
  const Group g = need_group(f);
  const Closure c = closure_coset(parse_set(g, expand(f.args[0])));
  if (f.json) {
    out << ordered_json{{"representative", c.representative}, {"subgroup", elems(c.subgroup.bits())}}.dump()
        << '\n';
  } else {
    out << c.representative << "+" << to_string(g, c.subgroup.bits()) << '\n';
  }
  return kExitOk;
}

int cmd_deficiency(const Flags& f, std::ostream& out) {
  expect_args(f, 1, 2);
  const Group g = need_group(f);
  const GroupSet a = parse_set(g, expand(f.args[0]));
  if (f.args.size() == 2) {
    const GroupSet b = parse_set(g, expand(f.args[1]));
    const int d = deficiency(a, b);
    const int gap = kneser_gap(a, b);
    if (f.json) {
      out << ordered_json{{"deficiency", d}, {"critical", d > 0}, {"kneser_gap", gap}}.dump() << '\n';
    } else {
      out << "deficiency " << d << (d > 0 ? " critical" : "") << " kneser-gap " << gap << '\n';
    }
    return kExitOk;
  }
  const SetDeficiency d = deficiency_set(a);
  if (f.json) {
    out << ordered_json{{"deficiency", d.value}, {"witness", elems(d.witness.bits())}}.dump() << '\n';
  } else {
    out << "deficiency " << d.value << " witness " << to_string(g, d.witness.bits()) << '\n';
  }
  return kExitOk;
}

int cmd_trio(const Flags& f, std::ostream& out) {
  expect_args(f, 1, 1);
  const Group g = need_group(f);
  const Subgroup u = universe_of(g, f);
  const std::string text = expand(f.args[0]);
  const Trio t = std::count(text.begin(), text.end(), ';') == 1
                     ? make_trio(u, parse_set(g, text.substr(0, text.find(';'))),
                                 parse_set(g, text.substr(text.find(';') + 1)))
                     : parse_trio(g, u, text);
  const int d = trio_deficiency(t);
  if (f.json) {
    ordered_json j = trio_json(t);
    j["deficiency"] = d;
    j["critical"] = d > 0;
    j["maximal"] = is_maximal(t);
    j["nontrivial"] = t.nontrivial();
    out << j.dump() << '\n';
  } else {
    out << to_string(t) << "\ndeficiency " << d << (d > 0 ? " critical" : "") << (is_maximal(t) ? " maximal" : "")
        << (t.nontrivial() ? "" : " trivial") << '\n';
  }
  return kExitOk;
}

int cmd_saturate(const Flags& f, std::ostream& out) {
  expect_args(f, 1, 1);
  const Group g = need_group(f);
  const Trio t = parse_trio(g, universe_of(g, f), f.args[0]);
  const std::vector<Trio> sats = f.all ? all_saturations(t) : std::vector<Trio>{saturate(t)};
  for (const Trio& s : sats) {
    if (f.json) {
      ordered_json j = trio_json(s);
      j["deficiency"] = trio_deficiency(s);
      out << j.dump() << '\n';
    } else {
      out << to_string(s) << " deficiency " << trio_deficiency(s) << '\n';
    }
  }
  return kExitOk;
}

int cmd_classify(const Flags& f, std::ostream& out) {
  expect_args(f, 1, 1);
  const Group g = need_group(f);
  const Trio t = parse_trio(g, universe_of(g, f), f.args[0]);
  std::vector<StructureTag> tags;
  if (f.all) {
    tags = match_structures(t);
  } else if (auto tag = find_structure(t)) {
    tags.push_back(*tag);
  }
  if (f.json) {
    ordered_json arr = ordered_json::array();
    for (const auto& tag : tags) arr.push_back(tag_json(tag));
    out << ordered_json{{"tags", arr}}.dump() << '\n';
  } else if (tags.empty()) {
    out << "no structure\n";
  } else {
    for (const auto& tag : tags) out << tag_text(g, tag) << '\n';
  }
  return kExitOk;
}

int cmd_decompose(const Flags& f, std::ostream& out) {
  expect_args(f, 1, 1);
  const Group g = need_group(f);
  const Trio t = parse_trio(g, universe_of(g, f), f.args[0]);
  const Certificate cert = decompose(t);
  out << render(cert, default_provenance(f.seed));
  if (f.all) {
    for (std::size_t i = 0; i < cert.steps.size(); ++i) {
      for (const StructureTag& tag : match_structures(cert.steps[i].trio)) {
        if (f.json) {
          ordered_json j = tag_json(tag);
          j["step"] = i;
          out << j.dump() << '\n';
        } else {
          out << "step " << i << ": " << tag_text(g, tag) << '\n';
        }
      }
    }
  }
  return kExitOk;
}

int cmd_verify(const Flags& f, std::ostream& out) {
  if (f.args.empty()) throw ParseError("verify needs certificate files or directories");
  bool all_ok = true;
  for (const std::string& path : f.args) {
    if (std::filesystem::is_directory(path)) {
      const BatchSummary s = batch_verify(path, f.workers);
      out << render_summary(s);
      all_ok = all_ok && s.failed.empty() && s.unreadable.empty();
      continue;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    const Verdict v = verify_certificate(parse_certificate(buf.str()));
    if (v.ok) {
      out << "OK " << path << '\n';
    } else {
      out << "FAILED " << path << ": step " << v.step << ": " << v.failure << '\n';
      all_ok = false;
    }
  }
  return all_ok ? kExitOk : kExitError;
}

int cmd_enumerate(const Flags& f, std::ostream& out) {
  expect_args(f, 0, 0);
  const Group g = need_group(f);
  for (const Trio& t : enumerate_maximal_critical_trios(g, f.dedup, oracle_options(f))) {
    if (f.json) {
      ordered_json j = trio_json(t);
      j["deficiency"] = trio_deficiency(t);
      out << j.dump() << '\n';
    } else {
      out << to_string(t) << '\n';
    }
  }
  return kExitOk;
}

bool applies(TheoremId id, const Group& g) {
  if (id != TheoremId::CauchyDavenport && id != TheoremId::Vosper) return true;
  if (!g.is_cyclic()) return false;
  for (int d = 2; d * d <= g.order(); ++d) {
    if (g.order() % d == 0) return false;
  }
  return true;
}

int cmd_check(const Flags& f, std::ostream& out, std::ostream& err) {
  if (f.args.empty()) throw ParseError("check needs a theorem id or 'all'");
  const OracleOptions o = oracle_options(f);
  std::vector<Group> groups;
  if (!f.group.empty()) {
    groups.push_back(need_group(f));
  } else if (f.max_order > 0) {
    groups = abelian_groups_up_to(f.max_order);
  } else {
    throw ParseError("check needs -g/--group or --max-order");
  }
  const bool every = f.args.size() == 1 && f.args[0] == "all";
  std::vector<TheoremId> ids;
  if (every) {
    ids = all_theorem_ids();
  } else {
    for (const auto& a : f.args) ids.push_back(parse_theorem_id(a));
  }
  std::string report;
  long violations = 0;
  for (const Group& g : groups) {
    for (TheoremId id : ids) {
      // With -g an explicit id must fit the group; sweeps skip ids that cannot apply.
      if ((every || f.group.empty()) && !applies(id, g)) continue;
      const TheoremReport r = check_theorem(g, id, o);
      const std::string text = render_report(r, f.json);
      out << text;
      report += text;
      violations += r.violation_count;
    }
  }
  if (violations > 0) {
    std::ofstream rep(f.report, std::ios::binary);
    rep << report;
    err << "theorem violations found; report: " << f.report << '\n';
    return kExitViolation;
  }
  return kExitOk;
}

std::string file_stem(const std::string& group, StructureKind k) {
  return group + "-" + std::string(to_string(k));
}

int cmd_atlas(const Flags& f, std::ostream& out) {
  expect_args(f, 0, 0);
  if (f.max_order < 2) throw ParseError("atlas needs --max-order >= 2");
  namespace fs = std::filesystem;
  const OracleOptions o = oracle_options(f);
  const auto rows = build_atlas(f.max_order, o);
  // Certificates get their own directory so `kk verify <out>/certificates` sees nothing else.
  const fs::path cert_dir = fs::path(f.out_dir) / "certificates";
  std::error_code ec;
  fs::create_directories(cert_dir, ec);
  if (ec) throw Error("cannot create " + cert_dir.string() + ": " + ec.message());
  const std::string table = render_atlas(rows, f.json);
  const fs::path table_path = fs::path(f.out_dir) / (f.json ? "atlas.jsonl" : "atlas.txt");
  std::ofstream t(table_path, std::ios::binary);
  t << table;
  if (!t) throw Error("cannot write " + table_path.string());
  for (const AtlasRow& row : rows) {
    for (int k = 0; k < 4; ++k) {
      if (!row.representative[k]) continue;
      const fs::path p = cert_dir / (file_stem(row.group, static_cast<StructureKind>(k)) + ".cert.json");
      std::ofstream c(p, std::ios::binary);
      c << render(decompose(*row.representative[k]), default_provenance(f.seed));
      if (!c) throw Error("cannot write " + p.string());
    }
  }
  out << table;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Critical pairs and trios in finite abelian groups", "kk"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* c, bool group = true) {
    if (group) c->add_option("-g,--group", f.group, "group spec, e.g. Z2xZ4");
    c->add_flag("--json", f.json, "machine-readable output");
    c->add_option("--workers", f.workers, "worker threads (default: all cores)");
    c->add_option("--seed", f.seed, "seed for sampled checks");
  };
  struct Verb {
    const char* name;
    const char* help;
  };
  const Verb verbs[] = {
      {"sumset", "A+B"},
      {"stab", "stabilizer of A"},
      {"closure", "smallest coset containing A"},
      {"deficiency", "pair deficiency of A,B or set deficiency of A"},
      {"trio", "inspect A;B;C, or complete A;B to a trio"},
      {"saturate", "maximal supertrio of A;B;C"},
      {"classify", "structure tags of A;B;C"},
      {"decompose", "certificate document for a maximal critical trio"},
      {"verify", "re-check certificate files or directories"},
      {"enumerate", "all nontrivial maximal critical trios"},
      {"check", "check a theorem over one group or all groups up to --max-order"},
      {"atlas", "structure counts and representative certificates"},
  };
  for (const Verb& v : verbs) {
    CLI::App* c = app.add_subcommand(v.name, v.help);
    common(c, std::string(v.name) != "verify");
    c->add_option("args", f.args, "set literals, ids or paths (@file reads a file)");
    const std::string name = v.name;
    if (name == "trio" || name == "saturate" || name == "classify" || name == "decompose") {
      c->add_option("--universe", f.universe, "universe subgroup as a set literal");
    }
    if (name == "saturate" || name == "classify" || name == "decompose") {
      c->add_flag("--all", f.all, "every saturation or tag");
    }
    if (name == "enumerate") c->add_flag("--dedup", f.dedup, "one canonical trio per similarity orbit");
    if (name == "check" || name == "atlas") c->add_option("--max-order", f.max_order, "largest group order");
    if (name == "check") c->add_option("--report", f.report, "where to write the report on violations");
    if (name == "atlas") c->add_option("-o,--out", f.out_dir, "output directory");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }

  const std::string verb = app.get_subcommands().front()->get_name();
  try {
    if (verb == "sumset") return cmd_sumset(f, out);
    if (verb == "stab") return cmd_stab(f, out);
    if (verb == "closure") return cmd_closure(f, out);
    if (verb == "deficiency") return cmd_deficiency(f, out);
    if (verb == "trio") return cmd_trio(f, out);
    if (verb == "saturate") return cmd_saturate(f, out);
    if (verb == "classify") return cmd_classify(f, out);
    if (verb == "decompose") return cmd_decompose(f, out);
    if (verb == "verify") return cmd_verify(f, out);
    if (verb == "enumerate") return cmd_enumerate(f, out);
    if (verb == "check") return cmd_check(f, out, err);
    if (verb == "atlas") return cmd_atlas(f, out);
  } catch (const NoStructureFound& e) {
    err << "theorem violation: " << e.what() << '\n';
    return kExitViolation;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  err << "error: unknown command " << verb << '\n';
  return kExitError;
}

}  // namespace kk
