#include "kk/certify.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kk/verify.hpp"
#include "parallel.hpp"

namespace kk {

using nlohmann::json;

Provenance default_provenance(std::uint64_t seed) {
  Provenance p;
  p.seed = seed;
  if (const char* v = std::getenv("SOURCE_DATE_EPOCH"); v && *v) p.timestamp = v;
  return p;
}

namespace {

std::string list(Mask m) {
  std::string out = "[";
  bool first = true;
  for_each_element(m, [&](Element x) {
    if (!first) out += ",";
    out += std::to_string(x);
    first = false;
  });
  return out + "]";
}

template <class T>
std::string list3(const std::array<T, 3>& xs) {
  return "[" + std::to_string(xs[0]) + "," + std::to_string(xs[1]) + "," + std::to_string(xs[2]) + "]";
}

std::string step_line(const CertificateStep& s) {
  // Keys in byte order: A B C H R kind perm shift universe.
  std::string out = "{\"A\":" + list(s.trio.bits(0)) + ",\"B\":" + list(s.trio.bits(1)) +
                    ",\"C\":" + list(s.trio.bits(2)) + ",\"H\":" + list(s.tag.subgroup.bits());
  if (s.tag.generator) out += ",\"R\":" + std::to_string(*s.tag.generator);
  out += ",\"kind\":" + json(std::string(to_string(s.tag.kind))).dump();
  out += ",\"perm\":" + list3(s.tag.similarity.perm);
  out += ",\"shift\":" + list3(s.tag.similarity.shift);
  out += ",\"universe\":" + list(s.trio.universe().bits()) + "}";
  return out;
}

[[noreturn]] void malformed(const std::string& what) { throw MalformedError("malformed certificate: " + what); }

const json& field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) malformed(std::string("missing field '") + key + "'");
  return *it;
}

void only_keys(const json& obj, std::initializer_list<const char*> keys, const char* where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }) == keys.end()) {
      malformed(std::string("unexpected field '") + it.key() + "' in " + where);
    }
  }
}

std::int64_t integer(const json& v, const char* what) {
  if (!v.is_number_integer()) malformed(std::string(what) + " must be an integer");
  return v.get<std::int64_t>();
}

Element element(const json& v, const Group& g, const char* what) {
  const std::int64_t x = integer(v, what);
  if (x < 0 || x >= g.order()) {
    throw RangeError(std::string(what) + " " + std::to_string(x) + " is outside " + g.spec());
  }
  return static_cast<Element>(x);
}

Mask element_list(const json& v, const Group& g, const char* what) {
  if (!v.is_array()) malformed(std::string(what) + " must be an element list");
  Mask m = 0;
  std::int64_t prev = -1;
  for (const json& e : v) {
    const Element x = element(e, g, what);
    if (static_cast<std::int64_t>(x) <= prev) malformed(std::string(what) + " is not strictly ascending");
    prev = x;
    m |= Mask{1} << x;
  }
  return m;
}

CertificateStep parse_step(const json& s, const Group& g) {
  if (!s.is_object()) malformed("step must be an object");
  only_keys(s, {"A", "B", "C", "H", "R", "kind", "perm", "shift", "universe"}, "step");
  const Mask a = element_list(field(s, "A"), g, "A");
  const Mask b = element_list(field(s, "B"), g, "B");
  const Mask c = element_list(field(s, "C"), g, "C");
  const Subgroup h = Subgroup::unchecked(element_list(field(s, "H"), g, "H"));
  const Subgroup u = Subgroup::unchecked(element_list(field(s, "universe"), g, "universe"));
  const json& kind = field(s, "kind");
  if (!kind.is_string()) malformed("kind must be a string");
  StructureKind k;
  try {
    k = parse_structure_kind(kind.get<std::string>());
  } catch (const ParseError& e) {
    malformed(e.what());
  }
  std::optional<Element> r;
  if (s.contains("R")) r = element(s["R"], g, "R");
  if (is_chord(k) && !r) malformed("chord step without R");
  if (!is_chord(k) && r) malformed("beat step with R");
  const json& perm = field(s, "perm");
  const json& shift = field(s, "shift");
  if (!perm.is_array() || perm.size() != 3) malformed("perm must list three entries");
  if (!shift.is_array() || shift.size() != 3) malformed("shift must list three elements");
  Similarity sim;
  for (int i = 0; i < 3; ++i) {
    const std::int64_t p = integer(perm[i], "perm");
    if (p < 0 || p > 2) throw RangeError("perm entry " + std::to_string(p) + " is outside 0..2");
    sim.perm[i] = static_cast<int>(p);
    sim.shift[i] = element(shift[i], g, "shift");
  }
  return {Trio::unchecked(g, u, {a, b, c}), StructureTag{k, h, r, sim}};
}

}  // namespace

std::string render(const Certificate& c, const Provenance& p) {
  if (c.steps.empty()) throw ContractViolation("cannot render an empty certificate");
  const Group& g = c.steps.front().trio.group();
  std::ostringstream os;
  os << "{\n";
  os << "  \"group\": " << json(g.spec()).dump() << ",\n";
  os << "  \"provenance\": {\"seed\":" << p.seed << ",\"timestamp\":" << json(p.timestamp).dump()
     << ",\"tool\":" << json(p.tool).dump() << ",\"version\":" << json(p.version).dump() << "},\n";
  os << "  \"schema\": " << kSchemaVersion << ",\n";
  os << "  \"steps\": [\n";
  for (std::size_t i = 0; i < c.steps.size(); ++i) {
    os << "    " << step_line(c.steps[i]) << (i + 1 < c.steps.size() ? ",\n" : "\n");
  }
  os << "  ]\n}\n";
  return os.str();
}

CertificateDocument parse_document(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    malformed(std::string("not JSON: ") + e.what());
  }
  if (!doc.is_object()) malformed("document must be an object");
  if (!doc.contains("schema")) throw SchemaError("certificate has no schema version");
  if (!doc["schema"].is_number_integer() || doc["schema"].get<std::int64_t>() != kSchemaVersion) {
    throw SchemaError("unsupported certificate schema " + doc["schema"].dump() + " (expected " +
                      std::to_string(kSchemaVersion) + ")");
  }
  only_keys(doc, {"group", "provenance", "schema", "steps"}, "document");
  const json& spec = field(doc, "group");
  if (!spec.is_string()) malformed("group must be a string");
  Group g;
  try {
    g = Group::parse(spec.get<std::string>());
  } catch (const ParseError& e) {
    malformed(e.what());
  } catch (const Error& e) {
    malformed(e.what());
  }
  CertificateDocument out;
  const json& prov = field(doc, "provenance");
  if (!prov.is_object()) malformed("provenance must be an object");
  only_keys(prov, {"seed", "timestamp", "tool", "version"}, "provenance");
  const json& seed = field(prov, "seed");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    malformed("seed must be a nonnegative integer");
  }
  out.provenance.seed = seed.get<std::uint64_t>();
  for (auto [key, dst] : {std::pair{"timestamp", &out.provenance.timestamp},
                          std::pair{"tool", &out.provenance.tool}, std::pair{"version", &out.provenance.version}}) {
    const json& v = field(prov, key);
    if (!v.is_string()) malformed(std::string(key) + " must be a string");
    *dst = v.get<std::string>();
  }
  const json& steps = field(doc, "steps");
  if (!steps.is_array()) malformed("steps must be an array");
  for (const json& s : steps) out.certificate.steps.push_back(parse_step(s, g));
  return out;
}

Certificate parse_certificate(std::string_view text) { return parse_document(text).certificate; }

BatchSummary batch_verify(const std::filesystem::path& dir, int workers) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::directory_iterator it(dir, ec);
  if (ec) throw Error("cannot read directory " + dir.string() + ": " + ec.message());
  std::vector<fs::path> files;
  for (; it != fs::directory_iterator(); it.increment(ec)) {
    if (ec) break;
    if (it->is_regular_file(ec)) files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());

  enum class Outcome { Ok, Failed, Unreadable };
  struct Result {
    Outcome outcome = Outcome::Ok;
    std::string reason;
  };
  auto results = detail::run_indexed<Result>(static_cast<long>(files.size()), detail::resolve_workers(workers),
                                             [&](long i, Result& r) {
    std::ifstream in(files[static_cast<std::size_t>(i)], std::ios::binary);
    std::stringstream buf;
    if (in) buf << in.rdbuf();
    if (!in || in.bad()) {
      r = {Outcome::Unreadable, "cannot read file"};
      return;
    }
    try {
      const Verdict v = verify_certificate(parse_certificate(buf.str()));
      if (!v.ok) r = {Outcome::Failed, "step " + std::to_string(v.step) + ": " + v.failure};
    } catch (const Error& e) {
      r = {Outcome::Failed, e.what()};
    }
  });
  BatchSummary s;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const std::string name = files[i].filename().string();
    switch (results[i].outcome) {
      case Outcome::Ok: s.ok.push_back(name); break;
      case Outcome::Failed: s.failed.emplace_back(name, results[i].reason); break;
      case Outcome::Unreadable: s.unreadable.emplace_back(name, results[i].reason); break;
    }
  }
  return s;
}

std::string render_summary(const BatchSummary& s) {
  std::ostringstream os;
  for (const auto& [file, why] : s.failed) os << "FAILED " << file << ": " << why << '\n';
  for (const auto& [file, why] : s.unreadable) os << "UNREADABLE " << file << ": " << why << '\n';
  os << "ok: " << s.ok.size() << " failed: " << s.failed.size() << " unreadable: " << s.unreadable.size()
     << '\n';
  return os.str();
}

}  // namespace kk
