#include "kk/literal.hpp"

#include <cctype>
#include <string>

#include "kk/error.hpp"

namespace kk {

namespace {

std::string strip(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  }
  return out;
}

int parse_int(std::string_view s, std::string_view context) {
  if (s.empty() || s.size() > 9) throw ParseError("bad number in '" + std::string(context) + "'");
  int v = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw ParseError("bad number '" + std::string(s) + "' in '" + std::string(context) + "'");
    }
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace

GroupSet parse_set(const Group& g, std::string_view raw) {
  const std::string text = strip(raw);
  std::string_view s = text;
  bool complement = false;
  if (!s.empty() && s.front() == '~') {
    complement = true;
    s.remove_prefix(1);
  }
  if (s.size() < 2 || s.front() != '{' || s.back() != '}') {
    throw ParseError("set literal must look like {e1,e2,...}: '" + std::string(raw) + "'");
  }
  s = s.substr(1, s.size() - 2);

  Mask bits = 0;
  std::size_t pos = 0;
  while (pos < s.size()) {
    Element x = 0;
    if (s[pos] == '(') {
      const std::size_t close = s.find(')', pos);
      if (close == std::string_view::npos) throw ParseError("unclosed tuple in '" + std::string(raw) + "'");
      std::vector<int> residues;
      std::string_view inner = s.substr(pos + 1, close - pos - 1);
      std::size_t p = 0;
      while (p <= inner.size()) {
        std::size_t comma = inner.find(',', p);
        if (comma == std::string_view::npos) comma = inner.size();
        residues.push_back(parse_int(inner.substr(p, comma - p), raw));
        p = comma + 1;
      }
      try {
        x = g.from_digits(residues);
      } catch (const ContractViolation& e) {
        throw ParseError(std::string(e.what()) + " in '" + std::string(raw) + "'");
      }
      pos = close + 1;
    } else {
      std::size_t comma = s.find(',', pos);
      if (comma == std::string_view::npos) comma = s.size();
      const int v = parse_int(s.substr(pos, comma - pos), raw);
      if (v >= g.order()) {
        throw ParseError("element " + std::to_string(v) + " out of range for " + g.spec());
      }
      x = static_cast<Element>(v);
      pos = comma;
    }
    bits |= Mask{1} << x;
    if (pos < s.size()) {
      if (s[pos] != ',' || pos + 1 == s.size()) throw ParseError("expected ',' in '" + std::string(raw) + "'");
      ++pos;
    }
  }
  if (complement) bits = g.full() & ~bits;
  return {g, bits};
}

std::array<GroupSet, 3> parse_trio_sets(const Group& g, std::string_view text) {
  std::array<std::string_view, 3> parts;
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t semi = text.find(';', pos);
    if ((semi == std::string_view::npos) != (i == 2)) {
      throw ParseError("trio literal needs exactly three sets separated by ';'");
    }
    parts[i] = text.substr(pos, semi == std::string_view::npos ? std::string_view::npos : semi - pos);
    pos = semi + 1;
  }
  return {parse_set(g, parts[0]), parse_set(g, parts[1]), parse_set(g, parts[2])};
}

}  // namespace kk
