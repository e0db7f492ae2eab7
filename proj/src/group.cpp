#include "kk/group.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "kk/error.hpp"

namespace kk {

namespace detail {

// One cyclic rotation of a digit: ((m << up) & high) | ((m >> down) & low).
struct Rotation {
  int up;
  int down;
  Mask low;
  Mask high;
};

}  // namespace detail

namespace {

Mask full_mask(int order) {
  return order >= 64 ? ~Mask{0} : ((Mask{1} << order) - 1);
}

}  // namespace

struct Group::Data {
  std::vector<int> factors;
  std::vector<int> strides;
  int order = 1;
  Mask full = 1;
  std::vector<std::uint8_t> add;
  std::vector<std::uint8_t> neg;
  std::vector<std::vector<detail::Rotation>> rotations;  // per element
  std::vector<Subgroup> subgroups;
};

Subgroup Subgroup::unchecked(Mask bits) { return Subgroup(bits, popcount(bits)); }

Group::Group() : Group(std::vector<int>{}) {}

Group::Group(std::vector<int> factors) {
  long order = 1;
  for (int n : factors) {
    if (n < 2) throw ContractViolation("cyclic factor orders must be at least 2");
    order *= n;
    if (order > kMaxOrder) {
      throw SizeError("group order exceeds the supported maximum of " +
                      std::to_string(kMaxOrder));
    }
  }

  auto d = std::make_shared<Data>();
  d->factors = std::move(factors);
  d->order = static_cast<int>(order);
  d->full = full_mask(d->order);
  const int n = d->order;

  int stride = 1;
  for (int f : d->factors) {
    d->strides.push_back(stride);
    stride *= f;
  }

  auto digit = [&](int x, std::size_t k) { return (x / d->strides[k]) % d->factors[k]; };

  d->add.resize(static_cast<std::size_t>(n) * n);
  d->neg.resize(n);
  for (int x = 0; x < n; ++x) {
    int negx = 0;
    for (std::size_t k = 0; k < d->factors.size(); ++k) {
      negx += ((d->factors[k] - digit(x, k)) % d->factors[k]) * d->strides[k];
    }
    d->neg[x] = static_cast<std::uint8_t>(negx);
    for (int y = 0; y < n; ++y) {
      int s = 0;
      for (std::size_t k = 0; k < d->factors.size(); ++k) {
        s += ((digit(x, k) + digit(y, k)) % d->factors[k]) * d->strides[k];
      }
      d->add[static_cast<std::size_t>(x) * n + y] = static_cast<std::uint8_t>(s);
    }
  }

  // Low masks: positions whose k-th digit is below the shift amount.
  d->rotations.resize(n);
  for (int g = 0; g < n; ++g) {
    for (std::size_t k = 0; k < d->factors.size(); ++k) {
      const int s = digit(g, k);
      if (s == 0) continue;
      Mask low = 0;
      for (int p = 0; p < n; ++p) {
        if (digit(p, k) < s) low |= Mask{1} << p;
      }
      const int w = d->strides[k];
      d->rotations[g].push_back({s * w, (d->factors[k] - s) * w, low, d->full & ~low});
    }
  }

  d_ = d;

  // Breadth-first closure from the trivial subgroup.
  std::vector<Subgroup> found{Subgroup(1, 1)};
  std::unordered_set<Mask> seen{1};
  for (std::size_t i = 0; i < found.size(); ++i) {
    const Mask base = found[i].bits();
    for (int x = 1; x < n; ++x) {
      if ((base >> x) & 1U) continue;
      Mask s = base;
      for (;;) {
        const Mask next = s | translate(s, static_cast<Element>(x));
        if (next == s) break;
        s = next;
      }
      if (seen.insert(s).second) found.push_back(Subgroup(s, popcount(s)));
    }
  }
  std::sort(found.begin(), found.end());
  d->subgroups = std::move(found);
}

Group Group::parse(std::string_view spec) {
  if (spec.empty()) return Group();
  std::vector<int> factors;
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    std::size_t end = pos;
    while (end < spec.size() && spec[end] != 'x' && spec[end] != 'X') ++end;
    std::string_view atom = spec.substr(pos, end - pos);
    if (atom.size() < 2 || (atom[0] != 'Z' && atom[0] != 'z')) {
      throw ParseError("bad group atom '" + std::string(atom) + "' in '" + std::string(spec) + "'");
    }
    long n = 0;
    for (char c : atom.substr(1)) {
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        throw ParseError("bad group atom '" + std::string(atom) + "'");
      }
      n = n * 10 + (c - '0');
      if (n > 1'000'000) throw SizeError("cyclic factor too large in '" + std::string(spec) + "'");
    }
    if (n < 1) throw ParseError("cyclic factor must be positive in '" + std::string(spec) + "'");
    factors.push_back(static_cast<int>(n));
    if (end == spec.size()) break;
    pos = end + 1;
    if (pos == spec.size()) throw ParseError("trailing 'x' in '" + std::string(spec) + "'");
  }
  if (factors.size() == 1 && factors[0] == 1) return Group();
  return Group(std::move(factors));
}

int Group::order() const noexcept { return d_->order; }
std::span<const int> Group::factors() const noexcept { return d_->factors; }

std::string Group::spec() const {
  if (d_->factors.empty()) return "Z1";
  std::string out;
  for (std::size_t k = 0; k < d_->factors.size(); ++k) {
    if (k) out += 'x';
    out += 'Z' + std::to_string(d_->factors[k]);
  }
  return out;
}

void Group::check(Element x) const {
  if (x >= static_cast<Element>(d_->order)) {
    throw ContractViolation("element index " + std::to_string(x) + " out of range for " + spec());
  }
}

Element Group::add(Element x, Element y) const {
  check(x);
  check(y);
  return d_->add[static_cast<std::size_t>(x) * d_->order + y];
}

Element Group::neg(Element x) const {
  check(x);
  return d_->neg[x];
}

Element Group::times(long n, Element x) const {
  check(x);
  Element acc = 0;
  n %= element_order(x);
  for (long i = 0; i < n; ++i) acc = d_->add[static_cast<std::size_t>(acc) * d_->order + x];
  return acc;
}

int Group::element_order(Element x) const {
  check(x);
  int k = 1;
  for (Element acc = x; acc != 0; acc = d_->add[static_cast<std::size_t>(acc) * d_->order + x]) ++k;
  return k;
}

std::vector<int> Group::digits(Element x) const {
  check(x);
  std::vector<int> out;
  for (std::size_t k = 0; k < d_->factors.size(); ++k) {
    out.push_back((static_cast<int>(x) / d_->strides[k]) % d_->factors[k]);
  }
  return out;
}

Element Group::from_digits(std::span<const int> residues) const {
  if (residues.size() != d_->factors.size()) {
    throw ContractViolation("expected " + std::to_string(d_->factors.size()) + " residues for " +
                            spec());
  }
  int x = 0;
  for (std::size_t k = 0; k < residues.size(); ++k) {
    if (residues[k] < 0 || residues[k] >= d_->factors[k]) {
      throw ContractViolation("residue " + std::to_string(residues[k]) + " out of range for Z" +
                              std::to_string(d_->factors[k]));
    }
    x += residues[k] * d_->strides[k];
  }
  return static_cast<Element>(x);
}

std::string Group::format(Element x) const {
  if (is_cyclic()) return std::to_string(x);
  std::string out = "(";
  auto r = digits(x);
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(r[k]);
  }
  return out + ")";
}

Mask Group::full() const noexcept { return d_->full; }

Mask Group::translate(Mask set, Element g) const {
  for (const detail::Rotation& r : d_->rotations[g]) {
    set = ((set << r.up) & r.high) | ((set >> r.down) & r.low);
  }
  return set;
}

Mask Group::negate(Mask set) const {
  Mask out = 0;
  for_each_element(set, [&](Element x) { out |= Mask{1} << d_->neg[x]; });
  return out;
}

const std::vector<Subgroup>& Group::subgroups() const noexcept { return d_->subgroups; }

bool Group::is_subgroup(Mask bits) const {
  if ((bits & 1U) == 0 || (bits & ~d_->full) != 0) return false;
  bool closed = true;
  for_each_element(bits, [&](Element x) {
    if ((translate(bits, x) & ~bits) != 0) closed = false;
  });
  return closed;
}

Subgroup Group::subgroup(Mask bits) const {
  if (!is_subgroup(bits)) throw ContractViolation("set is not a subgroup of " + spec());
  return Subgroup(bits, popcount(bits));
}

Subgroup Group::generated(Mask gens) const {
  Mask s = 1;
  for (;;) {
    Mask next = s;
    for_each_element(gens, [&](Element g) { next |= translate(s, g); });
    if (next == s) break;
    s = next;
  }
  return Subgroup(s, popcount(s));
}

Subgroup Group::whole() const { return Subgroup(d_->full, d_->order); }

bool operator==(const Group& a, const Group& b) {
  return a.d_ == b.d_ || a.d_->factors == b.d_->factors;
}

int QuotientMap::add(int a, int b) const {
  return coset_index[parent.add(representatives[a], representatives[b])];
}

Element coset_rep(const Group& g, const Subgroup& h, Element x) {
  return lowest(g.translate(h.bits(), x));
}

std::vector<Element> cyclic_generators(const Group& g, const Subgroup& universe,
                                       const Subgroup& h) {
  const int index = universe.order() / h.order();
  std::vector<Element> out;
  Mask seen = 0;
  for_each_element(universe.bits(), [&](Element x) {
    const Mask coset = g.translate(h.bits(), x);
    if (seen & coset) return;
    seen |= coset;
    // The cosets of x, 2x, ... cover universe/H exactly when x + H has full order.
    int k = 1;
    for (Mask c = coset; (c & 1U) == 0; c = g.translate(c, x)) ++k;
    if (k == index) out.push_back(lowest(coset));
  });
  return out;
}

namespace {

// Basis of a finite abelian group given by an addition table on ids 0..m-1.
// Returns (order, generator id) pairs of the primary cyclic components.
std::vector<std::pair<int, int>> primary_basis(int m, const std::vector<int>& table) {
  auto add = [&](int a, int b) { return table[static_cast<std::size_t>(a) * m + b]; };
  auto order_of = [&](int a) {
    int k = 1;
    for (int acc = a; acc != 0; acc = add(acc, a)) ++k;
    return k;
  };

  std::vector<int> primes;
  for (int n = m, p = 2; n > 1; ++p) {
    if (n % p == 0) {
      primes.push_back(p);
      while (n % p == 0) n /= p;
    }
  }

  std::vector<std::pair<int, int>> basis;
  for (int p : primes) {
    std::vector<char> in_p(m, 0);
    int p_count = 0;
    for (int a = 0; a < m; ++a) {
      int o = order_of(a);
      while (o % p == 0) o /= p;
      if (o == 1) {
        in_p[a] = 1;
        ++p_count;
      }
    }
    std::vector<char> span(m, 0);
    span[0] = 1;
    int span_size = 1;
    while (span_size < p_count) {
      // Pick the element of largest order modulo the current span.
      int best = -1;
      int best_order = 0;
      for (int a = 0; a < m; ++a) {
        if (!in_p[a] || span[a]) continue;
        int k = 1;
        for (int acc = a; !span[acc]; acc = add(acc, a)) ++k;
        if (k > best_order) {
          best_order = k;
          best = a;
        }
      }
      // Lift it to an element whose true order equals its order mod the span.
      int lifted = -1;
      for (int s = 0; s < m && lifted < 0; ++s) {
        if (span[s] && order_of(add(best, s)) == best_order) lifted = add(best, s);
      }
      if (lifted < 0) throw Error("internal: quotient basis lift failed");
      std::vector<char> next(m, 0);
      int next_size = 0;
      for (int s = 0; s < m; ++s) {
        if (!span[s]) continue;
        int acc = s;
        for (int k = 0; k < best_order; ++k) {
          if (!next[acc]) {
            next[acc] = 1;
            ++next_size;
          }
          acc = add(acc, lifted);
        }
      }
      span = std::move(next);
      span_size = next_size;
      basis.emplace_back(best_order, lifted);
    }
  }
  return basis;
}

}  // namespace

QuotientMap quotient(const Group& g, const Subgroup& h) {
  if (!g.is_subgroup(h.bits())) throw ContractViolation("quotient kernel is not a subgroup");

  QuotientMap q{g, h, std::vector<int>(g.order(), -1), {}, Group(), {}, false, {}};
  for (Element x = 0; x < static_cast<Element>(g.order()); ++x) {
    if (q.coset_index[x] >= 0) continue;
    const int id = static_cast<int>(q.representatives.size());
    q.representatives.push_back(x);
    for_each_element(g.translate(h.bits(), x), [&](Element y) { q.coset_index[y] = id; });
  }

  const int m = q.size();
  std::vector<int> table(static_cast<std::size_t>(m) * m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) table[static_cast<std::size_t>(a) * m + b] = q.add(a, b);
  }

  // Group primary components by prime, then fold them into invariant factors:
  // the i-th largest invariant factor takes the i-th largest power of each prime.
  std::map<int, std::vector<std::pair<int, int>>> by_prime;
  for (auto [ord, gen] : primary_basis(m, table)) {
    int p = 2;
    while (ord % p) ++p;
    by_prime[p].emplace_back(ord, gen);
  }
  std::size_t rank = 0;
  for (auto& [p, comps] : by_prime) {
    std::sort(comps.begin(), comps.end(), std::greater<>());
    rank = std::max(rank, comps.size());
  }
  std::vector<std::pair<int, int>> invariant(rank, {1, 0});
  for (auto& [p, comps] : by_prime) {
    for (std::size_t i = 0; i < comps.size(); ++i) {
      invariant[i].first *= comps[i].first;
      invariant[i].second = table[static_cast<std::size_t>(invariant[i].second) * m + comps[i].second];
    }
  }
  std::reverse(invariant.begin(), invariant.end());

  std::vector<int> factors;
  for (auto [ord, gen] : invariant) factors.push_back(ord);
  q.quotient_group = Group(factors);

  const Group& qg = q.quotient_group;
  q.embedding.resize(qg.order());
  for (Element e = 0; e < static_cast<Element>(qg.order()); ++e) {
    auto r = qg.digits(e);
    int id = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      for (int t = 0; t < r[k]; ++t) id = table[static_cast<std::size_t>(id) * m + invariant[k].second];
    }
    q.embedding[e] = id;
  }

  q.cyclic = factors.size() <= 1;
  if (q.cyclic) {
    for (int a = 0; a < m; ++a) {
      int k = 1;
      for (int acc = a; acc != 0; acc = table[static_cast<std::size_t>(acc) * m + a]) ++k;
      if (k == m) q.generators.push_back(a);
    }
  }
  return q;
}

}  // namespace kk
