#pragma once

// Permutations of Z_n that preserve quasi-independence: constructors for the
// structured types, an exhaustive (table) and a one-sided (battery) test, and
// a classifier that recovers a factorization or reports that none exists.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "qindep/arith.hpp"
#include "qindep/group.hpp"
#include "qindep/qi_table.hpp"
#include "qindep/relations.hpp"

namespace qindep {

// ---------------------------------------------------------------------------
// Perm

struct Perm {
  GroupSpec group;
  std::vector<Element> images;

  Perm(GroupSpec g, std::vector<Element> img) : group(std::move(g)), images(std::move(img)) {
    if (!group.is_cyclic()) throw InvalidInput("Perm: cyclic groups only");
    if (static_cast<std::int64_t>(images.size()) != group.order()) {
      throw InvalidInput("Perm: expected " + std::to_string(group.order()) + " images");
    }
    std::vector<char> seen(images.size(), 0);
    for (auto y : images) {
      if (!group.contains(y) || seen[static_cast<std::size_t>(y)]) {
        throw InvalidInput("Perm: images do not form a bijection");
      }
      seen[static_cast<std::size_t>(y)] = 1;
    }
  }

  static Perm identity(const GroupSpec& g) {
    std::vector<Element> img(static_cast<std::size_t>(g.order()));
    std::iota(img.begin(), img.end(), 0);
    return Perm(g, std::move(img));
  }

  std::int64_t order() const { return group.order(); }
  Element operator()(Element x) const { return images[static_cast<std::size_t>(x)]; }
  bool is_identity() const {
    for (std::size_t x = 0; x < images.size(); ++x) {
      if (images[x] != static_cast<Element>(x)) return false;
    }
    return true;
  }

  Subset apply(const Subset& e) const {
    std::vector<Element> out;
    for (auto x : e) out.push_back((*this)(x));
    return Subset(group, std::move(out));
  }

  /// "n:image list".
  std::string str() const {
    std::string s = std::to_string(order()) + ":";
    for (std::size_t i = 0; i < images.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(images[i]);
    }
    return s;
  }

  static Perm parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw InvalidInput("Perm: expected 'n:image list'");
    const GroupSpec g = GroupSpec::cyclic(detail::parse_int(text.substr(0, colon), "perm order"));
    std::vector<Element> img;
    std::string_view body = text.substr(colon + 1);
    while (!body.empty()) {
      const auto comma = body.find(',');
      img.push_back(detail::parse_int(body.substr(0, comma), "perm image"));
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
    return Perm(g, std::move(img));
  }

  friend bool operator==(const Perm& a, const Perm& b) {
    return a.group == b.group && a.images == b.images;
  }
};

/// (a * b)(x) = a(b(x)).
inline Perm compose(const Perm& a, const Perm& b) {
  if (!(a.group == b.group)) throw InvalidInput("compose: group mismatch");
  std::vector<Element> img(b.images.size());
  for (std::size_t x = 0; x < img.size(); ++x) img[x] = a(b.images[x]);
  return Perm(a.group, std::move(img));
}

inline Perm inverse(const Perm& a) {
  std::vector<Element> img(a.images.size());
  for (std::size_t x = 0; x < img.size(); ++x) img[static_cast<std::size_t>(a.images[x])] = static_cast<Element>(x);
  return Perm(a.group, std::move(img));
}

inline Perm make_affine(const GroupSpec& g, std::int64_t u, Element t) {
  if (!g.is_cyclic()) throw InvalidInput("make_affine: cyclic groups only");
  const std::int64_t n = g.order();
  if (std::gcd(mod(u, n), n) != 1) {
    throw InvalidInput("make_affine: " + std::to_string(u) + " is not a unit mod " + std::to_string(n));
  }
  std::vector<Element> img(static_cast<std::size_t>(n));
  for (Element x = 0; x < n; ++x) img[static_cast<std::size_t>(x)] = mod(u * x + t, n);
  return Perm(g, std::move(img));
}

inline Perm make_translation(const GroupSpec& g, Element t) { return make_affine(g, 1, t); }

// ---------------------------------------------------------------------------
// The structured types

/// Product of sigma' on CRT axis `a` with the identity on the other axes.
/// sigma' must carry each coset of the order-p_a subgroup onto a coset.
inline Perm make_type1(const GroupSpec& g, std::size_t a, const std::vector<Element>& sigma) {
  if (!g.is_cyclic()) throw InvalidInput("make_type1: cyclic groups only");
  if (a >= g.axis_count()) throw InvalidInput("make_type1: no axis " + std::to_string(a));
  const std::int64_t q = g.axis_sizes()[a];
  const std::int64_t p = g.factorization()[a].prime;
  const Perm local(GroupSpec::cyclic(q), sigma);  // validates the bijection
  const std::int64_t step = q / p;
  for (Element x = 0; x < step; ++x) {
    const Element base = local(x);
    for (std::int64_t t = 1; t < p; ++t) {
      if (mod(local(x + t * step) - base, step) != 0) {
        throw InvalidInput("make_type1: invalid factor, a coset of Z_" + std::to_string(p) +
                           " is not carried onto a coset");
      }
    }
  }
  std::vector<Element> img(static_cast<std::size_t>(g.order()));
  for (Element x = 0; x < g.order(); ++x) {
    auto c = g.coords(x);
    c[a] = local(c[a]);
    img[static_cast<std::size_t>(x)] = g.index(c);
  }
  return Perm(g, std::move(img));
}

/// swap[x] exchanges x and x + n/2 (x < n/2); every Z_2-coset is kept.
inline Perm make_type2(const GroupSpec& g, const std::vector<bool>& swap) {
  if (!g.is_cyclic() || g.order() % 2 != 0) throw InvalidInput("make_type2: n must be even");
  const std::int64_t h = g.order() / 2;
  if (static_cast<std::int64_t>(swap.size()) != h) {
    throw InvalidInput("make_type2: expected " + std::to_string(h) + " swap flags");
  }
  auto p = Perm::identity(g);
  for (Element x = 0; x < h; ++x) {
    if (swap[static_cast<std::size_t>(x)]) std::swap(p.images[static_cast<std::size_t>(x)], p.images[static_cast<std::size_t>(x + h)]);
  }
  return p;
}

/// sigma(x + y) = sigma'(x) + y for representatives x in [0, n/rad) and y in Z_rad.
inline Perm make_type3(const GroupSpec& g, const std::vector<Element>& reps) {
  if (!g.is_cyclic()) throw InvalidInput("make_type3: cyclic groups only");
  const std::int64_t r = g.order() / radical_of(g.order());
  if (static_cast<std::int64_t>(reps.size()) != r) {
    throw InvalidInput("make_type3: expected a permutation of " + std::to_string(r) + " representatives");
  }
  if (r == 1) return Perm::identity(g);
  const Perm local(GroupSpec::cyclic(r), reps);
  std::vector<Element> img(static_cast<std::size_t>(g.order()));
  for (Element x = 0; x < g.order(); ++x) {
    const Element rep = x % r;
    img[static_cast<std::size_t>(x)] = local(rep) + (x - rep);
  }
  return Perm(g, std::move(img));
}

inline bool preserves_qi_exhaustive_raw(const Perm& s);

/// sigma acts on the subgroup Z_rad through t -> sigma(t) (scaled by n/rad),
/// shifted to the coset `offset` + Z_rad; the identity elsewhere. With `check`,
/// sigma must preserve quasi-independence on Z_rad (exhaustively, so rad <= 20).
inline Perm make_type4(const GroupSpec& g, const Perm& sigma, Element offset = 0, bool check = true) {
  if (!g.is_cyclic()) throw InvalidInput("make_type4: cyclic groups only");
  const std::int64_t rad = radical_of(g.order());
  const std::int64_t r = g.order() / rad;
  if (sigma.order() != rad) throw InvalidInput("make_type4: inner permutation must act on Z_" + std::to_string(rad));
  if (offset < 0 || offset >= r) throw InvalidInput("make_type4: offset must be a coset representative");
  if (check && !preserves_qi_exhaustive_raw(sigma)) {
    throw InvalidInput("make_type4: inner permutation does not preserve quasi-independence");
  }
  auto p = Perm::identity(g);
  for (Element t = 0; t < rad; ++t) p.images[static_cast<std::size_t>(offset + r * t)] = offset + r * sigma(t);
  return p;
}

// ---------------------------------------------------------------------------
// Preservation

/// Shared quasi-independence table per group.
inline std::shared_ptr<const QiTable> qi_table_for(const GroupSpec& g) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const QiTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(g.name()); it != cache.end()) return it->second;
  auto t = std::make_shared<const QiTable>(QiTable::build(g));
  return cache.emplace(g.name(), std::move(t)).first->second;
}

enum class PreservationMode { exhaustive, battery };

struct PreservationResult {
  bool preserves = true;
  bool exhaustive = false;            // false: passing is evidence, not proof
  std::optional<Subset> counterexample;  // QI status differs between E and sigma(E)
  std::uint64_t checked = 0;
  std::uint64_t undecided = 0;
};

struct BatteryOptions {
  std::size_t max_small = 4;
  std::size_t random_samples = 10'000;
  std::uint64_t seed = 1;
  Budget budget{};
};

inline constexpr std::int64_t kExhaustiveLimit = 20;

inline PreservationResult preserves_qi_exhaustive(const Perm& s) {
  if (s.order() > kExhaustiveLimit) {
    throw InvalidInput("preserves_qi: exhaustive mode needs n <= " + std::to_string(kExhaustiveLimit));
  }
  PreservationResult out;
  out.exhaustive = true;
  const auto table = qi_table_for(s.group);
  const auto n = static_cast<std::size_t>(s.order());
  // Image of a mask, one byte at a time.
  const std::size_t bytes = (n + 7) / 8;
  std::vector<std::array<std::uint32_t, 256>> img(bytes);
  for (std::size_t b = 0; b < bytes; ++b) {
    for (std::uint32_t v = 0; v < 256; ++v) {
      std::uint32_t m = 0;
      for (std::size_t i = 0; i < 8 && 8 * b + i < n; ++i) {
        if (v >> i & 1) m |= std::uint32_t{1} << s(static_cast<Element>(8 * b + i));
      }
      img[b][v] = m;
    }
  }
  for (std::uint64_t mask = 0; mask < table->size(); ++mask) {
    std::uint32_t m = 0;
    for (std::size_t b = 0; b < bytes; ++b) m |= img[b][(mask >> (8 * b)) & 0xff];
    ++out.checked;
    if (table->quasi_independent(mask) != table->quasi_independent(m)) {
      out.preserves = false;
      out.counterexample = Subset::from_mask(s.group, mask);
      break;
    }
  }
  return out;
}

inline bool preserves_qi_exhaustive_raw(const Perm& s) {
  if (s.order() <= 2) return true;
  return preserves_qi_exhaustive(s).preserves;
}

/// One-sided: every subset of size <= max_small, every prime coset with and
/// without one point, and random subsets up to a little past phi(n).
inline PreservationResult preserves_qi_battery(const Perm& s, const BatteryOptions& opt = {}) {
  PreservationResult out;
  const GroupSpec& g = s.group;
  const std::int64_t n = g.order();
  auto probe = [&](const Subset& e) {
    const auto a = is_quasi_independent(e, opt.budget).quasi_independent;
    const auto b = is_quasi_independent(s.apply(e), opt.budget).quasi_independent;
    ++out.checked;
    if (a == Decision::undecided || b == Decision::undecided) {
      ++out.undecided;
      return false;
    }
    if (a != b) {
      out.preserves = false;
      out.counterexample = e;
      return true;
    }
    return false;
  };
  // Small subsets in lexicographic order.
  std::vector<Element> cur;
  bool stop = false;
  auto rec = [&](auto&& self, Element from) -> void {
    if (stop) return;
    if (!cur.empty() && probe(Subset(g, cur))) {
      stop = true;
      return;
    }
    if (cur.size() == opt.max_small) return;
    for (Element x = from; x < n && !stop; ++x) {
      cur.push_back(x);
      self(self, x + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  if (stop) return out;
  for (const auto& h : elementary_subgroups(g)) {
    for (const auto& c : cosets_of(g, h)) {
      if (probe(Subset(g, c.elements))) return out;
      for (std::size_t skip = 0; skip < c.elements.size(); ++skip) {
        std::vector<Element> e;
        for (std::size_t i = 0; i < c.elements.size(); ++i) {
          if (i != skip) e.push_back(c.elements[i]);
        }
        if (probe(Subset(g, e))) return out;
      }
    }
  }
  std::mt19937_64 rng(opt.seed);
  const std::int64_t top = std::min<std::int64_t>(n, euler_phi(n) + 4);
  std::vector<Element> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t k = 0; k < opt.random_samples; ++k) {
    const auto size = static_cast<std::size_t>(1 + rng() % static_cast<std::uint64_t>(top));
    std::shuffle(all.begin(), all.end(), rng);
    if (probe(Subset(g, std::vector<Element>(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size))))) return out;
  }
  return out;
}

inline PreservationResult preserves_qi(const Perm& s, PreservationMode mode = PreservationMode::exhaustive,
                                       const BatteryOptions& opt = {}) {
  return mode == PreservationMode::exhaustive ? preserves_qi_exhaustive(s) : preserves_qi_battery(s, opt);
}

/// True when every coset of every prime-order subgroup is carried onto a coset
/// of the same subgroup.
inline bool is_coset_structured(const Perm& s) {
  const std::int64_t n = s.order();
  for (auto p : s.group.primes()) {
    const std::int64_t step = n / p;
    for (Element x = 0; x < step; ++x) {
      const Element base = s(x);
      for (std::int64_t t = 1; t < p; ++t) {
        if (mod(s(x + t * step) - base, step) != 0) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Classification

struct Type1Factor {
  std::size_t axis = 0;
  std::vector<Element> sigma;  // permutation of Z_{p^k} on that axis
};
struct Type2Factor {
  std::vector<bool> swap;
};
struct Type3Factor {
  std::vector<Element> reps;
};
struct PermFactorization;
struct Type4Factor {
  Element offset = 0;
  std::vector<Element> inner;                     // permutation of Z_rad
  std::shared_ptr<const PermFactorization> inner_factorization;
};
struct AutomorphismFactor {
  std::int64_t unit = 1;
};

using PermFactor = std::variant<Type1Factor, Type2Factor, Type3Factor, Type4Factor, AutomorphismFactor>;

/// sigma = T_translation * f_0 * f_1 * ... (f_last applied first).
struct PermFactorization {
  GroupSpec group = GroupSpec::cyclic(2);
  Element translation = 0;
  std::vector<PermFactor> factors;
};

inline Perm factor_perm(const GroupSpec& g, const PermFactor& f) {
  return std::visit(
      [&](const auto& v) -> Perm {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Type1Factor>) return make_type1(g, v.axis, v.sigma);
        if constexpr (std::is_same_v<T, Type2Factor>) return make_type2(g, v.swap);
        if constexpr (std::is_same_v<T, Type3Factor>) return make_type3(g, v.reps);
        if constexpr (std::is_same_v<T, Type4Factor>) {
          return make_type4(g, Perm(GroupSpec::cyclic(radical_of(g.order())), v.inner), v.offset, false);
        }
        if constexpr (std::is_same_v<T, AutomorphismFactor>) return make_affine(g, v.unit, 0);
      },
      f);
}

inline Perm recompose(const PermFactorization& f) {
  Perm out = make_translation(f.group, f.translation);
  for (const auto& x : f.factors) out = compose(out, factor_perm(f.group, x));
  return out;
}

namespace detail {

inline std::optional<PermFactorization> classify_normalized(const Perm& s);

/// Odd square-free: each CRT coordinate of the image depends on that
/// coordinate alone.
inline std::optional<std::vector<Type1Factor>> coordinate_factors(const Perm& s) {
  const GroupSpec& g = s.group;
  const auto& sizes = g.axis_sizes();
  std::vector<std::vector<Element>> maps(sizes.size());
  for (std::size_t j = 0; j < sizes.size(); ++j) maps[j].assign(static_cast<std::size_t>(sizes[j]), -1);
  for (Element x = 0; x < g.order(); ++x) {
    const auto cx = g.coords(x);
    const auto cy = g.coords(s(x));
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      auto& slot = maps[j][static_cast<std::size_t>(cx[j])];
      if (slot < 0) slot = cy[j];
      if (slot != cy[j]) return std::nullopt;
    }
  }
  std::vector<Type1Factor> out;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    std::vector<char> seen(maps[j].size(), 0);
    for (auto y : maps[j]) {
      if (seen[static_cast<std::size_t>(y)]) return std::nullopt;
      seen[static_cast<std::size_t>(y)] = 1;
    }
    bool identity = true;
    for (std::size_t i = 0; i < maps[j].size(); ++i) identity = identity && maps[j][i] == static_cast<Element>(i);
    if (!identity) out.push_back({j, maps[j]});
  }
  return out;
}

/// Square-free n (odd or even), sigma(0) = 0.
inline std::optional<PermFactorization> classify_square_free(const Perm& s) {
  const GroupSpec& g = s.group;
  const std::int64_t n = g.order();
  PermFactorization out;
  out.group = g;
  if (n % 2 == 1) {
    auto f = coordinate_factors(s);
    if (!f) return std::nullopt;
    for (auto& x : *f) out.factors.emplace_back(std::move(x));
    return out;
  }
  const std::int64_t m = n / 2;
  for (Element x = 0; x < m; ++x) {
    if (mod(s(x + m) - s(x), n) != m) return std::nullopt;  // Z_2-cosets must go to Z_2-cosets
  }
  if (m == 1) {
    if (s(0) != 0) out.factors.emplace_back(Type2Factor{{true}});
    return out;
  }
  // tau: the induced map on Z_n / Z_2 = Z_m, then its lift rho acting on the
  // odd coordinates only. sigma = rho * type2.
  const GroupSpec gm = GroupSpec::cyclic(m);
  std::vector<Element> tau(static_cast<std::size_t>(m));
  for (Element x = 0; x < m; ++x) tau[static_cast<std::size_t>(x)] = mod(s(x), m);
  const Perm tp(gm, tau);
  auto inner = coordinate_factors(tp);
  if (!inner) return std::nullopt;
  std::vector<Element> rho(static_cast<std::size_t>(n));
  for (Element x = 0; x < n; ++x) {
    auto c = g.coords(x);
    const Element y = tp(mod(x, m));
    for (std::size_t j = 1; j < c.size(); ++j) c[j] = mod(y, g.axis_sizes()[j]);
    rho[static_cast<std::size_t>(x)] = g.index(c);
  }
  const Perm rest = compose(inverse(Perm(g, rho)), s);
  for (auto& f : *inner) out.factors.emplace_back(Type1Factor{f.axis + 1, std::move(f.sigma)});
  std::vector<bool> swap(static_cast<std::size_t>(m));
  bool any = false;
  for (Element x = 0; x < m; ++x) {
    swap[static_cast<std::size_t>(x)] = rest(x) != x;
    any = any || swap[static_cast<std::size_t>(x)];
  }
  if (any) out.factors.emplace_back(Type2Factor{std::move(swap)});
  return out;
}

inline std::optional<PermFactorization> classify_normalized(const Perm& s) {
  const GroupSpec& g = s.group;
  const std::int64_t n = g.order();
  const std::int64_t rad = radical_of(n);
  if (rad == n) return classify_square_free(s);
  const std::int64_t r = n / rad;
  // Each Z_rad-coset a + r Z must land on one coset.
  std::vector<Element> reps(static_cast<std::size_t>(r));
  for (Element a = 0; a < r; ++a) {
    reps[static_cast<std::size_t>(a)] = mod(s(a), r);
    for (std::int64_t t = 1; t < rad; ++t) {
      if (mod(s(a + r * t), r) != reps[static_cast<std::size_t>(a)]) return std::nullopt;
    }
  }
  const Perm t3 = make_type3(g, reps);  // validates the representative permutation
  const Perm rest = compose(inverse(t3), s);
  PermFactorization out;
  out.group = g;
  if (!t3.is_identity()) out.factors.emplace_back(Type3Factor{reps});
  const GroupSpec gr = GroupSpec::cyclic(rad);
  for (Element a = 0; a < r; ++a) {
    std::vector<Element> inner(static_cast<std::size_t>(rad));
    for (Element t = 0; t < rad; ++t) inner[static_cast<std::size_t>(t)] = (rest(a + r * t) - a) / r;
    const Perm ip(gr, inner);
    if (ip.is_identity()) continue;
    // The inner map may move 0; normalize by its own translation.
    const Element shift = ip(0);
    auto f = classify_normalized(compose(make_translation(gr, -shift), ip));
    if (!f) return std::nullopt;
    f->translation = shift;
    out.factors.emplace_back(Type4Factor{a, std::move(inner), std::make_shared<const PermFactorization>(std::move(*f))});
  }
  return out;
}

}  // namespace detail

/// Factorization into translation and structured factors, or nothing when the
/// structure test fails.
inline std::optional<PermFactorization> classify(const Perm& s) {
  const GroupSpec& g = s.group;
  const Element t = s(0);
  auto f = detail::classify_normalized(compose(make_translation(g, -t), s));
  if (!f) return std::nullopt;
  f->translation = t;
  if (!(recompose(*f) == s)) throw std::logic_error("classify: recomposition mismatch");
  return f;
}

inline nlohmann::json to_json(const PermFactorization& f) {
  nlohmann::json j;
  j["group"] = f.group.name();
  j["translation"] = f.translation;
  j["factors"] = nlohmann::json::array();
  for (const auto& x : f.factors) {
    nlohmann::json o;
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Type1Factor>) {
            o["type"] = "type1";
            o["axis"] = v.axis;
            o["modulus"] = f.group.axis_sizes()[v.axis];
            o["sigma"] = v.sigma;
          } else if constexpr (std::is_same_v<T, Type2Factor>) {
            o["type"] = "type2";
            std::vector<Element> swapped;
            for (std::size_t i = 0; i < v.swap.size(); ++i) {
              if (v.swap[i]) swapped.push_back(static_cast<Element>(i));
            }
            o["swapped_cosets"] = swapped;
          } else if constexpr (std::is_same_v<T, Type3Factor>) {
            o["type"] = "type3";
            o["representatives"] = v.reps;
          } else if constexpr (std::is_same_v<T, Type4Factor>) {
            o["type"] = "type4";
            o["offset"] = v.offset;
            o["inner"] = v.inner;
            if (v.inner_factorization) o["inner_factorization"] = to_json(*v.inner_factorization);
          } else {
            o["type"] = "automorphism";
            o["unit"] = v.unit;
          }
        },
        x);
    j["factors"].push_back(std::move(o));
  }
  return j;
}

}  // namespace qindep
