#pragma once

// Finite abelian groups Z_n and product lattices Z_{n1} x ... x Z_{nk},
// their elements, subsets and cosets.
//
// Elements are dense indices in [0, order). For a cyclic group the index is
// the residue itself. For a lattice the index is the row-major position of the
// coordinate tuple (last axis varies fastest).

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qindep/arith.hpp"

namespace qindep {

using Element = std::int64_t;

class GroupSpec {
 public:
  enum class Kind { cyclic, lattice };

  static GroupSpec cyclic(std::int64_t n) {
    if (n < 2) throw InvalidInput("cyclic group order must be at least 2");
    GroupSpec g;
    g.kind_ = Kind::cyclic;
    g.order_ = n;
    g.factorization_ = factor(n);
    for (const auto& pp : g.factorization_) g.axis_sizes_.push_back(pp.value());
    return g;
  }

  static GroupSpec lattice(std::vector<std::int64_t> dims) {
    if (dims.empty()) throw InvalidInput("lattice needs at least one axis");
    GroupSpec g;
    g.kind_ = Kind::lattice;
    g.order_ = 1;
    for (auto d : dims) {
      if (d < 2) throw InvalidInput("lattice axis sizes must be at least 2");
      g.order_ *= d;
    }
    g.dims_ = std::move(dims);
    g.axis_sizes_ = g.dims_;
    return g;
  }

  /// "15" or "3x6x9".
  static GroupSpec parse(std::string_view text) {
    std::vector<std::int64_t> parts;
    std::size_t start = 0;
    while (true) {
      const std::size_t x = text.find('x', start);
      const auto piece = text.substr(start, x == std::string_view::npos ? text.npos : x - start);
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), v);
      if (piece.empty() || ec != std::errc() || ptr != piece.data() + piece.size()) {
        throw InvalidInput("bad group spec '" + std::string(text) + "'");
      }
      parts.push_back(v);
      if (x == std::string_view::npos) break;
      start = x + 1;
    }
    if (parts.size() == 1) return cyclic(parts[0]);
    return lattice(std::move(parts));
  }

  Kind kind() const { return kind_; }
  bool is_cyclic() const { return kind_ == Kind::cyclic; }
  bool is_lattice() const { return kind_ == Kind::lattice; }
  std::int64_t order() const { return order_; }
  const Factorization& factorization() const { return factorization_; }
  const std::vector<std::int64_t>& dims() const { return dims_; }

  std::vector<std::int64_t> primes() const {
    std::vector<std::int64_t> out;
    for (const auto& pp : factorization_) out.push_back(pp.prime);
    return out;
  }
  bool square_free() const {
    return std::all_of(factorization_.begin(), factorization_.end(),
                       [](const PrimePower& pp) { return pp.exponent == 1; });
  }

  /// Number of coordinate axes: prime-power CRT axes (cyclic) or lattice axes.
  std::size_t axis_count() const {
    return is_cyclic() ? factorization_.size() : dims_.size();
  }
  /// Size of each coordinate axis: p^k for cyclic groups, n_j for lattices.
  const std::vector<std::int64_t>& axis_sizes() const { return axis_sizes_; }

  /// Dimension of the quotient by the relation space: phi(n), or prod (n_j - 1).
  std::int64_t free_rank() const {
    if (is_cyclic()) return euler_phi(order_);
    std::int64_t r = 1;
    for (auto d : dims_) r *= d - 1;
    return r;
  }

  std::string name() const {
    if (is_cyclic()) return std::to_string(order_);
    std::string s;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      if (i) s += 'x';
      s += std::to_string(dims_[i]);
    }
    return s;
  }

  bool contains(Element x) const { return x >= 0 && x < order_; }

  Element add(Element a, Element b) const {
    if (is_cyclic()) return mod(a + b, order_);
    auto ca = coords(a);
    const auto cb = coords(b);
    for (std::size_t i = 0; i < ca.size(); ++i) ca[i] = mod(ca[i] + cb[i], dims_[i]);
    return index(ca);
  }
  Element negate(Element a) const {
    if (is_cyclic()) return mod(-a, order_);
    auto ca = coords(a);
    for (std::size_t i = 0; i < ca.size(); ++i) ca[i] = mod(-ca[i], dims_[i]);
    return index(ca);
  }

  /// Coordinates: CRT residues mod p_j^{n_j} (cyclic) or lattice tuple.
  std::vector<std::int64_t> coords(Element x) const {
    const auto& sizes = axis_sizes_;
    std::vector<std::int64_t> c(sizes.size());
    if (is_cyclic()) {
      for (std::size_t j = 0; j < sizes.size(); ++j) c[j] = mod(x, sizes[j]);
    } else {
      for (std::size_t j = sizes.size(); j-- > 0;) {
        c[j] = x % sizes[j];
        x /= sizes[j];
      }
    }
    return c;
  }

  /// Inverse of coords().
  Element index(const std::vector<std::int64_t>& c) const {
    const auto& sizes = axis_sizes_;
    if (c.size() != sizes.size()) throw InvalidInput("coordinate arity mismatch");
    if (is_lattice()) {
      Element x = 0;
      for (std::size_t j = 0; j < sizes.size(); ++j) x = x * sizes[j] + mod(c[j], sizes[j]);
      return x;
    }
    // Chinese remaindering over pairwise coprime moduli.
    Element x = 0;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
      const std::int64_t mj = sizes[j];
      const std::int64_t rest = order_ / mj;
      const std::int64_t e = rest * mod_inverse(rest % mj, mj) % order_;
      x = mod(x + static_cast<std::int64_t>(static_cast<__int128>(mod(c[j], mj)) * e % order_),
              order_);
    }
    return x;
  }

  friend bool operator==(const GroupSpec& a, const GroupSpec& b) {
    return a.kind_ == b.kind_ && a.order_ == b.order_ && a.dims_ == b.dims_;
  }

 private:
  GroupSpec() = default;

  Kind kind_ = Kind::cyclic;
  std::int64_t order_ = 0;
  Factorization factorization_;
  std::vector<std::int64_t> dims_;
  std::vector<std::int64_t> axis_sizes_;
};

/// CRT coordinates of a cyclic-group element: residues mod p_j^{n_j}.
inline std::vector<std::int64_t> crt_coords(const GroupSpec& g, Element x) {
  if (!g.is_cyclic()) throw Unsupported("crt_coords: cyclic groups only");
  return g.coords(x);
}

inline Element from_crt_coords(const GroupSpec& g, const std::vector<std::int64_t>& c) {
  if (!g.is_cyclic()) throw Unsupported("from_crt_coords: cyclic groups only");
  return g.index(c);
}

/// A subgroup descriptor: the unique subgroup of a given order in Z_n, or the
/// layer along one axis of a lattice.
struct Subgroup {
  enum class Kind { cyclic_order, lattice_axis };
  Kind kind = Kind::cyclic_order;
  std::int64_t value = 1;

  static Subgroup of_order(std::int64_t order) { return {Kind::cyclic_order, order}; }
  static Subgroup axis(std::int64_t j) { return {Kind::lattice_axis, j}; }

  friend bool operator==(const Subgroup&, const Subgroup&) = default;
};

inline std::int64_t subgroup_order(const GroupSpec& g, const Subgroup& h) {
  if (h.kind == Subgroup::Kind::cyclic_order) {
    if (!g.is_cyclic() || h.value < 1 || g.order() % h.value != 0) {
      throw InvalidInput("no subgroup of order " + std::to_string(h.value) + " in Z_" + g.name());
    }
    return h.value;
  }
  if (!g.is_lattice() || h.value < 0 || h.value >= static_cast<std::int64_t>(g.dims().size())) {
    throw InvalidInput("bad lattice axis " + std::to_string(h.value));
  }
  return g.dims()[static_cast<std::size_t>(h.value)];
}

struct RadicalInfo {
  std::int64_t radical = 1;  // product of the distinct primes
  Subgroup subgroup;         // (n / radical) Z_n
};

inline RadicalInfo radical(const GroupSpec& g) {
  if (!g.is_cyclic()) throw Unsupported("radical: cyclic groups only");
  const std::int64_t r = radical_of(g.order());
  return {r, Subgroup::of_order(r)};
}

struct Coset {
  Subgroup subgroup;
  Element representative = 0;      // least element
  std::vector<Element> elements;   // sorted
};

/// Partition of the group into cosets of the subgroup, ordered by least element.
inline std::vector<Coset> cosets_of(const GroupSpec& g, const Subgroup& h) {
  const std::int64_t size = subgroup_order(g, h);
  std::vector<Coset> out;
  std::vector<char> seen(static_cast<std::size_t>(g.order()), 0);
  for (Element x = 0; x < g.order(); ++x) {
    if (seen[static_cast<std::size_t>(x)]) continue;
    Coset c{h, x, {}};
    c.elements.reserve(static_cast<std::size_t>(size));
    if (g.is_cyclic()) {
      const std::int64_t step = g.order() / size;
      for (std::int64_t t = 0; t < size; ++t) c.elements.push_back(mod(x + t * step, g.order()));
    } else {
      auto base = g.coords(x);
      const auto axis = static_cast<std::size_t>(h.value);
      for (std::int64_t t = 0; t < size; ++t) {
        base[axis] = t;
        c.elements.push_back(g.index(base));
      }
    }
    std::sort(c.elements.begin(), c.elements.end());
    for (auto e : c.elements) seen[static_cast<std::size_t>(e)] = 1;
    c.representative = c.elements.front();
    out.push_back(std::move(c));
  }
  return out;
}

/// The elementary relation families: cosets of every prime-order subgroup
/// (cyclic) or every axis line (lattice).
inline std::vector<Subgroup> elementary_subgroups(const GroupSpec& g) {
  std::vector<Subgroup> out;
  if (g.is_cyclic()) {
    for (const auto& pp : g.factorization()) out.push_back(Subgroup::of_order(pp.prime));
  } else {
    for (std::size_t j = 0; j < g.dims().size(); ++j) {
      out.push_back(Subgroup::axis(static_cast<std::int64_t>(j)));
    }
  }
  return out;
}

/// A finite subset of a group, kept strictly sorted, with a membership bitmap.
class Subset {
 public:
  explicit Subset(GroupSpec g) : group_(std::move(g)), bits_(words(group_.order()), 0) {}

  Subset(GroupSpec g, std::vector<Element> elements) : Subset(std::move(g)) {
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    for (auto x : elements) {
      if (!group_.contains(x)) {
        throw InvalidInput("element " + std::to_string(x) + " not in group " + group_.name());
      }
      set_bit(x);
    }
    elements_ = std::move(elements);
  }

  static Subset from_mask(const GroupSpec& g, std::uint64_t mask) {
    std::vector<Element> e;
    for (Element x = 0; x < g.order() && x < 64; ++x) {
      if (mask >> x & 1u) e.push_back(x);
    }
    return Subset(g, std::move(e));
  }

  const GroupSpec& group() const { return group_; }
  const std::vector<Element>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }
  bool contains(Element x) const {
    return group_.contains(x) && (bits_[static_cast<std::size_t>(x) / 64] >> (x % 64) & 1u);
  }
  auto begin() const { return elements_.begin(); }
  auto end() const { return elements_.end(); }

  /// Low 64 bits of the membership bitmap (the whole set when order <= 64).
  std::uint64_t mask() const { return bits_.empty() ? 0 : bits_[0]; }

  Subset translate(Element t) const {
    std::vector<Element> out;
    out.reserve(elements_.size());
    for (auto x : elements_) out.push_back(group_.add(x, t));
    return Subset(group_, std::move(out));
  }

  Subset with(Element x) const {
    auto e = elements_;
    e.push_back(x);
    return Subset(group_, std::move(e));
  }

  bool contains_all(const std::vector<Element>& xs) const {
    return std::all_of(xs.begin(), xs.end(), [&](Element x) { return contains(x); });
  }

  friend bool operator==(const Subset& a, const Subset& b) {
    return a.group_ == b.group_ && a.elements_ == b.elements_;
  }

 private:
  static std::size_t words(std::int64_t order) { return static_cast<std::size_t>((order + 63) / 64); }
  void set_bit(Element x) { bits_[static_cast<std::size_t>(x) / 64] |= std::uint64_t{1} << (x % 64); }

  GroupSpec group_;
  std::vector<Element> elements_;
  std::vector<std::uint64_t> bits_;
};

// ---------------------------------------------------------------------------
// Canonical text form: "n:r1,r2,..." for cyclic groups and
// "d1xd2x...:(a,b,..),(..)" for lattices.

inline std::string element_to_string(const GroupSpec& g, Element x) {
  if (g.is_cyclic()) return std::to_string(x);
  const auto c = g.coords(x);
  std::string s = "(";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(c[i]);
  }
  return s + ")";
}

inline std::string to_string(const Subset& e) {
  std::string s = e.group().name() + ":";
  bool first = true;
  for (auto x : e) {
    if (!first) s += ',';
    first = false;
    s += element_to_string(e.group(), x);
  }
  return s;
}

namespace detail {

inline std::int64_t parse_int(std::string_view s, std::string_view context) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw InvalidInput("bad integer '" + std::string(s) + "' in '" + std::string(context) + "'");
  }
  return v;
}

}  // namespace detail

inline Subset parse_subset(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw InvalidInput("subset must look like 'n:a,b,c' or 'd1xd2:(a,b),(c,d)'");
  }
  const GroupSpec g = GroupSpec::parse(text.substr(0, colon));
  const std::string_view body = text.substr(colon + 1);
  std::vector<Element> elems;
  if (g.is_cyclic()) {
    std::size_t start = 0;
    while (start < body.size()) {
      const std::size_t comma = body.find(',', start);
      const auto piece = body.substr(start, comma == body.npos ? body.npos : comma - start);
      const std::int64_t v = detail::parse_int(piece, text);
      if (v < 0 || v >= g.order()) {
        throw InvalidInput("residue " + std::to_string(v) + " out of range for Z_" + g.name());
      }
      elems.push_back(v);
      if (comma == body.npos) break;
      start = comma + 1;
    }
  } else {
    std::size_t pos = 0;
    while (pos < body.size()) {
      if (body[pos] == ',' || body[pos] == ' ') {
        ++pos;
        continue;
      }
      if (body[pos] != '(') throw InvalidInput("expected '(' in lattice subset");
      const std::size_t close = body.find(')', pos);
      if (close == body.npos) throw InvalidInput("unterminated tuple in lattice subset");
      std::vector<std::int64_t> c;
      const auto inner = body.substr(pos + 1, close - pos - 1);
      std::size_t s = 0;
      while (true) {
        const std::size_t comma = inner.find(',', s);
        c.push_back(detail::parse_int(inner.substr(s, comma == inner.npos ? inner.npos : comma - s), text));
        if (comma == inner.npos) break;
        s = comma + 1;
      }
      if (c.size() != g.dims().size()) throw InvalidInput("tuple arity does not match lattice");
      for (std::size_t j = 0; j < c.size(); ++j) {
        if (c[j] < 0 || c[j] >= g.dims()[j]) throw InvalidInput("lattice coordinate out of range");
      }
      elems.push_back(g.index(c));
      pos = close + 1;
    }
  }
  return Subset(g, std::move(elems));
}

}  // namespace qindep
