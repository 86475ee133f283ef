#pragma once

// Incremental quasi-independence maintenance and the branch-and-bound search
// for large quasi-independent sets.

#include <algorithm>
#include <chrono>
#include <map>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qindep/arith.hpp"
#include "qindep/group.hpp"
#include "qindep/linalg.hpp"
#include "qindep/relations.hpp"

namespace qindep {

namespace detail {

/// Arithmetic modulo the Mersenne prime 2^61 - 1.
struct Mod61 {
  static constexpr std::uint64_t p = (std::uint64_t{1} << 61) - 1;

  static std::uint64_t reduce(unsigned __int128 v) {
    std::uint64_t r = static_cast<std::uint64_t>(v & p) + static_cast<std::uint64_t>(v >> 61);
    r = (r & p) + (r >> 61);
    return r >= p ? r - p : r;
  }
  static std::uint64_t from(std::int64_t v) {
    const std::int64_t r = v % static_cast<std::int64_t>(p);
    return static_cast<std::uint64_t>(r < 0 ? r + static_cast<std::int64_t>(p) : r);
  }
  static std::uint64_t add(std::uint64_t a, std::uint64_t b) {
    const std::uint64_t r = a + b;
    return r >= p ? r - p : r;
  }
  static std::uint64_t sub(std::uint64_t a, std::uint64_t b) { return a >= b ? a - b : a + p - b; }
  static std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
    return reduce(static_cast<unsigned __int128>(a) * b);
  }
  static std::uint64_t neg(std::uint64_t a) { return a == 0 ? 0 : p - a; }
  static std::uint64_t inv(std::uint64_t a) {
    std::uint64_t result = 1, base = a, e = p - 2;
    while (e) {
      if (e & 1) result = mul(result, base);
      base = mul(base, base);
      e >>= 1;
    }
    return result;
  }
  static bool is_sign(std::uint64_t a) { return a == 0 || a == 1 || a == p - 1; }
};

}  // namespace detail

/// Keeps a quasi-independent set together with an echelon basis of the images
/// of its members (with the combinations producing each row) and an RREF basis
/// of the relations it supports. Additions are checked by searching only the
/// relations that involve the new element.
///
/// Linear algebra runs modulo the prime 2^61 - 1. This is exact for the
/// question asked: a {0,+-1} vector v lies in the rational kernel of the
/// integer embedding matrix M iff M v vanishes modulo the prime, because every
/// entry of M v is bounded by the column sums of |M|, which are checked to be
/// far below the modulus.
class IncrementalQi {
 public:
  using F = detail::Mod61;
  using Row = std::vector<std::uint64_t>;

  explicit IncrementalQi(const GroupSpec& g, Budget budget = {}) : group_(g), budget_(budget) {
    const auto emb = embedding_for(g);
    dim_ = emb->dim;
    std::vector<std::int64_t> bound(dim_, 0);
    images_.reserve(emb->images.size());
    for (const auto& img : emb->images) {
      Row r(dim_);
      for (std::size_t k = 0; k < dim_; ++k) {
        r[k] = F::from(img[k]);
        bound[k] += img[k] < 0 ? -img[k] : img[k];
      }
      images_.push_back(std::move(r));
    }
    for (auto b : bound) {
      if (b >= (std::int64_t{1} << 40)) throw Unsupported("IncrementalQi: embedding entries too large");
    }
  }

  const GroupSpec& group() const { return group_; }
  const std::vector<Element>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  std::size_t kernel_dimension() const { return kernel_.size(); }
  bool contains(Element x) const {
    return std::find(members_.begin(), members_.end(), x) != members_.end();
  }

  /// Would E + x still be quasi-independent?
  Decision test(Element x) const {
    if (contains(x)) return Decision::yes;
    return probe(x).verdict;
  }

  /// Adds x when E + x is quasi-independent; otherwise leaves the state alone.
  Decision try_add(Element x) {
    if (contains(x)) return Decision::yes;
    Probe p = probe(x);
    if (p.verdict != Decision::yes) return p.verdict;
    commit(x, std::move(p));
    return Decision::yes;
  }

  /// Undoes the most recent successful addition.
  void pop() {
    Undo u = std::move(undo_.back());
    undo_.pop_back();
    members_.pop_back();
    if (u.added_row) {
      rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(u.row_pos));
      leads_.erase(leads_.begin() + static_cast<std::ptrdiff_t>(u.row_pos));
      combos_.erase(combos_.begin() + static_cast<std::ptrdiff_t>(u.row_pos));
      for (auto& r : kernel_) r.pop_back();
    } else {
      kernel_ = std::move(u.kernel);
      kernel_pivots_ = std::move(u.kernel_pivots);
    }
    for (auto& c : combos_) c.pop_back();
  }

  /// Number of sign-vector searches run so far.
  std::uint64_t nodes() const { return nodes_; }

 private:
  struct Probe {
    Decision verdict = Decision::yes;
    bool independent = true;
    Row residual;
    Row combo;  // over members + x
    std::size_t lead = 0;
  };
  struct Undo {
    bool added_row = false;
    std::size_t row_pos = 0;
    std::vector<Row> kernel;
    std::vector<std::size_t> kernel_pivots;
  };

  Probe probe(Element x) const {
    Probe p;
    const std::size_t k = members_.size();
    p.residual = images_[static_cast<std::size_t>(x)];
    p.combo.assign(k + 1, 0);
    p.combo[k] = 1;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const std::size_t c = leads_[r];
      const std::uint64_t f = p.residual[c];
      if (f == 0) continue;
      const Row& row = rows_[r];
      for (std::size_t i = c; i < dim_; ++i) {
        if (row[i]) p.residual[i] = F::sub(p.residual[i], F::mul(f, row[i]));
      }
      const Row& comb = combos_[r];
      for (std::size_t j = 0; j < k; ++j) {
        if (comb[j]) p.combo[j] = F::sub(p.combo[j], F::mul(f, comb[j]));
      }
    }
    p.lead = 0;
    while (p.lead < dim_ && p.residual[p.lead] == 0) ++p.lead;
    if (p.lead < dim_) return p;
    p.independent = false;
    ++nodes_;
    p.verdict = sign_search(p.combo);
    return p;
  }

  /// Is there a {0,+-1} vector in offset + span(kernel)? The offset has a 1 in
  /// the last column, where every kernel row vanishes. Answers yes/no/undecided
  /// from the point of view of quasi-independence (yes = no such vector).
  Decision sign_search(Row offset) const {
    const std::size_t d = kernel_.size();
    const std::size_t cols = offset.size();
    if (d > budget_.dim_cap) return Decision::undecided;
    for (std::size_t i = 0; i < d; ++i) {
      const std::uint64_t f = offset[kernel_pivots_[i]];
      if (f == 0) continue;
      for (std::size_t c = 0; c < cols - 1; ++c) {
        if (kernel_[i][c]) offset[c] = F::sub(offset[c], F::mul(f, kernel_[i][c]));
      }
    }
    // Columns settle once every remaining row vanishes on them.
    std::vector<std::vector<std::size_t>> settle(d + 1);
    std::vector<char> is_pivot(cols, 0);
    for (auto pv : kernel_pivots_) is_pivot[pv] = 1;
    for (std::size_t c = 0; c < cols; ++c) {
      if (is_pivot[c]) continue;
      std::size_t last = 0;
      for (std::size_t i = 0; i < d; ++i) {
        if (c < cols - 1 && kernel_[i][c]) last = i + 1;
      }
      settle[last].push_back(c);
    }
    Row partial = offset;
    std::uint64_t budget = budget_.node_cap;
    bool exhausted_budget = false;
    auto dfs = [&](auto&& self, std::size_t i) -> bool {
      if (budget-- == 0) {
        exhausted_budget = true;
        return false;
      }
      for (auto c : settle[i]) {
        if (!F::is_sign(partial[c])) return false;
      }
      if (i == d) return true;
      const Row& row = kernel_[i];
      for (int t : {0, 1, -1}) {
        if (t != 0) {
          for (std::size_t c = 0; c < cols - 1; ++c) {
            if (row[c]) partial[c] = t > 0 ? F::add(partial[c], row[c]) : F::sub(partial[c], row[c]);
          }
        }
        const bool found = self(self, i + 1);
        if (t != 0) {
          for (std::size_t c = 0; c < cols - 1; ++c) {
            if (row[c]) partial[c] = t > 0 ? F::sub(partial[c], row[c]) : F::add(partial[c], row[c]);
          }
        }
        if (found) return true;
        if (exhausted_budget) return false;
      }
      return false;
    };
    const bool found = dfs(dfs, 0);
    if (found) return Decision::no;
    return exhausted_budget ? Decision::undecided : Decision::yes;
  }

  void commit(Element x, Probe p) {
    Undo u;
    const std::size_t k = members_.size();
    members_.push_back(x);
    for (auto& c : combos_) c.push_back(0);
    if (p.independent) {
      const std::uint64_t inv = F::inv(p.residual[p.lead]);
      for (auto& v : p.residual) v = F::mul(v, inv);
      for (auto& v : p.combo) v = F::mul(v, inv);
      std::size_t pos = 0;
      while (pos < leads_.size() && leads_[pos] < p.lead) ++pos;
      rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(p.residual));
      leads_.insert(leads_.begin() + static_cast<std::ptrdiff_t>(pos), p.lead);
      combos_.insert(combos_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(p.combo));
      u.added_row = true;
      u.row_pos = pos;
      for (auto& r : kernel_) r.push_back(0);
    } else {
      u.kernel = kernel_;
      u.kernel_pivots = kernel_pivots_;
      for (auto& r : kernel_) r.push_back(0);
      kernel_.push_back(std::move(p.combo));
      rref_kernel(k + 1);
    }
    undo_.push_back(std::move(u));
  }

  void rref_kernel(std::size_t cols) {
    kernel_pivots_.clear();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < kernel_.size(); ++c) {
      std::size_t sel = r;
      while (sel < kernel_.size() && kernel_[sel][c] == 0) ++sel;
      if (sel == kernel_.size()) continue;
      std::swap(kernel_[r], kernel_[sel]);
      const std::uint64_t inv = F::inv(kernel_[r][c]);
      for (auto& v : kernel_[r]) v = F::mul(v, inv);
      for (std::size_t i = 0; i < kernel_.size(); ++i) {
        if (i == r || kernel_[i][c] == 0) continue;
        const std::uint64_t f = kernel_[i][c];
        for (std::size_t j = 0; j < cols; ++j) {
          if (kernel_[r][j]) kernel_[i][j] = F::sub(kernel_[i][j], F::mul(f, kernel_[r][j]));
        }
      }
      kernel_pivots_.push_back(c);
      ++r;
    }
    kernel_.resize(r);
  }

  GroupSpec group_;
  Budget budget_;
  std::size_t dim_ = 0;
  std::vector<Row> images_;
  std::vector<Element> members_;
  std::vector<Row> rows_;       // echelon rows of member images
  std::vector<std::size_t> leads_;
  std::vector<Row> combos_;     // rows_[r] = sum_j combos_[r][j] * image(members_[j])
  std::vector<Row> kernel_;     // RREF of relations supported on members_
  std::vector<std::size_t> kernel_pivots_;
  std::vector<Undo> undo_;
  mutable std::uint64_t nodes_ = 0;
};

// ---------------------------------------------------------------------------
// Symmetry

/// Quasi-independence preserving symmetries used to prune the search: the
/// per-axis symmetric groups for lattices and square-free cyclic groups (CRT
/// axes), the affine group x -> u x + t otherwise. For even n the swaps inside
/// single Z_2-cosets are added.
class SearchSymmetry {
 public:
  enum class Kind { none, coordinate, affine };

  static SearchSymmetry for_group(const GroupSpec& g) {
    SearchSymmetry s;
    s.order_ = g.order();
    s.even_ = g.is_cyclic() && g.order() % 2 == 0;
    if (g.is_lattice() || g.square_free()) {
      s.kind_ = Kind::coordinate;
      s.axes_ = g.axis_sizes();
      for (Element x = 0; x < g.order(); ++x) s.coords_.push_back(g.coords(x));
    } else {
      s.kind_ = Kind::affine;
      for (std::int64_t u = 1; u < g.order(); ++u) {
        if (std::gcd(u, g.order()) == 1) s.units_.push_back(u);
      }
    }
    return s;
  }

  static SearchSymmetry trivial(std::int64_t order) {
    SearchSymmetry s;
    s.order_ = order;
    return s;
  }

  Kind kind() const { return kind_; }

  std::string describe() const {
    switch (kind_) {
      case Kind::none: return "none";
      case Kind::coordinate:
        return std::string("per-axis symmetric groups") + (even_ ? " and Z_2-coset swaps" : "") +
               ", orbit branching on pointwise stabilizers";
      case Kind::affine:
        return std::string("affine maps x -> ux+t") + (even_ ? " and Z_2-coset swaps" : "") +
               ", orbit branching on pointwise stabilizers";
    }
    return "?";
  }

  /// Partition of `pool` into orbits of the pointwise stabilizer of `fixed`,
  /// each sorted, ordered by least element. `pool` must be invariant.
  std::vector<std::vector<Element>> orbits(const std::vector<Element>& fixed,
                                           const std::vector<Element>& pool) const {
    std::vector<std::vector<Element>> out;
    if (kind_ == Kind::none) {
      for (auto x : pool) out.push_back({x});
      return out;
    }
    if (fixed.empty()) {
      // Transitive on the whole group.
      if (!pool.empty()) out.push_back(pool);
      return out;
    }
    if (kind_ == Kind::coordinate) {
      std::vector<std::vector<char>> used(axes_.size());
      for (std::size_t j = 0; j < axes_.size(); ++j) used[j].assign(static_cast<std::size_t>(axes_[j]), 0);
      for (auto e : fixed) {
        const auto& c = coords_[static_cast<std::size_t>(e)];
        for (std::size_t j = 0; j < c.size(); ++j) used[j][static_cast<std::size_t>(c[j])] = 1;
      }
      std::map<std::vector<std::int64_t>, std::size_t> index;
      for (auto x : pool) {
        std::vector<std::int64_t> sig = coords_[static_cast<std::size_t>(x)];
        for (std::size_t j = 0; j < sig.size(); ++j) {
          if (!used[j][static_cast<std::size_t>(sig[j])]) sig[j] = -1;
        }
        // Pool members never share a Z_2-coset with a fixed point, so the
        // swap of their coset fixes everything already chosen.
        if (even_) sig[0] = -1;
        auto [it, inserted] = index.emplace(std::move(sig), out.size());
        if (inserted) out.emplace_back();
        out[it->second].push_back(x);
      }
      return out;
    }
    // Affine: stabilizer elements (u, t) fixing every point of `fixed`.
    std::vector<std::pair<std::int64_t, std::int64_t>> stab;
    const Element a = fixed.front();
    for (auto u : units_) {
      const std::int64_t t = mod(a - u * a, order_);
      bool ok = true;
      for (auto e : fixed) {
        if (mod(u * e + t, order_) != e) {
          ok = false;
          break;
        }
      }
      if (ok) stab.emplace_back(u, t);
    }
    std::vector<std::int64_t> parent(static_cast<std::size_t>(order_));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::int64_t x) {
      while (parent[static_cast<std::size_t>(x)] != x) {
        parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
        x = parent[static_cast<std::size_t>(x)];
      }
      return x;
    };
    auto unite = [&](std::int64_t x, std::int64_t y) {
      const auto rx = find(x), ry = find(y);
      if (rx != ry) parent[static_cast<std::size_t>(std::max(rx, ry))] = std::min(rx, ry);
    };
    std::vector<char> in_pool(static_cast<std::size_t>(order_), 0);
    for (auto x : pool) in_pool[static_cast<std::size_t>(x)] = 1;
    for (auto x : pool) {
      for (auto [u, t] : stab) unite(x, mod(u * x + t, order_));
      if (even_ && in_pool[static_cast<std::size_t>(mod(x + order_ / 2, order_))]) unite(x, mod(x + order_ / 2, order_));
    }
    std::map<std::int64_t, std::size_t> index;
    for (auto x : pool) {
      auto [it, inserted] = index.emplace(find(x), out.size());
      if (inserted) out.emplace_back();
      out[it->second].push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  Kind kind_ = Kind::none;
  std::int64_t order_ = 0;
  bool even_ = false;
  std::vector<std::int64_t> axes_;
  std::vector<std::vector<std::int64_t>> coords_;
  std::vector<std::int64_t> units_;
};

// ---------------------------------------------------------------------------
// Branch and bound

struct SearchBudget {
  std::uint64_t node_cap = 2'000'000;
  double time_cap_seconds = 0;  // 0 disables the time cap
  Budget tester{};
  bool use_symmetry = true;
  /// Extra (subgroup order, capacity) pairs for cyclic groups: a subset of a
  /// coset of the order-d subgroup is quasi-independent iff its translate is
  /// quasi-independent in Z_d, so each coset holds at most Psi(d) points.
  std::vector<std::pair<std::int64_t, std::int64_t>> coset_capacities{};
};

struct SearchStats {
  std::uint64_t nodes = 0;
  std::uint64_t subspace_searches = 0;
  bool exhausted = false;      // the whole tree was explored
  bool undecided_hits = false; // some extension test was undecided
  double seconds = 0;
  std::string symmetry;
};

struct SearchResult {
  std::vector<Element> best;
  bool optimal = false;  // exhausted without undecided tests
  SearchStats stats;
};

namespace detail {

class BranchAndBound {
 public:
  BranchAndBound(const GroupSpec& g, const SearchBudget& budget)
      : g_(g), budget_(budget), engine_(g, budget.tester),
        sym_(budget.use_symmetry ? SearchSymmetry::for_group(g) : SearchSymmetry::trivial(g.order())) {
    // Cosets of every elementary subgroup; a quasi-independent set omits at
    // least one point of each.
    for (const auto& h : elementary_subgroups(g)) {
      Family f;
      f.id.assign(static_cast<std::size_t>(g.order()), 0);
      const auto cs = cosets_of(g, h);
      f.capacity = subgroup_order(g, h) - 1;
      f.count = cs.size();
      for (std::size_t i = 0; i < cs.size(); ++i) {
        for (auto x : cs[i].elements) f.id[static_cast<std::size_t>(x)] = i;
      }
      families_.push_back(std::move(f));
    }
    for (auto [d, cap] : budget.coset_capacities) {
      if (!g.is_cyclic() || g.order() % d != 0) throw InvalidInput("coset capacity: order must divide n");
      Family f;
      f.id.assign(static_cast<std::size_t>(g.order()), 0);
      const std::int64_t step = g.order() / d;
      f.capacity = cap;
      f.count = static_cast<std::size_t>(step);
      for (Element x = 0; x < g.order(); ++x) f.id[static_cast<std::size_t>(x)] = static_cast<std::size_t>(x % step);
      families_.push_back(std::move(f));
    }
  }

  SearchResult run(const std::vector<Element>& incumbent) {
    start_ = std::chrono::steady_clock::now();
    best_ = incumbent;
    std::vector<Element> pool(static_cast<std::size_t>(g_.order()));
    std::iota(pool.begin(), pool.end(), 0);
    const bool complete = recurse(pool);
    SearchResult out;
    out.best = best_;
    std::sort(out.best.begin(), out.best.end());
    out.stats.nodes = nodes_;
    out.stats.subspace_searches = engine_.nodes();
    out.stats.exhausted = complete;
    out.stats.undecided_hits = undecided_;
    out.stats.symmetry = sym_.describe();
    out.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    out.optimal = complete && !undecided_;
    return out;
  }

 private:
  struct Family {
    std::vector<std::size_t> id;
    std::int64_t capacity = 0;
    std::size_t count = 0;
  };

  std::int64_t upper_bound(const std::vector<Element>& pool) const {
    std::int64_t best = static_cast<std::int64_t>(pool.size());
    for (const auto& f : families_) {
      std::vector<std::int64_t> in_e(f.count, 0), in_pool(f.count, 0);
      for (auto x : engine_.members()) ++in_e[f.id[static_cast<std::size_t>(x)]];
      for (auto x : pool) ++in_pool[f.id[static_cast<std::size_t>(x)]];
      std::int64_t total = 0;
      for (std::size_t c = 0; c < f.count; ++c) total += std::min(in_pool[c], f.capacity - in_e[c]);
      best = std::min(best, total);
    }
    return best;
  }

  bool out_of_budget() {
    if (nodes_ > budget_.node_cap) return true;
    if (budget_.time_cap_seconds > 0 && (nodes_ & 255) == 0) {
      const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
      if (t > budget_.time_cap_seconds) timed_out_ = true;
    }
    return timed_out_;
  }

  /// Returns false when the budget cut the subtree short.
  bool recurse(const std::vector<Element>& pool_in) {
    ++nodes_;
    if (out_of_budget()) return false;
    const auto size = static_cast<std::int64_t>(engine_.size());
    if (size > static_cast<std::int64_t>(best_.size())) best_ = engine_.members();
    const auto target = static_cast<std::int64_t>(best_.size());
    if (size + upper_bound(pool_in) <= target) return true;

    std::vector<Element> pool;
    pool.reserve(pool_in.size());
    for (auto x : pool_in) {
      const Decision d = engine_.test(x);
      if (d == Decision::yes) pool.push_back(x);
      if (d == Decision::undecided) undecided_ = true;
    }
    if (size + upper_bound(pool) <= target) return true;

    const auto orbits = sym_.orbits(engine_.members(), pool);
    std::vector<char> excluded(static_cast<std::size_t>(g_.order()), 0);
    bool complete = true;
    for (const auto& orbit : orbits) {
      const Element r = orbit.front();
      std::vector<Element> child;
      child.reserve(pool.size());
      for (auto x : pool) {
        if (x != r && !excluded[static_cast<std::size_t>(x)]) child.push_back(x);
      }
      if (engine_.try_add(r) == Decision::yes) {
        if (!recurse(child)) complete = false;
        engine_.pop();
      }
      if (!complete) return false;
      for (auto x : orbit) excluded[static_cast<std::size_t>(x)] = 1;
      std::vector<Element> rest;
      for (auto x : pool) {
        if (!excluded[static_cast<std::size_t>(x)]) rest.push_back(x);
      }
      if (size + upper_bound(rest) <= static_cast<std::int64_t>(best_.size())) break;
    }
    return complete;
  }

  GroupSpec g_;
  SearchBudget budget_;
  IncrementalQi engine_;
  SearchSymmetry sym_;
  std::vector<Family> families_;
  std::vector<Element> best_;
  std::uint64_t nodes_ = 0;
  bool undecided_ = false;
  bool timed_out_ = false;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Searches for a quasi-independent set strictly larger than `incumbent`
/// (which must itself be quasi-independent). Deterministic for fixed inputs.
inline SearchResult branch_and_bound(const GroupSpec& g, const std::vector<Element>& incumbent,
                                     const SearchBudget& budget = {}) {
  detail::BranchAndBound bb(g, budget);
  return bb.run(incumbent);
}

}  // namespace qindep
