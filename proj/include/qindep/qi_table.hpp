#pragma once

// Bitmask table of quasi-independence for every subset of a small group.
//
// Built without the structured basis: every {0,+-1} vector in the kernel of the
// quotient embedding is enumerated once, its support is marked, and the marks
// are closed upwards under inclusion.

#include <cstdint>
#include <numeric>
#include <vector>

#include "qindep/arith.hpp"
#include "qindep/cyclotomic.hpp"
#include "qindep/group.hpp"
#include "qindep/linalg.hpp"

namespace qindep {

class QiTable {
 public:
  static constexpr std::int64_t kMaxOrder = 26;

  static QiTable build(const GroupSpec& g) {
    if (g.order() > kMaxOrder) {
      throw InvalidInput("QiTable: group order " + std::to_string(g.order()) + " exceeds " +
                         std::to_string(kMaxOrder));
    }
    QiTable t;
    t.group_ = g;
    const auto n = static_cast<std::size_t>(g.order());
    t.bad_.assign(std::size_t{1} << n, 0);

    const QuotientEmbedding emb = quotient_embedding(g);
    std::vector<Vec> m(emb.dim, Vec(n, Rational(0)));
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t k = 0; k < emb.dim; ++k) m[k][x] = emb.images[x][k];
    }
    const Rref r = rref(nullspace(m, n), n);
    t.enumerate(r);

    for (std::size_t b = 0; b < n; ++b) {
      const std::uint64_t bit = std::uint64_t{1} << b;
      for (std::uint64_t mask = 0; mask < t.bad_.size(); ++mask) {
        if ((mask & bit) && t.bad_[mask ^ bit]) t.bad_[mask] = 1;
      }
    }
    return t;
  }

  const GroupSpec& group() const { return group_; }
  bool quasi_independent(std::uint64_t mask) const { return bad_[mask] == 0; }
  std::uint64_t quasi_relation_supports() const { return supports_; }
  std::size_t size() const { return bad_.size(); }

 private:
  // Every column scaled to integers; pivot columns carry the sign choice itself.
  void enumerate(const Rref& r) {
    const std::size_t d = r.rank();
    const std::size_t n = r.cols;
    std::vector<char> is_pivot(n, 0);
    for (auto p : r.pivots) is_pivot[p] = 1;
    for (std::size_t c = 0; c < n; ++c) {
      if (!is_pivot[c]) free_.push_back(c);
    }
    const std::size_t f = free_.size();
    scale_.assign(f, 1);
    for (std::size_t k = 0; k < f; ++k) {
      for (std::size_t i = 0; i < d; ++i) {
        const auto den = r.rows[i][free_[k]].small_den();
        scale_[k] = std::lcm(scale_[k], den);
      }
    }
    rows_.assign(d, std::vector<std::int64_t>(f, 0));
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t k = 0; k < f; ++k) {
        const Rational& v = r.rows[i][free_[k]];
        if (!v.is_small()) throw std::overflow_error("QiTable: coefficient too large");
        rows_[i][k] = v.small_num() * (scale_[k] / v.small_den());
      }
    }
    suffix_.assign(d + 1, std::vector<std::int64_t>(f, 0));
    for (std::size_t i = d; i-- > 0;) {
      for (std::size_t k = 0; k < f; ++k) suffix_[i][k] = suffix_[i + 1][k] + std::abs(rows_[i][k]);
    }
    pivots_ = r.pivots;
    partial_.assign(f, 0);
    dfs(0, 0);
  }

  void dfs(std::size_t i, std::uint64_t pivot_mask) {
    const std::size_t f = free_.size();
    for (std::size_t k = 0; k < f; ++k) {
      const std::int64_t ap = std::abs(partial_[k]);
      const std::int64_t l = scale_[k];
      const std::int64_t dist = ap >= l ? ap - l : std::min(ap, l - ap);
      if (dist > suffix_[i][k]) return;
    }
    if (i == rows_.size()) {
      if (pivot_mask == 0) return;
      std::uint64_t mask = pivot_mask;
      for (std::size_t k = 0; k < f; ++k) {
        if (partial_[k] != 0) mask |= std::uint64_t{1} << free_[k];
      }
      if (!bad_[mask]) {
        bad_[mask] = 1;
        ++supports_;
      }
      return;
    }
    dfs(i + 1, pivot_mask);
    for (int s : {1, -1}) {
      // The first non-zero pivot is +1; negation gives the same support.
      if (pivot_mask == 0 && s < 0) continue;
      for (std::size_t k = 0; k < f; ++k) partial_[k] += s * rows_[i][k];
      dfs(i + 1, pivot_mask | std::uint64_t{1} << pivots_[i]);
      for (std::size_t k = 0; k < f; ++k) partial_[k] -= s * rows_[i][k];
    }
  }

  GroupSpec group_ = GroupSpec::cyclic(2);
  std::vector<std::uint8_t> bad_;
  std::uint64_t supports_ = 0;
  std::vector<std::size_t> free_;
  std::vector<std::size_t> pivots_;
  std::vector<std::int64_t> scale_;
  std::vector<std::vector<std::int64_t>> rows_;
  std::vector<std::vector<std::int64_t>> suffix_;
  std::vector<std::int64_t> partial_;
};

}  // namespace qindep
