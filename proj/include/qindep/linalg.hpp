#pragma once

// Dense exact linear algebra over the rationals.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "qindep/rational.hpp"

namespace qindep {

using Vec = std::vector<Rational>;

/// Reduced row-echelon form: every row has a leading 1 at pivots[i], and every
/// other row is zero in that column. Zero rows are dropped.
struct Rref {
  std::size_t cols = 0;
  std::vector<Vec> rows;
  std::vector<std::size_t> pivots;

  std::size_t rank() const { return rows.size(); }
};

inline Rref rref(std::vector<Vec> m, std::size_t cols) {
  Rref out;
  out.cols = cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
    std::size_t sel = r;
    while (sel < m.size() && m[sel][c].is_zero()) ++sel;
    if (sel == m.size()) continue;
    std::swap(m[r], m[sel]);
    const Rational inv = m[r][c].reciprocal();
    for (std::size_t k = c; k < cols; ++k) {
      if (!m[r][k].is_zero()) m[r][k] *= inv;
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == r || m[i][c].is_zero()) continue;
      const Rational f = m[i][c];
      for (std::size_t k = c; k < cols; ++k) {
        if (!m[r][k].is_zero()) m[i][k] -= f * m[r][k];
      }
    }
    out.pivots.push_back(c);
    ++r;
  }
  m.resize(r);
  out.rows = std::move(m);
  return out;
}

/// Basis of {x : A x = 0} for a matrix given by rows of length `cols`.
/// Each basis vector has a 1 in one free column and 0 in the other free columns.
inline std::vector<Vec> nullspace(const std::vector<Vec>& a, std::size_t cols) {
  const Rref r = rref(a, cols);
  std::vector<char> is_pivot(cols, 0);
  for (auto p : r.pivots) is_pivot[p] = 1;
  std::vector<Vec> out;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    Vec v(cols, Rational(0));
    v[f] = 1;
    for (std::size_t i = 0; i < r.rows.size(); ++i) v[r.pivots[i]] = -r.rows[i][f];
    out.push_back(std::move(v));
  }
  return out;
}

inline std::size_t rank(const std::vector<Vec>& m, std::size_t cols) { return rref(m, cols).rank(); }

/// Builds an echelon basis incrementally and reports whether a new vector is
/// independent of the ones accepted so far.
class IncrementalRank {
 public:
  explicit IncrementalRank(std::size_t cols) : cols_(cols) {}

  /// Adds v if it is independent of the current span; returns true if added.
  bool add(Vec v) {
    reduce(v);
    std::size_t lead = 0;
    while (lead < cols_ && v[lead].is_zero()) ++lead;
    if (lead == cols_) return false;
    const Rational inv = v[lead].reciprocal();
    for (auto& x : v) {
      if (!x.is_zero()) x *= inv;
    }
    // Keep rows ordered by leading column.
    std::size_t pos = 0;
    while (pos < leads_.size() && leads_[pos] < lead) ++pos;
    rows_.insert(rows_.begin() + static_cast<std::ptrdiff_t>(pos), std::move(v));
    leads_.insert(leads_.begin() + static_cast<std::ptrdiff_t>(pos), lead);
    return true;
  }

  bool in_span(Vec v) const {
    reduce(v);
    for (const auto& x : v) {
      if (!x.is_zero()) return false;
    }
    return true;
  }

  std::size_t rank() const { return rows_.size(); }

 private:
  void reduce(Vec& v) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const std::size_t c = leads_[i];
      if (v[c].is_zero()) continue;
      const Rational f = v[c];
      for (std::size_t k = c; k < cols_; ++k) {
        if (!rows_[i][k].is_zero()) v[k] -= f * rows_[i][k];
      }
    }
  }

  std::size_t cols_;
  std::vector<Vec> rows_;
  std::vector<std::size_t> leads_;
};

}  // namespace qindep
