#pragma once

// Cyclotomic polynomials and the exact test for vanishing sums of roots of unity.
//
// A coefficient function f on Z_n is a relation iff sum_x f(x) zeta_n^x = 0,
// i.e. iff Phi_n divides sum_x f(x) X^x in Q[X].

#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qindep/arith.hpp"
#include "qindep/group.hpp"
#include "qindep/rational.hpp"

namespace qindep {

/// Integer polynomial, coefficient of X^i at index i.
using IntPoly = std::vector<std::int64_t>;

namespace detail {

inline void trim(IntPoly& p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
}

/// Exact quotient a / b for monic b, where b is known to divide a.
inline IntPoly exact_divide(IntPoly a, const IntPoly& b) {
  trim(a);
  const std::size_t db = b.size() - 1;
  if (a.size() < b.size()) throw std::logic_error("exact_divide: degree too small");
  IntPoly q(a.size() - db, 0);
  for (std::size_t i = a.size(); i-- > db;) {
    const std::int64_t c = a[i];
    if (c == 0) continue;
    q[i - db] = c;
    for (std::size_t k = 0; k <= db; ++k) {
      std::int64_t prod = 0;
      if (__builtin_mul_overflow(c, b[k], &prod) ||
          __builtin_sub_overflow(a[i - db + k], prod, &a[i - db + k])) {
        throw std::overflow_error("cyclotomic coefficient overflow");
      }
    }
  }
  for (std::size_t i = 0; i < db; ++i) {
    if (a[i] != 0) throw std::logic_error("exact_divide: non-zero remainder");
  }
  return q;
}

}  // namespace detail

/// Phi_n, computed as (X^n - 1) / prod_{d | n, d < n} Phi_d. Results are cached.
inline const IntPoly& cyclotomic_polynomial(std::int64_t n) {
  static std::mutex mu;
  static std::map<std::int64_t, IntPoly> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
  }
  if (n < 1) throw InvalidInput("cyclotomic_polynomial: n must be positive");
  IntPoly p(static_cast<std::size_t>(n) + 1, 0);
  p[0] = -1;
  p.back() = 1;
  for (const auto d : divisors(n)) {
    if (d == n) continue;
    p = detail::exact_divide(std::move(p), cyclotomic_polynomial(d));
  }
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(n, std::move(p)).first->second;
}

/// True iff sum_x f(x) zeta_n^x = 0 exactly. Terms may repeat elements.
inline bool cyclotomic_is_relation(std::int64_t n,
                                   const std::vector<std::pair<Element, Rational>>& terms) {
  const IntPoly& phi = cyclotomic_polynomial(n);
  const std::size_t deg = phi.size() - 1;
  std::vector<Rational> poly(static_cast<std::size_t>(n), Rational(0));
  for (const auto& [x, c] : terms) poly[static_cast<std::size_t>(mod(x, n))] += c;
  // Remainder modulo the monic Phi_n.
  for (std::size_t i = poly.size(); i-- > deg;) {
    if (poly[i].is_zero()) continue;
    const Rational c = poly[i];
    for (std::size_t k = 0; k <= deg; ++k) {
      if (phi[k] != 0) poly[i - deg + k] -= c * Rational(phi[k]);
    }
  }
  for (std::size_t i = 0; i < deg && i < poly.size(); ++i) {
    if (!poly[i].is_zero()) return false;
  }
  return true;
}

inline bool cyclotomic_is_relation(const GroupSpec& g,
                                   const std::vector<std::pair<Element, Rational>>& terms) {
  if (!g.is_cyclic()) throw Unsupported("cyclotomic_is_relation: cyclic groups only");
  return cyclotomic_is_relation(g.order(), terms);
}

/// A linear map Q[G] -> Q^D with integer images whose kernel is exactly the
/// relation space. For Z_n this is x -> X^x mod Phi_n in the power basis; for a
/// lattice it is the tensor product of the maps Q^{n_j} -> Q^{n_j} / <1>.
struct QuotientEmbedding {
  GroupSpec group;
  std::size_t dim = 0;
  std::vector<std::vector<std::int64_t>> images;  // images[x], length dim
};

inline QuotientEmbedding cyclotomic_embedding(const GroupSpec& g) {
  if (!g.is_cyclic()) throw Unsupported("cyclotomic_embedding: cyclic groups only");
  const IntPoly& phi = cyclotomic_polynomial(g.order());
  const std::size_t deg = phi.size() - 1;
  QuotientEmbedding e{g, deg, {}};
  std::vector<std::int64_t> cur(deg, 0);
  cur[0] = 1;
  if (deg == 0) throw std::logic_error("degenerate cyclotomic polynomial");
  for (Element x = 0; x < g.order(); ++x) {
    e.images.push_back(cur);
    // Multiply by X and reduce by the monic Phi_n.
    const std::int64_t top = cur[deg - 1];
    for (std::size_t k = deg - 1; k > 0; --k) cur[k] = cur[k - 1];
    cur[0] = 0;
    if (top != 0) {
      for (std::size_t k = 0; k < deg; ++k) cur[k] -= top * phi[k];
    }
  }
  return e;
}

inline QuotientEmbedding lattice_embedding(const GroupSpec& g) {
  if (!g.is_lattice()) throw Unsupported("lattice_embedding: lattices only");
  const auto& dims = g.dims();
  QuotientEmbedding e{g, static_cast<std::size_t>(g.free_rank()), {}};
  for (Element x = 0; x < g.order(); ++x) {
    const auto c = g.coords(x);
    std::vector<std::int64_t> img(e.dim, 0);
    // Iterate over target tuples (y_j in [1, n_j)) in row-major order.
    std::vector<std::int64_t> y(dims.size(), 1);
    for (std::size_t idx = 0; idx < e.dim; ++idx) {
      std::int64_t v = 1;
      for (std::size_t j = 0; j < dims.size() && v != 0; ++j) {
        if (c[j] == 0) {
          v = -v;
        } else if (c[j] != y[j]) {
          v = 0;
        }
      }
      img[idx] = v;
      for (std::size_t j = dims.size(); j-- > 0;) {
        if (++y[j] < dims[j]) break;
        y[j] = 1;
      }
    }
    e.images.push_back(std::move(img));
  }
  return e;
}

inline QuotientEmbedding quotient_embedding(const GroupSpec& g) {
  return g.is_cyclic() ? cyclotomic_embedding(g) : lattice_embedding(g);
}

}  // namespace qindep
