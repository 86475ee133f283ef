#pragma once

// Relation spaces, structured bases, and the (quasi-)independence deciders.
//
// A relation on a subset E is a rational coefficient function supported on E
// lying in the relation space of the group; a quasi-relation is one with
// coefficients in {0, +1, -1}. E is independent (quasi-independent) when it
// supports no non-zero relation (quasi-relation).

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qindep/arith.hpp"
#include "qindep/cyclotomic.hpp"
#include "qindep/group.hpp"
#include "qindep/linalg.hpp"
#include "qindep/rational.hpp"

namespace qindep {

// ---------------------------------------------------------------------------
// Relation

struct Relation {
  GroupSpec group;
  std::vector<std::pair<Element, Rational>> terms;  // sorted by element, non-zero

  explicit Relation(GroupSpec g) : group(std::move(g)) {}
  Relation(GroupSpec g, std::vector<std::pair<Element, Rational>> t) : group(std::move(g)) {
    std::sort(t.begin(), t.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [x, c] : t) {
      if (!terms.empty() && terms.back().first == x) {
        terms.back().second += c;
      } else {
        terms.emplace_back(x, std::move(c));
      }
    }
    std::erase_if(terms, [](const auto& p) { return p.second.is_zero(); });
  }

  /// Characteristic function of a set of elements.
  static Relation indicator(const GroupSpec& g, const std::vector<Element>& xs, int sign = 1) {
    std::vector<std::pair<Element, Rational>> t;
    for (auto x : xs) t.emplace_back(x, Rational(sign));
    return Relation(g, std::move(t));
  }

  bool is_zero() const { return terms.empty(); }
  bool is_quasi() const {
    return std::all_of(terms.begin(), terms.end(), [](const auto& p) {
      return p.second == Rational(1) || p.second == Rational(-1);
    });
  }
  std::vector<Element> support() const {
    std::vector<Element> s;
    for (const auto& p : terms) s.push_back(p.first);
    return s;
  }
  Rational coefficient(Element x) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), x,
                               [](const auto& p, Element v) { return p.first < v; });
    return it != terms.end() && it->first == x ? it->second : Rational(0);
  }

  friend Relation operator-(const Relation& a, const Relation& b) {
    auto t = a.terms;
    for (const auto& [x, c] : b.terms) t.emplace_back(x, -c);
    return Relation(a.group, std::move(t));
  }

  /// Smallest positive multiple with coprime integer coefficients, with the
  /// first coefficient positive.
  Relation primitive() const {
    if (terms.empty()) return *this;
    mpz_class den = 1, num_gcd = 0;
    for (const auto& p : terms) {
      const mpq_class q = p.second.to_mpq();
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
    }
    std::vector<mpz_class> ints;
    for (const auto& p : terms) {
      const mpq_class q = p.second.to_mpq() * den;
      ints.push_back(q.get_num());
      mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), ints.back().get_mpz_t());
    }
    const int s = sgn(ints.front()) < 0 ? -1 : 1;
    std::vector<std::pair<Element, Rational>> t;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      mpz_class v = ints[i] / num_gcd * s;
      t.emplace_back(terms[i].first, Rational(mpq_class(v)));
    }
    return Relation(group, std::move(t));
  }

  std::string str() const {
    std::string s;
    for (const auto& [x, c] : terms) {
      if (!s.empty()) s += ' ';
      s += element_to_string(group, x) + ":" + c.str();
    }
    return s;
  }
};

/// Lattice relation test: f lies in the span of axis-line indicators iff
/// removing the mean along every axis in turn annihilates it.
inline bool lattice_is_relation(const GroupSpec& g,
                                const std::vector<std::pair<Element, Rational>>& terms) {
  if (!g.is_lattice()) throw Unsupported("lattice_is_relation: lattices only");
  std::vector<Rational> f(static_cast<std::size_t>(g.order()), Rational(0));
  for (const auto& [x, c] : terms) f[static_cast<std::size_t>(x)] += c;
  const auto& dims = g.dims();
  std::int64_t stride = 1;
  for (std::size_t j = dims.size(); j-- > 0;) {
    const std::int64_t n = dims[j];
    for (Element base = 0; base < g.order(); ++base) {
      if ((base / stride) % n != 0) continue;
      Rational sum(0);
      for (std::int64_t t = 0; t < n; ++t) sum += f[static_cast<std::size_t>(base + t * stride)];
      if (sum.is_zero()) continue;
      const Rational mean = sum / Rational(n);
      for (std::int64_t t = 0; t < n; ++t) f[static_cast<std::size_t>(base + t * stride)] -= mean;
    }
    stride *= n;
  }
  return std::all_of(f.begin(), f.end(), [](const Rational& v) { return v.is_zero(); });
}

/// Independent check that a coefficient function is a relation: cyclotomic
/// remainder for Z_n, line-span membership for lattices.
inline bool is_relation(const Relation& r) {
  return r.group.is_cyclic() ? cyclotomic_is_relation(r.group, r.terms)
                             : lattice_is_relation(r.group, r.terms);
}

// ---------------------------------------------------------------------------
// Structured basis

struct RelationBasis {
  GroupSpec group;
  std::vector<Relation> vectors;

  std::size_t dimension() const { return vectors.size(); }
};

namespace detail {

using SparseVec = std::vector<std::pair<Element, Rational>>;

/// Basis of the relation space of Z_m for square-free m: indicators of the
/// cosets of Z_p (p the least prime of m), then the relations of Z_{m/p}
/// carried onto every coset H + k of H = pZ_m with k != 0.
inline std::vector<SparseVec> squarefree_basis(std::int64_t m) {
  if (m == 1) return {};
  const std::int64_t p = factor(m).front().prime;
  const std::int64_t rest = m / p;
  std::vector<SparseVec> out;
  for (std::int64_t r = 0; r < rest; ++r) {
    SparseVec v;
    for (std::int64_t t = 0; t < p; ++t) v.emplace_back(r + t * rest, Rational(1));
    out.push_back(std::move(v));
  }
  const auto inner = squarefree_basis(rest);
  for (std::int64_t k = 1; k < p; ++k) {
    for (const auto& b : inner) {
      SparseVec v;
      for (const auto& [t, c] : b) v.emplace_back(k + p * t, c);
      out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace detail

/// Structured basis of the relation space.
///
/// Square-free Z_n: coset indicators of Z_{p_1} plus relations living on single
/// cosets of the complement (the omitted coset is the one through 0).
/// General Z_n: the square-free basis of Z_rad placed on each coset of Z_rad.
/// Lattices: a maximal independent family of axis-line indicators.
inline RelationBasis structured_basis(const GroupSpec& g) {
  RelationBasis basis{g, {}};
  if (g.is_cyclic()) {
    const std::int64_t rad = radical_of(g.order());
    const std::int64_t stride = g.order() / rad;
    const auto inner = detail::squarefree_basis(rad);
    for (std::int64_t c = 0; c < stride; ++c) {
      for (const auto& b : inner) {
        detail::SparseVec v;
        for (const auto& [t, coef] : b) v.emplace_back(c + stride * t, coef);
        basis.vectors.emplace_back(g, std::move(v));
      }
    }
    return basis;
  }
  const auto n = static_cast<std::size_t>(g.order());
  IncrementalRank acc(n);
  for (const auto& h : elementary_subgroups(g)) {
    for (const auto& c : cosets_of(g, h)) {
      Vec dense(n, Rational(0));
      for (auto x : c.elements) dense[static_cast<std::size_t>(x)] = 1;
      if (acc.add(std::move(dense))) basis.vectors.push_back(Relation::indicator(g, c.elements));
    }
  }
  return basis;
}

/// Shared, cached structured basis per group.
inline std::shared_ptr<const RelationBasis> basis_for(const GroupSpec& g) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const RelationBasis>> cache;
  const std::string key = g.name();
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto b = std::make_shared<const RelationBasis>(structured_basis(g));
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(b)).first->second;
}

// ---------------------------------------------------------------------------
// Support-restricted subspace

/// {f in relation space : supp f is contained in E}, as an RREF over the
/// coordinates of E (column i is E.elements()[i]).
struct SupportSubspace {
  GroupSpec group;
  std::vector<Element> support;
  Rref basis;

  std::size_t dimension() const { return basis.rank(); }

  Relation vector_to_relation(const Vec& v) const {
    std::vector<std::pair<Element, Rational>> t;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_zero()) t.emplace_back(support[i], v[i]);
    }
    return Relation(group, std::move(t));
  }
};

inline SupportSubspace restrict_to_support(const RelationBasis& basis, const Subset& e) {
  if (!(basis.group == e.group())) throw InvalidInput("restrict_to_support: group mismatch");
  const GroupSpec& g = basis.group;
  const std::size_t r = basis.dimension();
  SupportSubspace out{g, e.elements(), {}};
  out.basis.cols = e.size();
  if (r == 0 || e.empty()) return out;

  // Equations: for every y outside E, sum_i c_i B_i(y) = 0.
  std::vector<std::int64_t> outside_row(static_cast<std::size_t>(g.order()), -1);
  std::vector<std::int64_t> inside_col(static_cast<std::size_t>(g.order()), -1);
  std::size_t rows = 0;
  for (Element y = 0; y < g.order(); ++y) {
    if (!e.contains(y)) outside_row[static_cast<std::size_t>(y)] = static_cast<std::int64_t>(rows++);
  }
  for (std::size_t i = 0; i < e.size(); ++i) {
    inside_col[static_cast<std::size_t>(e.elements()[i])] = static_cast<std::int64_t>(i);
  }
  std::vector<Vec> a(rows, Vec(r, Rational(0)));
  for (std::size_t i = 0; i < r; ++i) {
    for (const auto& [x, c] : basis.vectors[i].terms) {
      const auto row = outside_row[static_cast<std::size_t>(x)];
      if (row >= 0) a[static_cast<std::size_t>(row)][i] = c;
    }
  }
  std::erase_if(a, [](const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q.is_zero(); });
  });
  const auto kernel = nullspace(a, r);
  std::vector<Vec> vecs;
  for (const auto& c : kernel) {
    Vec f(e.size(), Rational(0));
    for (std::size_t i = 0; i < r; ++i) {
      if (c[i].is_zero()) continue;
      for (const auto& [x, coef] : basis.vectors[i].terms) {
        const auto col = inside_col[static_cast<std::size_t>(x)];
        if (col >= 0) f[static_cast<std::size_t>(col)] += c[i] * coef;
      }
    }
    vecs.push_back(std::move(f));
  }
  out.basis = rref(std::move(vecs), e.size());
  return out;
}

// ---------------------------------------------------------------------------
// Quasi-relation search inside a subspace

struct Budget {
  std::size_t dim_cap = 24;              // largest subspace dimension enumerated
  std::uint64_t node_cap = 50'000'000;   // enumeration nodes per decision
};

enum class Decision { yes, no, undecided };

inline const char* to_string(Decision d) {
  switch (d) {
    case Decision::yes: return "yes";
    case Decision::no: return "no";
    case Decision::undecided: return "undecided";
  }
  return "?";
}

struct QuasiSearchResult {
  Decision found = Decision::no;  // yes: a non-zero {0,+-1} vector exists
  Vec vector;                     // the vector when found, over the subspace columns
  std::uint64_t nodes = 0;
};

namespace detail {

/// Depth-first enumeration of t in {-1,0,1}^d with the sum offset + sum_i t_i
/// rows_i landing in {-1,0,1} on every non-pivot column. Columns are scaled to
/// integers: target set {-scale_c, 0, scale_c}.
template <class Num>
class SignEnumerator {
 public:
  SignEnumerator(std::vector<std::vector<Num>> rows, std::vector<Num> offset,
                 std::vector<Num> scale, std::vector<Num> pivot_offset, bool require_nonzero,
                 bool normalize_sign, std::uint64_t node_cap)
      : rows_(std::move(rows)),
        offset_(std::move(offset)),
        scale_(std::move(scale)),
        pivot_offset_(std::move(pivot_offset)),
        require_nonzero_(require_nonzero),
        normalize_sign_(normalize_sign),
        node_cap_(node_cap) {
    const std::size_t d = rows_.size();
    const std::size_t m = scale_.size();
    suffix_.assign(d + 1, std::vector<Num>(m, Num(0)));
    for (std::size_t i = d; i-- > 0;) {
      for (std::size_t c = 0; c < m; ++c) suffix_[i][c] = suffix_[i + 1][c] + abs_of(rows_[i][c]);
    }
    t_.assign(d, 0);
  }

  /// Returns yes with the assignment in t(), no, or undecided on node cap.
  Decision run() {
    partial_ = offset_;
    return dfs(0, false);
  }
  const std::vector<int>& t() const { return t_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  static Num abs_of(const Num& v) {
    if constexpr (std::is_same_v<Num, Rational>) {
      return v.abs();
    } else {
      return v < 0 ? -v : v;
    }
  }

  bool column_ok(std::size_t c, std::size_t depth) const {
    const Num& p = partial_[c];
    const Num& s = suffix_[depth][c];
    const Num& l = scale_[c];
    // distance from p to the nearest of {-l, 0, l} must be at most s
    const Num ap = abs_of(p);
    Num dist = ap;
    if (ap >= l) {
      dist = ap - l;
    } else {
      const Num other = l - ap;
      if (other < dist) dist = other;
    }
    return dist <= s;
  }

  Decision dfs(std::size_t i, bool any_nonzero) {
    if (++nodes_ > node_cap_) return Decision::undecided;
    const std::size_t d = rows_.size();
    const std::size_t m = scale_.size();
    for (std::size_t c = 0; c < m; ++c) {
      if (!column_ok(c, i)) return Decision::no;
    }
    if (i == d) {
      if (require_nonzero_ && !any_nonzero) return Decision::no;
      return Decision::yes;
    }
    // Pivot column value is pivot_offset + t_i, which must lie in {-1,0,1}.
    static constexpr int kChoices[3] = {0, 1, -1};
    bool undecided = false;
    for (int choice : kChoices) {
      const Num pivot_value = pivot_offset_[i] + Num(choice);
      if (!(pivot_value == Num(0) || pivot_value == Num(1) || pivot_value == Num(-1))) continue;
      const bool nonzero_here = !(pivot_value == Num(0));
      if (normalize_sign_ && !any_nonzero && nonzero_here && !(pivot_value == Num(1))) continue;
      t_[i] = choice;
      if (choice != 0) {
        for (std::size_t c = 0; c < m; ++c) {
          if (choice > 0) {
            partial_[c] += rows_[i][c];
          } else {
            partial_[c] -= rows_[i][c];
          }
        }
      }
      const Decision r = dfs(i + 1, any_nonzero || nonzero_here);
      if (choice != 0) {
        for (std::size_t c = 0; c < m; ++c) {
          if (choice > 0) {
            partial_[c] -= rows_[i][c];
          } else {
            partial_[c] += rows_[i][c];
          }
        }
      }
      if (r == Decision::yes) return r;
      if (r == Decision::undecided) undecided = true;
      if (undecided && nodes_ > node_cap_) return Decision::undecided;
    }
    t_[i] = 0;
    return undecided ? Decision::undecided : Decision::no;
  }

  std::vector<std::vector<Num>> rows_;
  std::vector<Num> offset_;
  std::vector<Num> scale_;
  std::vector<Num> pivot_offset_;
  bool require_nonzero_;
  bool normalize_sign_;
  std::uint64_t node_cap_;
  std::vector<std::vector<Num>> suffix_;
  std::vector<Num> partial_;
  std::vector<int> t_;
  std::uint64_t nodes_ = 0;
};

inline bool lcm_fits(std::int64_t a, std::int64_t b, std::int64_t& out) {
  const std::int64_t g = std::gcd(a, b);
  return !__builtin_mul_overflow(a / g, b, &out);
}

}  // namespace detail

/// Searches the affine family offset + span(rows) (rows in RREF over `cols`
/// columns with the given pivots) for a vector with every entry in {0,+-1}.
/// With an empty offset the zero vector is excluded and the first non-zero
/// pivot is fixed to +1 (the family is symmetric under negation).
inline QuasiSearchResult find_sign_vector(const Rref& r, const Vec* offset, const Budget& budget) {
  QuasiSearchResult out;
  const std::size_t d = r.rank();
  if (d > budget.dim_cap) {
    out.found = Decision::undecided;
    return out;
  }
  const bool homogeneous = offset == nullptr;
  if (d == 0 && homogeneous) return out;
  // Move the offset to the representative that vanishes on every pivot column,
  // so that each pivot entry of a candidate equals its sign choice.
  Vec reduced;
  if (offset) {
    reduced = *offset;
    for (std::size_t i = 0; i < d; ++i) {
      const Rational f = reduced[r.pivots[i]];
      if (f.is_zero()) continue;
      for (std::size_t c = 0; c < r.cols; ++c) {
        if (!r.rows[i][c].is_zero()) reduced[c] -= f * r.rows[i][c];
      }
    }
    offset = &reduced;
  }
  std::vector<char> is_pivot(r.cols, 0);
  for (auto p : r.pivots) is_pivot[p] = 1;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < r.cols; ++c) {
    if (!is_pivot[c]) free_cols.push_back(c);
  }

  // Try an int64 scaling of every free column first.
  bool small = true;
  std::vector<std::int64_t> scale(free_cols.size(), 1);
  for (std::size_t k = 0; k < free_cols.size() && small; ++k) {
    const std::size_t c = free_cols[k];
    auto take = [&](const Rational& v) {
      if (!v.is_small()) {
        small = false;
        return;
      }
      if (!detail::lcm_fits(scale[k], v.small_den(), scale[k])) small = false;
    };
    for (std::size_t i = 0; i < d && small; ++i) take(r.rows[i][c]);
    if (offset && small) take((*offset)[c]);
  }
  auto run = [&](auto tag) {
    using Num = decltype(tag);
    std::vector<std::vector<Num>> rows(d, std::vector<Num>(free_cols.size(), Num(0)));
    std::vector<Num> off(free_cols.size(), Num(0)), sc(free_cols.size(), Num(1)), piv(d, Num(0));
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
      const std::size_t c = free_cols[k];
      if constexpr (std::is_same_v<Num, Rational>) {
        for (std::size_t i = 0; i < d; ++i) rows[i][k] = r.rows[i][c];
        if (offset) off[k] = (*offset)[c];
      } else {
        const std::int64_t s = scale[k];
        sc[k] = s;
        for (std::size_t i = 0; i < d; ++i) {
          const Rational& v = r.rows[i][c];
          rows[i][k] = v.small_num() * (s / v.small_den());
        }
        if (offset) off[k] = (*offset)[c].small_num() * (s / (*offset)[c].small_den());
      }
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (!offset) continue;
      const Rational& v = (*offset)[r.pivots[i]];
      if constexpr (std::is_same_v<Num, Rational>) {
        piv[i] = v;
      } else {
        if (!v.is_integer()) return std::pair<Decision, std::vector<int>>{Decision::no, {}};
        piv[i] = *v.as_int64();
      }
    }
    detail::SignEnumerator<Num> en(std::move(rows), std::move(off), std::move(sc), std::move(piv),
                                   homogeneous, homogeneous, budget.node_cap);
    const Decision dec = en.run();
    out.nodes += en.nodes();
    return std::pair<Decision, std::vector<int>>{dec, en.t()};
  };

  // Guard against overflow of partial sums in the integer path.
  if (small) {
    __int128 worst = 0;
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
      __int128 col = scale[k];
      for (std::size_t i = 0; i < d; ++i) {
        const Rational& v = r.rows[i][free_cols[k]];
        const __int128 term = static_cast<__int128>(v.small_num()) * (scale[k] / v.small_den());
        col += term < 0 ? -term : term;
      }
      worst = std::max(worst, col);
    }
    if (worst > (static_cast<__int128>(1) << 60)) small = false;
  }
  if (offset && !small) {
    // Non-integer pivot offsets can never be completed.
    for (std::size_t i = 0; i < d; ++i) {
      if (!(*offset)[r.pivots[i]].is_integer()) return out;
    }
  }
  const auto [dec, t] = small ? run(std::int64_t{0}) : run(Rational(0));
  out.found = dec;
  if (dec == Decision::yes) {
    Vec v = offset ? *offset : Vec(r.cols, Rational(0));
    for (std::size_t i = 0; i < d; ++i) {
      if (t[i] == 0) continue;
      for (std::size_t c = 0; c < r.cols; ++c) {
        if (!r.rows[i][c].is_zero()) v[c] += Rational(t[i]) * r.rows[i][c];
      }
    }
    out.vector = std::move(v);
  }
  return out;
}

inline QuasiSearchResult find_quasi_relation(const SupportSubspace& s, const Budget& budget) {
  return find_sign_vector(s.basis, nullptr, budget);
}

// ---------------------------------------------------------------------------
// Verdicts

enum class Method { oracle, subspace_enumeration, fast_path, coset_recursion };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::oracle: return "oracle";
    case Method::subspace_enumeration: return "subspace-enumeration";
    case Method::fast_path: return "fast-path";
    case Method::coset_recursion: return "coset-recursion";
  }
  return "?";
}

struct IndependenceVerdict {
  Decision quasi_independent = Decision::yes;
  bool independent = true;
  std::optional<Relation> quasi_witness;     // present iff quasi_independent == no
  std::optional<Relation> relation_witness;  // present iff !independent
  Method method = Method::subspace_enumeration;
  std::uint64_t nodes = 0;
  std::size_t max_subspace_dim = 0;
};

/// Verifies the invariants every returned witness must satisfy; throws on a bug.
inline void check_witness(const Relation& w, const Subset& e, bool quasi) {
  if (w.is_zero()) throw std::logic_error("witness is zero");
  for (auto x : w.support()) {
    if (!e.contains(x)) throw std::logic_error("witness leaves the subset");
  }
  if (quasi && !w.is_quasi()) throw std::logic_error("quasi witness has coefficient outside {0,+-1}");
  if (!is_relation(w)) throw std::logic_error("witness is not a relation: " + w.str());
}

namespace detail {

/// Decides a subset directly from the structured basis of its group.
inline IndependenceVerdict subspace_decide(const Subset& e, const Budget& budget) {
  IndependenceVerdict v;
  v.method = Method::subspace_enumeration;
  const auto basis = basis_for(e.group());
  const SupportSubspace s = restrict_to_support(*basis, e);
  v.max_subspace_dim = s.dimension();
  if (s.dimension() == 0) return v;
  v.independent = false;
  v.relation_witness = s.vector_to_relation(s.basis.rows.front()).primitive();
  const auto q = find_quasi_relation(s, budget);
  v.nodes = q.nodes;
  v.quasi_independent = q.found == Decision::yes  ? Decision::no
                        : q.found == Decision::no ? Decision::yes
                                                  : Decision::undecided;
  if (q.found == Decision::yes) v.quasi_witness = s.vector_to_relation(q.vector);
  return v;
}

/// Characteristic function of a full coset of some Z_p contained in E, if any.
inline std::optional<std::vector<Element>> contained_prime_coset(const Subset& e) {
  const GroupSpec& g = e.group();
  for (const auto& pp : g.factorization()) {
    if (static_cast<std::int64_t>(e.size()) < pp.prime) continue;
    const std::int64_t step = g.order() / pp.prime;
    for (auto x : e) {
      if (x >= step) break;  // every coset has a representative below step
      bool full = true;
      for (std::int64_t t = 1; t < pp.prime && full; ++t) full = e.contains(x + t * step);
      if (full) {
        std::vector<Element> c;
        for (std::int64_t t = 0; t < pp.prime; ++t) c.push_back(x + t * step);
        return c;
      }
    }
  }
  return std::nullopt;
}

/// Small-set characterizations. Returns a verdict when one applies.
inline std::optional<IndependenceVerdict> fast_path(const Subset& e) {
  const GroupSpec& g = e.group();
  IndependenceVerdict v;
  v.method = Method::fast_path;
  if (e.size() <= 1) return v;
  if (!g.is_cyclic()) return std::nullopt;
  const auto& f = g.factorization();
  const auto size = static_cast<std::int64_t>(e.size());
  const std::int64_t p1 = f.front().prime;
  auto dependent_on = [&](std::vector<Element> coset) {
    v.quasi_independent = Decision::no;
    v.independent = false;
    v.quasi_witness = Relation::indicator(g, coset);
    v.relation_witness = v.quasi_witness;
    return v;
  };
  if (size < p1) return v;
  if (size == p1) {
    if (auto c = contained_prime_coset(e); c && static_cast<std::int64_t>(c->size()) == p1) {
      return dependent_on(*c);
    }
    return v;
  }
  if (g.order() % 2 == 1 && g.square_free() && f.size() >= 2 && size < p1 + f[1].prime - 2) {
    if (auto c = contained_prime_coset(e)) return dependent_on(*c);
    return v;
  }
  return std::nullopt;
}

/// Carries a block relation from Z_m back along t -> offset + stride * t.
inline Relation lift_relation(const Relation& r, const GroupSpec& target, std::int64_t offset,
                              std::int64_t stride) {
  std::vector<std::pair<Element, Rational>> t;
  for (const auto& [x, c] : r.terms) t.emplace_back(mod(offset + stride * x, target.order()), c);
  return Relation(target, std::move(t));
}

inline IndependenceVerdict decide_cyclic(const Subset& e, bool use_fast_paths, const Budget& budget);

/// Splits E along the residue classes of `stride`, decides each block in
/// Z_{n/stride}, and merges the verdicts.
inline IndependenceVerdict split_and_merge(const Subset& e, std::int64_t stride, bool use_fast_paths,
                                           const Budget& budget) {
  const GroupSpec& g = e.group();
  const std::int64_t m = g.order() / stride;
  std::vector<std::vector<Element>> blocks(static_cast<std::size_t>(stride));
  for (auto x : e) blocks[static_cast<std::size_t>(x % stride)].push_back(x / stride);
  IndependenceVerdict out;
  out.method = Method::coset_recursion;
  bool undecided = false;
  for (std::int64_t a = 0; a < stride; ++a) {
    auto& b = blocks[static_cast<std::size_t>(a)];
    if (b.size() <= 1) continue;  // a single root of unity is independent
    const GroupSpec sub = GroupSpec::cyclic(m);
    const IndependenceVerdict bv = decide_cyclic(Subset(sub, std::move(b)), use_fast_paths, budget);
    out.nodes += bv.nodes;
    out.max_subspace_dim = std::max(out.max_subspace_dim, bv.max_subspace_dim);
    if (!bv.independent && out.independent) {
      out.independent = false;
      out.relation_witness = lift_relation(*bv.relation_witness, g, a, stride);
    }
    if (bv.quasi_independent == Decision::no && out.quasi_independent != Decision::no) {
      out.quasi_independent = Decision::no;
      out.quasi_witness = lift_relation(*bv.quasi_witness, g, a, stride);
    }
    if (bv.quasi_independent == Decision::undecided) undecided = true;
    if (out.quasi_independent == Decision::no && !out.independent) break;
  }
  if (undecided && out.quasi_independent != Decision::no) out.quasi_independent = Decision::undecided;
  return out;
}

inline IndependenceVerdict decide_cyclic(const Subset& e, bool use_fast_paths, const Budget& budget) {
  const GroupSpec& g = e.group();
  if (e.size() <= 1) {
    IndependenceVerdict v;
    v.method = Method::fast_path;
    return v;
  }
  if (use_fast_paths) {
    if (auto v = fast_path(e)) return *v;
  }
  const std::int64_t rad = radical_of(g.order());
  if (rad != g.order()) return split_and_merge(e, g.order() / rad, use_fast_paths, budget);
  // Square-free: split along a missed coset of the complement of Z_p,
  // trying the largest prime first.
  const auto& f = g.factorization();
  for (std::size_t j = f.size(); j-- > 0;) {
    const std::int64_t p = f[j].prime;
    std::vector<char> hit(static_cast<std::size_t>(p), 0);
    std::int64_t distinct = 0;
    for (auto x : e) {
      auto& h = hit[static_cast<std::size_t>(x % p)];
      if (!h) {
        h = 1;
        ++distinct;
      }
    }
    if (distinct < p) {
      if (f.size() == 1) {
        // Z_p itself: E is a proper subset, hence independent.
        IndependenceVerdict v;
        v.method = Method::coset_recursion;
        return v;
      }
      return split_and_merge(e, p, use_fast_paths, budget);
    }
  }
  return subspace_decide(e, budget);
}

}  // namespace detail

inline void check_verdict(const IndependenceVerdict& v, const Subset& e) {
  if (v.quasi_witness) check_witness(*v.quasi_witness, e, true);
  if (v.relation_witness) check_witness(*v.relation_witness, e, false);
}

/// Decides E using only the structured basis of its own group.
inline IndependenceVerdict structural_test(const Subset& e, const Budget& budget = {}) {
  IndependenceVerdict v = e.size() <= 1 ? IndependenceVerdict{} : detail::subspace_decide(e, budget);
  check_verdict(v, e);
  return v;
}

/// Splits E along cosets (of Z_rad, then along any prime axis with an empty
/// floor) before falling back to the structured basis. No small-set shortcuts.
inline IndependenceVerdict coset_reduction_test(const Subset& e, const Budget& budget = {}) {
  IndependenceVerdict v = e.group().is_cyclic() ? detail::decide_cyclic(e, false, budget)
                                                : structural_test(e, budget);
  check_verdict(v, e);
  return v;
}

/// The main decider: small-set characterizations, coset reductions, then the
/// support-restricted enumeration.
inline IndependenceVerdict is_quasi_independent(const Subset& e, const Budget& budget = {}) {
  IndependenceVerdict v = e.group().is_cyclic() ? detail::decide_cyclic(e, true, budget)
                                                : structural_test(e, budget);
  check_verdict(v, e);
  return v;
}

/// Shared, cached quotient embedding per group.
inline std::shared_ptr<const QuotientEmbedding> embedding_for(const GroupSpec& g) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const QuotientEmbedding>> cache;
  const std::string key = g.name();
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto e = std::make_shared<const QuotientEmbedding>(quotient_embedding(g));
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(e)).first->second;
}

/// Rational independence only; never enumerates. Works on the kernel of the
/// quotient embedding restricted to E rather than on the structured basis.
inline IndependenceVerdict is_independent(const Subset& e) {
  IndependenceVerdict v;
  if (e.size() > 1) {
    const auto emb = embedding_for(e.group());
    std::vector<Vec> rows(emb->dim, Vec(e.size(), Rational(0)));
    for (std::size_t i = 0; i < e.size(); ++i) {
      const auto& img = emb->images[static_cast<std::size_t>(e.elements()[i])];
      for (std::size_t k = 0; k < emb->dim; ++k) {
        if (img[k] != 0) rows[k][i] = img[k];
      }
    }
    const auto kernel = nullspace(rows, e.size());
    v.max_subspace_dim = kernel.size();
    if (!kernel.empty()) {
      v.independent = false;
      SupportSubspace s{e.group(), e.elements(), {}};
      v.relation_witness = s.vector_to_relation(kernel.front()).primitive();
      // Quasi-independence is not decided here.
      v.quasi_independent = Decision::undecided;
    }
  }
  check_verdict(v, e);
  return v;
}

/// Dimension of the space of relations supported on E.
inline std::size_t relation_dimension(const Subset& e) {
  return restrict_to_support(*basis_for(e.group()), e).dimension();
}

// ---------------------------------------------------------------------------
// Brute-force oracle

struct OracleVerdict {
  bool quasi_independent = true;
  std::optional<Relation> witness;
};

/// Meet-in-the-middle search over all sign patterns on E, evaluated through the
/// quotient embedding (whose kernel is the relation space). Refuses sets
/// larger than `max_size`.
inline OracleVerdict oracle_is_quasi_independent(const Subset& e, std::size_t max_size = 18) {
  if (e.size() > max_size) {
    throw InvalidInput("oracle: subset of size " + std::to_string(e.size()) + " exceeds cap " +
                       std::to_string(max_size));
  }
  OracleVerdict out;
  if (e.empty()) return out;
  const QuotientEmbedding emb = quotient_embedding(e.group());
  const auto& xs = e.elements();
  const std::size_t half = xs.size() / 2;
  using Key = std::vector<std::int64_t>;
  auto enumerate = [&](std::size_t lo, std::size_t hi) {
    std::vector<std::pair<Key, std::vector<int>>> sums;
    std::vector<int> signs(hi - lo, 0);
    Key acc(emb.dim, 0);
    auto rec = [&](auto&& self, std::size_t i) -> void {
      if (i == hi) {
        sums.emplace_back(acc, signs);
        return;
      }
      const auto& img = emb.images[static_cast<std::size_t>(xs[i])];
      for (int s : {0, 1, -1}) {
        signs[i - lo] = s;
        if (s != 0) {
          for (std::size_t k = 0; k < emb.dim; ++k) acc[k] += s * img[k];
        }
        self(self, i + 1);
        if (s != 0) {
          for (std::size_t k = 0; k < emb.dim; ++k) acc[k] -= s * img[k];
        }
      }
      signs[i - lo] = 0;
    };
    rec(rec, lo);
    return sums;
  };
  auto left = enumerate(0, half);
  const auto right = enumerate(half, xs.size());
  std::sort(left.begin(), left.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [key, rs] : right) {
    Key want(key.size());
    for (std::size_t k = 0; k < key.size(); ++k) want[k] = -key[k];
    auto it = std::lower_bound(left.begin(), left.end(), want,
                               [](const auto& a, const Key& k) { return a.first < k; });
    const bool right_zero = std::all_of(rs.begin(), rs.end(), [](int s) { return s == 0; });
    for (; it != left.end() && it->first == want; ++it) {
      const bool left_zero =
          std::all_of(it->second.begin(), it->second.end(), [](int s) { return s == 0; });
      if (left_zero && right_zero) continue;
      std::vector<std::pair<Element, Rational>> t;
      for (std::size_t i = 0; i < half; ++i) {
        if (it->second[i] != 0) t.emplace_back(xs[i], Rational(it->second[i]));
      }
      for (std::size_t i = half; i < xs.size(); ++i) {
        if (rs[i - half] != 0) t.emplace_back(xs[i], Rational(rs[i - half]));
      }
      out.quasi_independent = false;
      out.witness = Relation(e.group(), std::move(t));
      return out;
    }
  }
  return out;
}

}  // namespace qindep
