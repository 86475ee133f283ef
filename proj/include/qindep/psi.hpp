#pragma once

// Psi(n): the largest quasi-independent subset of Z_n (or of a lattice).
// Identity shortcuts, branch-and-bound, witness constructions (extension,
// Empty Floor products, lattice growth, lattice to cyclic transfer), bound
// propagation and a persistent JSON table.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qindep/arith.hpp"
#include "qindep/datasets.hpp"
#include "qindep/group.hpp"
#include "qindep/relations.hpp"
#include "qindep/search.hpp"
#include "qindep/version.hpp"

namespace qindep {

enum class PsiStatus { exact, lower_bound };

inline const char* to_string(PsiStatus s) { return s == PsiStatus::exact ? "exact" : "lower-bound"; }

struct Provenance {
  std::string kind;    // search | identity | extension | dataset
  std::string detail;
};

struct PsiStats {
  std::uint64_t nodes = 0;
  std::uint64_t subspace_searches = 0;
  bool exhausted = false;
  std::string symmetry;
};

struct PsiEntry {
  GroupSpec group = GroupSpec::cyclic(2);
  std::int64_t value = 0;
  PsiStatus status = PsiStatus::lower_bound;
  std::vector<Element> witness;
  Provenance provenance;
  std::optional<PsiStats> stats;

  bool exact() const { return status == PsiStatus::exact; }
};

/// Throws unless the witness is a quasi-independent set of the claimed size.
inline void verify_entry(const PsiEntry& e, const Budget& budget = {}) {
  const Subset s(e.group, e.witness);
  if (s.size() != e.witness.size()) throw std::logic_error("Psi witness has repeated elements");
  if (static_cast<std::int64_t>(s.size()) < e.value ||
      (e.exact() && static_cast<std::int64_t>(s.size()) != e.value)) {
    throw std::logic_error("Psi witness for " + e.group.name() + " has size " + std::to_string(s.size()) +
                           ", claimed " + std::to_string(e.value));
  }
  const auto v = is_quasi_independent(s, budget);
  if (v.quasi_independent != Decision::yes) {
    throw std::logic_error("Psi witness for " + e.group.name() + " is " +
                           (v.quasi_independent == Decision::no ? "not quasi-independent"
                                                                : "undecided under the budget"));
  }
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const PsiEntry& e) {
  nlohmann::json j;
  j["group"] = e.group.name();
  j["value"] = e.value;
  j["status"] = to_string(e.status);
  j["witness"] = e.witness;
  j["provenance"] = {{"kind", e.provenance.kind}, {"detail", e.provenance.detail}};
  if (e.stats) {
    j["stats"] = {{"nodes", e.stats->nodes},
                  {"subspace_searches", e.stats->subspace_searches},
                  {"exhausted", e.stats->exhausted},
                  {"symmetry", e.stats->symmetry}};
  }
  j["toolkit_version"] = kVersion;
  return j;
}

inline PsiEntry psi_entry_from_json(const nlohmann::json& j) {
  PsiEntry e;
  e.group = GroupSpec::parse(j.at("group").get<std::string>());
  e.value = j.at("value").get<std::int64_t>();
  const auto st = j.at("status").get<std::string>();
  if (st != "exact" && st != "lower-bound") throw InvalidInput("bad Psi status '" + st + "'");
  e.status = st == "exact" ? PsiStatus::exact : PsiStatus::lower_bound;
  e.witness = j.at("witness").get<std::vector<Element>>();
  e.provenance = {j.at("provenance").at("kind").get<std::string>(),
                  j.at("provenance").at("detail").get<std::string>()};
  if (j.contains("stats")) {
    const auto& s = j["stats"];
    e.stats = PsiStats{s.at("nodes").get<std::uint64_t>(), s.at("subspace_searches").get<std::uint64_t>(),
                       s.at("exhausted").get<bool>(), s.at("symmetry").get<std::string>()};
  }
  return e;
}

// ---------------------------------------------------------------------------
// Table

/// Entries keyed by group name. Never downgraded: an exact entry is only ever
/// confirmed, a lower bound only raised. Witnesses are verified on the way in.
class PsiTable {
 public:
  const PsiEntry* find(const GroupSpec& g) const {
    auto it = entries_.find(g.name());
    return it == entries_.end() ? nullptr : &it->second;
  }

  /// Returns true when the table changed.
  bool offer(const PsiEntry& e) {
    verify_entry(e);
    auto it = entries_.find(e.group.name());
    if (it == entries_.end()) {
      entries_.emplace(e.group.name(), e);
      return true;
    }
    PsiEntry& cur = it->second;
    if (cur.exact()) {
      if (e.value > cur.value) {
        throw std::logic_error("Psi(" + e.group.name() + "): verified witness of size " + std::to_string(e.value) +
                               " exceeds the exact value " + std::to_string(cur.value));
      }
      if (e.exact() && e.value != cur.value) {
        throw std::logic_error("Psi(" + e.group.name() + "): conflicting exact values");
      }
      return false;
    }
    if (e.exact()) {
      if (e.value < cur.value) {
        throw std::logic_error("Psi(" + e.group.name() + "): exact value below a verified lower bound");
      }
      cur = e;
      return true;
    }
    if (e.value > cur.value) {
      cur = e;
      return true;
    }
    return false;
  }

  std::vector<PsiEntry> entries() const {
    std::vector<PsiEntry> out;
    for (const auto& [k, v] : entries_) out.push_back(v);
    return out;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["schema"] = 1;
    j["toolkit_version"] = kVersion;
    j["entries"] = nlohmann::json::array();
    for (const auto& [k, v] : entries_) j["entries"].push_back(qindep::to_json(v));
    return j;
  }

  /// Loads and re-verifies every entry; a missing file gives an empty table.
  static PsiTable load(const std::string& path) {
    PsiTable t;
    std::ifstream in(path);
    if (!in) return t;
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& ex) {
      throw InvalidInput("Psi table " + path + ": " + ex.what());
    }
    for (const auto& e : j.at("entries")) t.offer(psi_entry_from_json(e));
    return t;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write Psi table " + path);
    out << to_json().dump(2) << '\n';
  }

 private:
  std::map<std::string, PsiEntry> entries_;
};

// ---------------------------------------------------------------------------
// Witness constructions

namespace witness {

/// Z_{p^k} minus the representatives 0..p^{k-1}-1 of the Z_p-cosets.
inline std::vector<Element> prime_power(std::int64_t n) {
  const auto f = factor(n);
  if (f.size() != 1) throw InvalidInput("prime_power: " + std::to_string(n) + " is not a prime power");
  std::vector<Element> out;
  for (Element x = n / f[0].prime; x < n; ++x) out.push_back(x);
  return out;
}

/// Units of Z_n; for square-free n a basis of the cyclotomic field.
inline std::vector<Element> units(std::int64_t n) {
  std::vector<Element> out;
  for (Element x = 1; x < n; ++x) {
    if (std::gcd(x, n) == 1) out.push_back(x);
  }
  return out;
}

/// W in Z_m to Z_{pm} (p | m): one copy of W in every residue class mod p.
inline std::vector<Element> repeat_over_residues(const std::vector<Element>& w, std::int64_t p) {
  std::vector<Element> out;
  for (std::int64_t a = 0; a < p; ++a) {
    for (auto x : w) out.push_back(a + p * x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// W in Z_m to the subgroup 2 Z_{2m}.
inline std::vector<Element> double_into(const std::vector<Element>& w) {
  std::vector<Element> out;
  for (auto x : w) out.push_back(2 * x);
  return out;
}

/// W in Z_n to {(k, w) : k in 1..q-1} in Z_{nq} = Z_q x Z_n (q prime, q not dividing n).
inline std::vector<Element> empty_floor_product(const std::vector<Element>& w, std::int64_t n, std::int64_t q) {
  if (!is_prime(q) || n % q == 0) throw InvalidInput("empty_floor_product: q must be a prime not dividing n");
  const std::int64_t big = n * q;
  std::vector<Element> out;
  for (std::int64_t k = 1; k < q; ++k) {
    for (auto x : w) {
      // CRT: y = k mod q, y = x mod n.
      const std::int64_t y = mod(x + n * mod((k - x) * mod_inverse(mod(n, q), q), q), big);
      out.push_back(y);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace witness

// ---------------------------------------------------------------------------
// Extension

struct ExtensionPlan {
  std::int64_t n = 0;                 // square-free
  std::size_t s = 0;                  // 1-based index of the replaced prime
  std::int64_t p_s = 0;
  std::int64_t q = 0;
  std::int64_t m = 0;                 // n / p_s
  std::int64_t psi_m = 0;             // exact Psi(m)
  std::vector<std::vector<Element>> fill;  // fill[k - p_s] in Z_m, for p_s <= k < q
};

/// Checks the plan's hypotheses; throws InvalidInput naming the first failure.
inline void validate(const ExtensionPlan& p, const Budget& budget = {}) {
  if (p.n < 2 || !is_square_free(p.n)) throw InvalidInput("extension: n must be square-free");
  const auto primes = GroupSpec::cyclic(p.n).primes();
  if (p.s < 1 || p.s > primes.size()) throw InvalidInput("extension: s out of range");
  if (primes[p.s - 1] != p.p_s || p.m * p.p_s != p.n) throw InvalidInput("extension: inconsistent p_s or m");
  if (!is_prime(p.q) || p.q <= p.p_s) throw InvalidInput("extension: q must be a prime larger than p_s");
  for (std::size_t j = p.s; j < primes.size(); ++j) {
    if (primes[j] == p.q) throw InvalidInput("extension: q must differ from the larger primes of n");
  }
  if (static_cast<std::int64_t>(p.fill.size()) != p.q - p.p_s) throw InvalidInput("extension: one fill set per new coset");
  if (p.m < 2) {
    for (const auto& f : p.fill) {
      if (!f.empty() && !(f.size() == 1 && f[0] == 0)) throw InvalidInput("extension: fill outside Z_1");
    }
    return;
  }
  const auto gm = GroupSpec::cyclic(p.m);
  for (const auto& f : p.fill) {
    const Subset s(gm, f);
    if (static_cast<std::int64_t>(s.size()) != p.psi_m) throw InvalidInput("extension: fill sets must have size Psi(m)");
    if (is_quasi_independent(s, budget).quasi_independent != Decision::yes) {
      throw InvalidInput("extension: fill set is not quasi-independent");
    }
  }
}

/// (k, w) in Z_q x Z_m to Z_{qm}.
inline Element pair_to_element(std::int64_t k, std::int64_t w, std::int64_t q, std::int64_t m) {
  if (m == 1) return mod(k, q);
  const GroupSpec g = GroupSpec::cyclic(q * m);
  // Coordinates of Z_{qm} are per prime power; fill them from k and w.
  std::vector<std::int64_t> c;
  for (const auto& pp : g.factorization()) c.push_back(pp.prime == q ? mod(k, q) : mod(w, pp.value()));
  return g.index(c);
}

/// lambda(E) union F. With `checked`, the result is re-verified by the tester.
inline Subset extend(const Subset& e, const ExtensionPlan& plan, bool checked = true, const Budget& budget = {}) {
  validate(plan, budget);
  if (!(e.group() == GroupSpec::cyclic(plan.n))) throw InvalidInput("extend: E must live in Z_n");
  if (checked && is_quasi_independent(e, budget).quasi_independent != Decision::yes) {
    throw InvalidInput("extend: E is not quasi-independent");
  }
  std::vector<Element> out;
  for (auto x : e) out.push_back(pair_to_element(mod(x, plan.p_s), mod(x, plan.m), plan.q, plan.m));
  for (std::int64_t k = plan.p_s; k < plan.q; ++k) {
    for (auto w : plan.fill[static_cast<std::size_t>(k - plan.p_s)]) out.push_back(pair_to_element(k, w, plan.q, plan.m));
  }
  Subset r(GroupSpec::cyclic(plan.q * plan.m), std::move(out));
  if (checked) {
    const auto v = is_quasi_independent(r, budget);
    if (v.quasi_independent == Decision::no) throw std::logic_error("extend: result is not quasi-independent");
    if (v.quasi_independent == Decision::undecided) throw std::runtime_error("extend: verification undecided under the budget");
  }
  return r;
}

/// Adds new layers k = n_j .. new_size-1 on lattice axis j, each filled with
/// `fill`, a maximum quasi-independent set of the lattice without axis j (or
/// of Z_{n_i} when one axis remains). Re-verified when `checked`.
inline Subset extend_lattice_axis(const Subset& e, std::size_t axis, std::int64_t new_size,
                                  const std::vector<std::vector<std::int64_t>>& fill, bool checked = true,
                                  const Budget& budget = {}) {
  const GroupSpec& g = e.group();
  if (!g.is_lattice() || axis >= g.dims().size()) throw InvalidInput("extend_lattice_axis: bad lattice axis");
  if (new_size <= g.dims()[axis]) throw InvalidInput("extend_lattice_axis: the axis must grow");
  auto dims = g.dims();
  dims[axis] = new_size;
  const GroupSpec big = GroupSpec::lattice(dims);
  std::vector<Element> out;
  for (auto x : e) out.push_back(big.index(g.coords(x)));
  for (std::int64_t k = g.dims()[axis]; k < new_size; ++k) {
    for (const auto& c : fill) {
      if (c.size() + 1 != dims.size()) throw InvalidInput("extend_lattice_axis: fill arity");
      std::vector<std::int64_t> full(c.begin(), c.end());
      full.insert(full.begin() + static_cast<std::ptrdiff_t>(axis), k);
      out.push_back(big.index(full));
    }
  }
  Subset r(big, std::move(out));
  if (checked) {
    const auto v = is_quasi_independent(r, budget);
    if (v.quasi_independent != Decision::yes) {
      throw std::runtime_error(std::string("extend_lattice_axis: result is ") + to_string(v.quasi_independent));
    }
  }
  return r;
}

/// A lattice with distinct prime axes maps onto Z_{prod} by CRT; both relation
/// spaces are spanned by the same coset indicators.
inline Subset lattice_to_cyclic(const Subset& e, bool checked = true, const Budget& budget = {}) {
  const GroupSpec& g = e.group();
  if (!g.is_lattice()) throw InvalidInput("lattice_to_cyclic: lattice input required");
  auto dims = g.dims();
  std::sort(dims.begin(), dims.end());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (!is_prime(dims[i]) || (i && dims[i] == dims[i - 1])) {
      throw InvalidInput("lattice_to_cyclic: axes must be distinct primes");
    }
  }
  const GroupSpec z = GroupSpec::cyclic(g.order());
  std::vector<Element> out;
  for (auto x : e) {
    const auto c = g.coords(x);
    std::vector<std::int64_t> zc;
    for (auto p : z.primes()) {
      const auto at = std::find(g.dims().begin(), g.dims().end(), p) - g.dims().begin();
      zc.push_back(c[static_cast<std::size_t>(at)]);
    }
    out.push_back(z.index(zc));
  }
  Subset r(z, std::move(out));
  if (checked) {
    const auto v = is_quasi_independent(r, budget);
    if (v.quasi_independent != Decision::yes) {
      throw std::runtime_error(std::string("lattice_to_cyclic: result is ") + to_string(v.quasi_independent));
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// psi

struct PsiOptions {
  bool use_identities = true;
  bool long_run = false;              // allow branch-and-bound on large groups
  std::int64_t default_search_limit = 60;  // largest order searched without long_run
  SearchBudget search{};
  SearchBudget long_run_search{100'000'000'000ULL, 0, {}, true};
  PsiTable* table = nullptr;
};

inline PsiEntry psi(const GroupSpec& g, const PsiOptions& opt = {});

namespace detail {

inline PsiEntry identity_entry(const GroupSpec& g, std::vector<Element> w, PsiStatus st, std::string why) {
  PsiEntry e;
  e.group = g;
  e.value = static_cast<std::int64_t>(w.size());
  e.status = st;
  e.witness = std::move(w);
  e.provenance = {"identity", std::move(why)};
  return e;
}

inline PsiEntry search_entry(const GroupSpec& g, const PsiEntry& seed, const SearchBudget& budget) {
  const auto r = branch_and_bound(g, seed.witness, budget);
  PsiEntry e;
  e.group = g;
  e.witness = r.best;
  e.value = static_cast<std::int64_t>(r.best.size());
  e.status = r.optimal ? PsiStatus::exact : PsiStatus::lower_bound;
  const bool improved = r.best.size() > seed.witness.size();
  e.provenance = improved || seed.witness.empty() ? Provenance{"search", "branch-and-bound"} : seed.provenance;
  if (r.optimal) e.provenance = {"search", "branch-and-bound, exhausted"};
  e.stats = PsiStats{r.stats.nodes, r.stats.subspace_searches, r.stats.exhausted, r.stats.symmetry};
  verify_entry(e);
  return e;
}

}  // namespace detail

/// Psi(n) >= phi(n) + 4 for odd square-free n with at least three primes:
/// the embedded Z_105 set carried to the three smallest primes of n by
/// extension, then Empty Floor products for the remaining primes.
inline std::vector<Element> phi_plus_four_witness(std::int64_t n) {
  if (n % 2 == 0 || !is_square_free(n)) throw InvalidInput("phi_plus_four_witness: n must be odd and square-free");
  auto primes = GroupSpec::cyclic(n).primes();
  if (primes.size() < 3) throw InvalidInput("phi_plus_four_witness: n needs three prime factors");
  std::vector<std::int64_t> cur = {3, 5, 7};
  Subset e(GroupSpec::cyclic(105), detail::cyclic_105_52());
  // Replace the largest, then the middle, then the smallest prime.
  for (std::size_t s = 3; s-- > 0;) {
    const std::int64_t target = primes[s];
    if (target == cur[s]) continue;
    const std::int64_t nn = cur[0] * cur[1] * cur[2];
    ExtensionPlan plan;
    plan.n = nn;
    plan.s = s + 1;
    plan.p_s = cur[s];
    plan.q = target;
    plan.m = nn / cur[s];
    const PsiEntry pm = psi(GroupSpec::cyclic(plan.m));
    if (!pm.exact()) throw std::logic_error("phi_plus_four_witness: Psi(m) not exact");
    plan.psi_m = pm.value;
    plan.fill.assign(static_cast<std::size_t>(plan.q - plan.p_s), pm.witness);
    e = extend(e, plan, false);
    cur[s] = target;
  }
  std::vector<Element> w = e.elements();
  std::int64_t base = primes[0] * primes[1] * primes[2];
  for (std::size_t j = 3; j < primes.size(); ++j) {
    w = witness::empty_floor_product(w, base, primes[j]);
    base *= primes[j];
  }
  return w;
}

/// The 3x6x9 example grown to 3x7x11 by adding layers, then moved to Z_231.
inline Subset lattice_369_to_231(const Budget& budget = {}) {
  const auto report = verify_dataset("lattice-3x6x9-85", budget);
  if (!report.accepted) throw std::runtime_error("lattice_369_to_231: no verified reading of the dataset");
  Subset e = [&] {
    for (const auto& r : report.readings) {
      if (r.name == *report.accepted) return r.set;
    }
    throw std::logic_error("accepted reading missing");
  }();
  // Corner sets {c : c_j >= 1} are maximum in two-axis lattices.
  auto corner = [](std::int64_t a, std::int64_t b) {
    std::vector<std::vector<std::int64_t>> out;
    for (std::int64_t i = 1; i < a; ++i) {
      for (std::int64_t j = 1; j < b; ++j) out.push_back({i, j});
    }
    return out;
  };
  e = extend_lattice_axis(e, 1, 7, corner(3, 9), true, budget);
  e = extend_lattice_axis(e, 2, 11, corner(3, 7), true, budget);
  return lattice_to_cyclic(e, true, budget);
}

inline PsiEntry psi(const GroupSpec& g, const PsiOptions& opt) {
  if (opt.table) {
    if (const PsiEntry* hit = opt.table->find(g); hit && hit->exact()) return *hit;
  }
  auto finish = [&](PsiEntry e) {
    verify_entry(e);
    if (opt.table) {
      opt.table->offer(e);
      if (const PsiEntry* best = opt.table->find(g); best && best->value > e.value) return *best;
    }
    return e;
  };
  auto searchable = [&] { return opt.long_run || g.order() <= opt.default_search_limit; };
  auto budget = [&] { return opt.long_run ? opt.long_run_search : opt.search; };

  if (g.is_lattice()) {
    PsiEntry seed;
    seed.group = g;
    std::vector<Element> corner;
    for (Element x = 0; x < g.order(); ++x) {
      const auto c = g.coords(x);
      if (std::all_of(c.begin(), c.end(), [](std::int64_t v) { return v > 0; })) corner.push_back(x);
    }
    seed = detail::identity_entry(g, corner, PsiStatus::lower_bound, "corner set, prod(n_j - 1)");
    if (g.name() == "3x6x9") {
      const auto r = verify_dataset("lattice-3x6x9-85");
      for (const auto& rd : r.readings) {
        if (r.accepted && rd.name == *r.accepted) {
          seed.witness = rd.set.elements();
          seed.value = static_cast<std::int64_t>(rd.set.size());
          seed.provenance = {"dataset", "lattice-3x6x9-85 (" + rd.name + ")"};
        }
      }
    }
    if (opt.table) {
      if (const PsiEntry* hit = opt.table->find(g); hit && hit->value > seed.value) seed = *hit;
    }
    if (!searchable()) return finish(seed);
    return finish(detail::search_entry(g, seed, budget()));
  }

  const std::int64_t n = g.order();
  const auto& f = g.factorization();
  if (opt.use_identities) {
    if (f.size() == 1) {
      return finish(detail::identity_entry(g, witness::prime_power(n), PsiStatus::exact, "Psi(p^k) = phi(p^k)"));
    }
    for (const auto& pp : f) {
      if (pp.exponent >= 2) {
        const PsiEntry sub = psi(GroupSpec::cyclic(n / pp.prime), opt);
        return finish(detail::identity_entry(g, witness::repeat_over_residues(sub.witness, pp.prime), sub.status,
                                             "Psi(pn) = p Psi(n), p = " + std::to_string(pp.prime)));
      }
    }
    if (n % 2 == 0) {
      const PsiEntry sub = psi(GroupSpec::cyclic(n / 2), opt);
      return finish(detail::identity_entry(g, witness::double_into(sub.witness), sub.status, "Psi(2n) = Psi(n), n odd"));
    }
    if (f.size() == 2) {
      return finish(detail::identity_entry(g, witness::units(n), PsiStatus::exact,
                                           "Z_pq: independent iff quasi-independent, so Psi = phi"));
    }
    // Odd square-free with three or more primes.
    PsiEntry seed = detail::identity_entry(g, phi_plus_four_witness(n), PsiStatus::lower_bound,
                                           "phi(n) + 4 via extension of the Z_105 seed");
    if (n == 105) seed.provenance = {"dataset", "cyclic-105-52"};
    if (n == 231) {
      auto w = lattice_369_to_231().elements();
      if (static_cast<std::int64_t>(w.size()) > seed.value) {
        seed = detail::identity_entry(g, std::move(w), PsiStatus::lower_bound,
                                      "3x6x9 example grown to 3x7x11 and moved to Z_231");
        seed.provenance.kind = "extension";
      }
    }
    if (opt.table) {
      if (const PsiEntry* hit = opt.table->find(g); hit && hit->value > seed.value) seed = *hit;
    }
    if (!searchable()) return finish(seed);
    return finish(detail::search_entry(g, seed, budget()));
  }
  // Direct search only. Composite proper subgroups are searched first; their
  // exact values cap every coset.
  PsiEntry seed;
  seed.group = g;
  if (g.square_free()) seed = detail::identity_entry(g, witness::units(n), PsiStatus::lower_bound, "units");
  SearchBudget b = budget();
  for (auto d : divisors(n)) {
    if (d == n || d < 4 || is_prime(d)) continue;
    PsiOptions sub = opt;
    sub.table = nullptr;
    const PsiEntry e = psi(GroupSpec::cyclic(d), sub);
    if (e.exact()) b.coset_capacities.emplace_back(d, e.value);
  }
  return finish(detail::search_entry(g, seed, b));
}

// ---------------------------------------------------------------------------
// Bounds

struct BoundEntry {
  std::string rule;
  PsiEntry entry;
};

/// Lower bounds implied for Z_{qm} (m = n / p_s) by extending the best known
/// set of Z_n, for Z_{nq} by the Empty Floor product when q does not divide n,
/// and the phi + 4 bound for n itself when it has three odd prime factors.
inline std::vector<BoundEntry> monotonicity_bounds(std::int64_t n, std::size_t s, std::int64_t q,
                                                   PsiTable* table = nullptr, const PsiOptions& opt_in = {}) {
  PsiOptions opt = opt_in;
  opt.table = table;
  std::vector<BoundEntry> out;
  const GroupSpec gn = GroupSpec::cyclic(n);
  const auto primes = gn.primes();
  if (!is_square_free(n) || s < 1 || s > primes.size()) throw InvalidInput("bounds: n square-free, 1 <= s <= K");
  const PsiEntry en = psi(gn, opt);
  ExtensionPlan plan;
  plan.n = n;
  plan.s = s;
  plan.p_s = primes[s - 1];
  plan.q = q;
  plan.m = n / plan.p_s;
  PsiEntry em;
  if (plan.m >= 2) {
    em = psi(GroupSpec::cyclic(plan.m), opt);
    if (!em.exact()) throw InvalidInput("bounds: Psi(m) must be exact for the extension");
  } else {
    em.value = 1;
    em.witness = {0};
    em.status = PsiStatus::exact;
  }
  plan.psi_m = em.value;
  plan.fill.assign(static_cast<std::size_t>(std::max<std::int64_t>(q - plan.p_s, 0)), em.witness);
  validate(plan);
  const std::int64_t qm = q * plan.m;
  const GroupSpec gq = GroupSpec::cyclic(qm);
  const Subset ext = extend(Subset(gn, en.witness), plan);
  auto bound = [&](std::string rule, std::int64_t value, std::string detail) {
    PsiEntry e;
    e.group = gq;
    e.value = value;
    e.status = PsiStatus::lower_bound;
    e.witness = ext.elements();
    e.provenance = {"identity", "monotonicity: " + detail};
    out.push_back({std::move(rule), std::move(e)});
  };
  const std::int64_t fill_total = (q - plan.p_s) * em.value;
  bound("extension", en.value + fill_total,
        "Psi(" + std::to_string(qm) + ") >= Psi(" + std::to_string(n) + ") + (" + std::to_string(q) + " - " +
            std::to_string(plan.p_s) + ") Psi(" + std::to_string(plan.m) + ")");
  const std::int64_t delta_phi = en.value - euler_phi(n);
  if (delta_phi >= 0) {
    bound("delta-phi", euler_phi(qm) + delta_phi,
          "Psi(n) >= phi(n) + " + std::to_string(delta_phi) + " carries to Z_" + std::to_string(qm));
  }
  const std::int64_t delta_m = en.value - (plan.p_s - 1) * em.value;
  if (delta_m >= 0) {
    bound("delta-m", (q - 1) * em.value + delta_m,
          "Psi(n) >= (p_s - 1) Psi(m) + " + std::to_string(delta_m) + " carries to Z_" + std::to_string(qm));
  }
  if (n % q != 0) {
    PsiEntry e;
    e.group = GroupSpec::cyclic(n * q);
    e.witness = witness::empty_floor_product(en.witness, n, q);
    e.value = static_cast<std::int64_t>(e.witness.size());
    e.status = PsiStatus::lower_bound;
    e.provenance = {"identity", "Empty Floor: Psi(nq) >= (q - 1) Psi(n)"};
    out.push_back({"empty-floor", std::move(e)});
  }
  if (n % 2 == 1 && primes.size() >= 3) {
    PsiEntry e;
    e.group = gn;
    e.witness = phi_plus_four_witness(n);
    e.value = euler_phi(n) + 4;
    e.status = PsiStatus::lower_bound;
    e.provenance = {"identity", "Psi(n) >= phi(n) + 4, three odd primes"};
    out.push_back({"phi-plus-four", std::move(e)});
  }
  for (const auto& b : out) {
    verify_entry(b.entry);
    if (table) table->offer(b.entry);
  }
  return out;
}

}  // namespace qindep
