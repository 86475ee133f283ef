// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--only AC1,AC5] [--long-run-seconds S]

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "qindep/certificate.hpp"
#include "qindep/qindep.hpp"

using namespace qindep;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string join(const std::vector<std::int64_t>& v) {
  std::string s;
  for (auto x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s;
}

/// Calls f on every subset of Z_n of size <= k, as a sorted element list.
void for_each_small_subset(std::int64_t n, std::size_t k, const std::function<void(const std::vector<Element>&)>& f) {
  std::vector<Element> cur;
  auto rec = [&](auto&& self, Element from) -> void {
    f(cur);
    if (cur.size() == k) return;
    for (Element x = from; x < n; ++x) {
      cur.push_back(x);
      self(self, x + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
}

std::uint64_t mask_of(const std::vector<Element>& e) {
  std::uint64_t m = 0;
  for (auto x : e) m |= std::uint64_t{1} << x;
  return m;
}

/// Does E contain a full coset of some prime-order subgroup? Checked directly.
bool contains_prime_coset(const GroupSpec& g, const std::vector<Element>& e) {
  const std::int64_t n = g.order();
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (auto x : e) in[static_cast<std::size_t>(x)] = 1;
  for (auto p : g.primes()) {
    const std::int64_t step = n / p;
    for (Element a = 0; a < step; ++a) {
      bool full = true;
      for (std::int64_t t = 0; t < p && full; ++t) full = in[static_cast<std::size_t>(a + t * step)];
      if (full) return true;
    }
  }
  return false;
}

PsiOptions direct_options() {
  PsiOptions o;
  o.use_identities = false;
  o.search.node_cap = 500'000'000;
  return o;
}

// ---------------------------------------------------------------------------

Outcome ac1() {
  std::uint64_t subsets = 0, mismatches = 0, oracle_samples = 0;
  std::mt19937_64 rng(1);
  for (std::int64_t n = 3; n <= 24; ++n) {
    const auto g = GroupSpec::cyclic(n);
    const QiTable table = QiTable::build(g);
    for_each_small_subset(n, 10, [&](const std::vector<Element>& e) {
      const Subset s(g, e);
      const bool truth = table.quasi_independent(mask_of(e));
      const auto a = is_quasi_independent(s).quasi_independent;
      const auto b = coset_reduction_test(s).quasi_independent;
      ++subsets;
      if (a != (truth ? Decision::yes : Decision::no) || b != a) ++mismatches;
    });
    // The table against the brute-force sign-pattern oracle.
    for (int i = 0; i < 300; ++i) {
      std::vector<Element> e;
      const std::size_t k = 1 + rng() % 10;
      for (std::size_t j = 0; j < k; ++j) e.push_back(static_cast<Element>(rng() % static_cast<std::uint64_t>(n)));
      const Subset s(g, e);
      ++oracle_samples;
      if (oracle_is_quasi_independent(s).quasi_independent != table.quasi_independent(s.mask())) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(subsets) + " subsets (n = 3..24, |E| <= 10) against the kernel table, " +
                               std::to_string(oracle_samples) + " table/oracle spot checks, " +
                               std::to_string(mismatches) + " mismatches"};
}

Outcome ac2() {
  std::vector<std::string> bad;
  std::size_t checks = 0;
  const auto direct = direct_options();
  auto exact_direct = [&](std::int64_t n) -> std::optional<std::int64_t> {
    const auto e = psi(GroupSpec::cyclic(n), direct);
    if (!e.exact()) return std::nullopt;
    return e.value;
  };
  for (std::int64_t n : {3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27}) {
    const auto id = psi(GroupSpec::cyclic(n));
    const auto d = exact_direct(n);
    ++checks;
    if (!id.exact() || id.value != euler_phi(n) || !d || *d != euler_phi(n)) bad.push_back("p^k " + std::to_string(n));
  }
  for (std::int64_t n = 3; n <= 45; n += 2) {
    const auto a = exact_direct(n);
    const auto b = exact_direct(2 * n);
    const auto id = psi(GroupSpec::cyclic(2 * n));
    ++checks;
    if (!a || !b || *a != *b || id.value != *b) bad.push_back("2n " + std::to_string(2 * n));
  }
  for (std::int64_t n = 4; n <= 30; ++n) {
    for (const auto& pp : factor(n)) {
      if (pp.exponent < 2) continue;
      const auto a = exact_direct(n);
      const auto b = exact_direct(n / pp.prime);
      const auto id = psi(GroupSpec::cyclic(n));
      ++checks;
      if (!a || !b || *a != pp.prime * *b || !id.exact() || id.value != *a) bad.push_back("pn " + std::to_string(n));
    }
  }
  std::string d = std::to_string(checks) + " identity checks against exhausted direct search (no identities)";
  if (!bad.empty()) {
    d += "; failed:";
    for (const auto& b : bad) d += " [" + b + "]";
  }
  return {bad.empty(), d};
}

/// Every independent set by DFS over E in increasing order (independence and
/// quasi-independence are both closed under subsets), with the rank kept
/// modulo 2^61 - 1. Full modular rank implies full rational rank; a modular
/// dependency is confirmed exactly before use.
struct PqCheck {
  std::uint64_t independent = 0, minimal_dependent = 0, violations = 0;
};

PqCheck pq_exhaustive(std::int64_t n) {
  using F = detail::Mod61;
  const auto g = GroupSpec::cyclic(n);
  const QiTable table = QiTable::build(g);
  const auto emb = quotient_embedding(g);
  const std::size_t dim = emb.dim;
  PqCheck out;
  std::vector<Element> cur;
  struct Row {
    std::vector<std::uint64_t> v;
    std::size_t lead;
  };
  auto reduce = [&](const std::vector<Row>& rows, std::vector<std::uint64_t> v) {
    for (const auto& r : rows) {
      const std::uint64_t f = v[r.lead];
      if (!f) continue;
      for (std::size_t k = 0; k < dim; ++k) v[k] = F::sub(v[k], F::mul(f, r.v[k]));
    }
    return v;
  };
  auto rec = [&](auto&& self, std::vector<Row>& rows, Element from) -> void {
    ++out.independent;
    if (!table.quasi_independent(mask_of(cur))) ++out.violations;
    for (Element x = from; x < n; ++x) {
      std::vector<std::uint64_t> v(dim);
      for (std::size_t k = 0; k < dim; ++k) v[k] = F::from(emb.images[static_cast<std::size_t>(x)][k]);
      v = reduce(rows, std::move(v));
      std::size_t lead = 0;
      while (lead < dim && v[lead] == 0) ++lead;
      cur.push_back(x);
      if (lead == dim) {
        const Subset s(g, cur);
        if (is_independent(s).independent) {
          ++out.violations;  // modular rank dropped; never seen
        } else {
          ++out.minimal_dependent;
          if (table.quasi_independent(mask_of(cur))) ++out.violations;
        }
      } else {
        const std::uint64_t inv = F::inv(v[lead]);
        for (auto& c : v) c = F::mul(c, inv);
        rows.push_back({std::move(v), lead});
        self(self, rows, x + 1);
        rows.pop_back();
      }
      cur.pop_back();
    }
  };
  std::vector<Row> rows;
  rec(rec, rows, 0);
  return out;
}

Outcome ac3() {
  std::ostringstream d;
  bool ok = true;
  for (std::int64_t n : {15, 21}) {
    const auto r = pq_exhaustive(n);
    d << "Z_" << n << ": " << r.independent << " independent sets, " << r.minimal_dependent
      << " one-point dependent extensions, " << r.violations << " violations; ";
    ok = ok && r.violations == 0;
  }
  std::mt19937_64 rng(35);
  const auto g = GroupSpec::cyclic(35);
  std::uint64_t violations = 0, qi = 0;
  for (int i = 0; i < 100'000; ++i) {
    std::vector<Element> e;
    const std::size_t k = 1 + rng() % 30;
    for (std::size_t j = 0; j < k; ++j) e.push_back(static_cast<Element>(rng() % 35));
    const Subset s(g, e);
    const auto v = is_quasi_independent(s);
    const bool ind = is_independent(s).independent;
    qi += v.quasi_independent == Decision::yes;
    if (v.quasi_independent == Decision::undecided || ind != (v.quasi_independent == Decision::yes)) ++violations;
  }
  d << "Z_35: 100000 random subsets (" << qi << " QI), " << violations << " violations";
  return {ok && violations == 0, d.str()};
}

Outcome ac4() {
  std::uint64_t checks = 0, violations = 0;
  auto part123 = [&](std::int64_t n) {
    const auto g = GroupSpec::cyclic(n);
    const auto pr = g.primes();
    const std::size_t p1 = static_cast<std::size_t>(pr[0]);
    const std::size_t limit = static_cast<std::size_t>(pr[0] + pr[1] - 3);
    for_each_small_subset(n, limit, [&](const std::vector<Element>& e) {
      if (e.empty()) return;
      const Subset s(g, e);
      const auto v = is_quasi_independent(s);
      ++checks;
      if (e.size() < p1 && !is_independent(s).independent) ++violations;
      if (e.size() == p1) {
        bool coset = true;
        for (std::size_t i = 1; i < e.size(); ++i) coset = coset && mod(e[i] - e[0], n) % (n / pr[0]) == 0;
        if ((v.quasi_independent == Decision::yes) == coset) ++violations;
      }
      if ((v.quasi_independent == Decision::yes) == contains_prime_coset(g, e)) ++violations;
    });
  };
  auto part4 = [&](std::int64_t n) {
    const auto g = GroupSpec::cyclic(n);
    const auto pr = g.primes();
    std::vector<Element> e;
    std::vector<std::pair<Element, Rational>> f;
    for (Element x = 1; x < n; ++x) {
      const bool in1 = x % (n / pr[0]) == 0, in2 = x % (n / pr[1]) == 0;
      if (in1 || in2) e.push_back(x);
      if (in1) f.emplace_back(x, Rational(1));
      if (in2) f.emplace_back(x, Rational(-1));
    }
    ++checks;
    const Subset s(g, e);
    const auto v = is_quasi_independent(s);
    if (static_cast<std::int64_t>(e.size()) != pr[0] + pr[1] - 2) ++violations;
    if (v.quasi_independent != Decision::no) ++violations;
    if (!cyclotomic_is_relation(g, f)) ++violations;
    if (relation_dimension(s) != 1) ++violations;
  };
  part123(15);
  part123(21);
  part4(15);
  part4(21);
  // Z_105: pairs exhaustively, size-3 and 4, 5 sets by construction (random,
  // with and without a planted coset of Z_3 or Z_5), and the part-4 set.
  const auto g = GroupSpec::cyclic(105);
  for (Element a = 0; a < 105; ++a) {
    for (Element b = a + 1; b < 105; ++b) {
      ++checks;
      if (!is_independent(Subset(g, {a, b})).independent) ++violations;
    }
  }
  std::mt19937_64 rng(105);
  for (int i = 0; i < 20000; ++i) {
    std::vector<Element> e;
    const std::size_t k = 3 + rng() % 3;
    if (i % 2) {
      const std::int64_t p = i % 4 == 1 ? 3 : 5;
      const Element base = static_cast<Element>(rng() % 105);
      for (std::int64_t t = 0; t < p; ++t) e.push_back(mod(base + t * (105 / p), 105));
    }
    while (e.size() < k) e.push_back(static_cast<Element>(rng() % 105));
    const Subset s(g, e);
    if (s.size() > 5) continue;
    ++checks;
    const bool qi = is_quasi_independent(s).quasi_independent == Decision::yes;
    if (qi == contains_prime_coset(g, s.elements())) ++violations;
    if (s.size() == 3) {
      bool coset = true;
      for (std::size_t j = 1; j < 3; ++j) coset = coset && mod(s.elements()[j] - s.elements()[0], 105) % 35 == 0;
      if (qi == coset) ++violations;
    }
  }
  part4(105);
  return {violations == 0, std::to_string(checks) + " checks of parts 1-4 on Z_15, Z_21 (exhaustive) and Z_105, " +
                               std::to_string(violations) + " violations"};
}

Outcome ac5() {
  const auto g = GroupSpec::cyclic(15);
  std::uint64_t mismatches = 0, products = 0, randoms = 0, counterexamples = 0;
  std::vector<Element> s3 = {0, 1, 2};
  do {
    std::vector<Element> s5 = {0, 1, 2, 3, 4};
    do {
      const Perm p = compose(make_type1(g, 0, s3), make_type1(g, 1, s5));
      ++products;
      const auto r = preserves_qi(p);
      if (!r.preserves || !r.exhaustive || !classify(p)) ++mismatches;
    } while (std::next_permutation(s5.begin(), s5.end()));
  } while (std::next_permutation(s3.begin(), s3.end()));
  std::mt19937_64 rng(15);
  std::vector<Element> img(15);
  std::iota(img.begin(), img.end(), 0);
  while (randoms < 10'000) {
    std::shuffle(img.begin(), img.end(), rng);
    const Perm p(g, img);
    if (detail::coordinate_factors(compose(make_translation(g, -p(0)), p))) continue;  // a product after all
    ++randoms;
    const auto r = preserves_qi(p);
    if (r.preserves || !r.counterexample) {
      ++mismatches;
      continue;
    }
    const auto& e = *r.counterexample;
    if ((oracle_is_quasi_independent(e).quasi_independent) == (oracle_is_quasi_independent(p.apply(e)).quasi_independent)) {
      ++mismatches;
    } else {
      ++counterexamples;
    }
    if (classify(p)) ++mismatches;
  }
  return {mismatches == 0 && products == 720,
          std::to_string(products) + " product permutations preserve (exhaustive 2^15 scan), " +
              std::to_string(randoms) + " random non-products with " + std::to_string(counterexamples) +
              " oracle-confirmed counterexamples, " + std::to_string(mismatches) + " classify/preservation mismatches"};
}

Outcome ac6() {
  const auto g = GroupSpec::cyclic(15);
  const QiTable t21 = QiTable::build(GroupSpec::cyclic(21));
  std::mt19937_64 rng(6);
  std::uint64_t ok = 0, bad = 0;
  const auto psi3 = psi(GroupSpec::cyclic(3));
  std::set<std::vector<Element>> seen;
  while (seen.size() < 100) {
    std::vector<Element> all(15);
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<Element> e;
    const std::size_t target = 1 + rng() % 8;
    for (auto x : all) {
      if (e.size() == target) break;
      auto t = e;
      t.push_back(x);
      if (is_quasi_independent(Subset(g, t)).quasi_independent == Decision::yes) e = std::move(t);
    }
    std::sort(e.begin(), e.end());
    if (!seen.insert(e).second) continue;
    const Subset s(g, e);
    for (std::int64_t q : {7, 11}) {
      ExtensionPlan plan{15, 2, 5, q, 3, psi3.value, std::vector<std::vector<Element>>(static_cast<std::size_t>(q - 5), psi3.witness)};
      const Subset r = extend(s, plan, false);
      bool good = static_cast<std::int64_t>(r.size()) == static_cast<std::int64_t>(s.size()) + (q - 5) * psi3.value;
      good = good && is_quasi_independent(r).quasi_independent == Decision::yes;
      good = good && coset_reduction_test(r).quasi_independent == Decision::yes;
      if (q == 7) good = good && t21.quasi_independent(r.mask());
      (good ? ok : bad) += 1;
    }
  }
  return {bad == 0, std::to_string(ok + bad) + " extensions of 100 random QI sets of Z_15 to Z_21 and Z_33 (Psi(3) = " +
                        std::to_string(psi3.value) + "), " + std::to_string(bad) + " failures"};
}

Outcome ac7() {
  const auto r = verify_dataset("lattice-3x6x9-85");
  std::ostringstream d;
  bool documented_ok = false;
  for (const auto& x : r.readings) {
    d << x.name << ": size " << x.size << ", " << to_string(x.quasi_independent) << "; ";
    if (x.name.rfind("by-layers", 0) == 0 && x.size == 85 && x.quasi_independent == Decision::yes) documented_ok = true;
  }
  d << "accepted reading: " << (r.accepted ? *r.accepted : std::string("none"));
  if (!documented_ok) d << " (neither reading of layer 8 in the by-layer listing gives 85 QI elements)";
  return {documented_ok, d.str()};
}

Outcome ac8(double long_run_seconds) {
  const auto e = psi(GroupSpec::cyclic(105));
  std::ostringstream d;
  bool ok = e.value == 52 && !e.exact();
  try {
    verify_entry(e);
    ok = ok && coset_reduction_test(Subset(e.group, e.witness)).quasi_independent == Decision::yes;
  } catch (const std::exception& ex) {
    ok = false;
    d << "witness rejected: " << ex.what() << "; ";
  }
  d << "default: Psi(105) >= " << e.value << " (" << to_string(e.status) << ", " << e.provenance.kind << "), witness verified";
  PsiOptions lr;
  lr.long_run = true;
  lr.long_run_search.time_cap_seconds = long_run_seconds;
  const auto l = psi(GroupSpec::cyclic(105), lr);
  const bool sound = l.exact() ? l.value == 52 : l.value >= 52;
  ok = ok && sound;
  d << "; long run capped at " << long_run_seconds << " s: " << l.value << " " << to_string(l.status);
  if (l.stats) d << " after " << l.stats->nodes << " nodes" << (l.stats->exhausted ? "" : ", cap reached");
  return {ok, d.str()};
}

Outcome ac9() {
  std::ostringstream d;
  bool ok = true;
  for (auto [q, target, n] : std::vector<std::array<std::int64_t, 3>>{{11, 84, 165}, {13, 100, 195}}) {
    std::optional<PsiEntry> got;
    for (const auto& b : monotonicity_bounds(105, 3, q)) {
      if (b.rule == "delta-phi") got = b.entry;
    }
    bool good = got && got->group.order() == n && got->value == target && got->value == euler_phi(n) + 4;
    if (got) {
      try {
        verify_entry(*got);
      } catch (const std::exception&) {
        good = false;
      }
      good = good && static_cast<std::int64_t>(got->witness.size()) >= target;
      good = good && coset_reduction_test(Subset(got->group, got->witness)).quasi_independent == Decision::yes;
    }
    ok = ok && good;
    d << "Psi(" << n << ") >= " << (got ? got->value : -1) << " (witness " << (got ? got->witness.size() : 0)
      << ", " << (good ? "verified" : "FAILED") << "); ";
  }
  return {ok, d.str() + "from Psi(105) >= phi(105) + 4"};
}

Outcome ac10() {
  std::mt19937_64 rng(10);
  std::uint64_t verdicts = 0, negatives = 0, failures = 0;
  while (verdicts < 10'000) {
    const std::int64_t n = 3 + static_cast<std::int64_t>(rng() % 58);
    const auto g = GroupSpec::cyclic(n);
    std::vector<Element> e;
    const std::size_t k = 1 + rng() % 16;
    for (std::size_t j = 0; j < k; ++j) e.push_back(static_cast<Element>(rng() % static_cast<std::uint64_t>(n)));
    const Subset s(g, e);
    const auto v = is_quasi_independent(s);
    ++verdicts;
    if (v.quasi_independent == Decision::undecided) {
      ++failures;
      continue;
    }
    if (v.relation_witness && !cyclotomic_is_relation(g, v.relation_witness->terms)) ++failures;
    if (v.quasi_independent == Decision::no) {
      ++negatives;
      if (!v.quasi_witness || !v.quasi_witness->is_quasi() || !cyclotomic_is_relation(g, v.quasi_witness->terms)) ++failures;
    } else if (!oracle_is_quasi_independent(s).quasi_independent) {
      ++failures;
    }
  }
  std::vector<std::int64_t> bad_rank;
  for (std::int64_t n = 2; n <= 60; ++n) {
    const auto g = GroupSpec::cyclic(n);
    const auto b = structured_basis(g);
    std::vector<Vec> rows;
    bool relations = true;
    for (const auto& r : b.vectors) {
      Vec v(static_cast<std::size_t>(n), Rational(0));
      for (const auto& [x, c] : r.terms) v[static_cast<std::size_t>(x)] = c;
      rows.push_back(std::move(v));
      relations = relations && cyclotomic_is_relation(g, r.terms);
    }
    if (!relations || static_cast<std::int64_t>(rank(rows, static_cast<std::size_t>(n))) != n - euler_phi(n)) {
      bad_rank.push_back(n);
    }
  }
  return {failures == 0 && bad_rank.empty(),
          std::to_string(verdicts) + " random verdicts (" + std::to_string(negatives) +
              " negative) re-verified by the cyclotomic remainder and the oracle, " + std::to_string(failures) +
              " failures; basis rank n - phi(n) for n = 2..60" +
              (bad_rank.empty() ? "" : ", wrong for " + join(bad_rank))};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> only;
  double long_run_seconds = 60;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string t; std::getline(ss, t, ',');) only.insert(t);
    } else if (a == "--long-run-seconds" && i + 1 < argc) {
      long_run_seconds = std::stod(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--only AC1,AC2,...] [--long-run-seconds S]\n";
      return 3;
    }
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> suite = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", [&] { return ac8(long_run_seconds); }}, {"AC9", ac9}, {"AC10", ac10}};
  int failed = 0;
  for (const auto& [name, run] : suite) {
    if (!only.empty() && !only.count(name)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%-4s %s  %s [%.1fs]\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(), s);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
