#include <gtest/gtest.h>

#include <random>

#include "qindep/relations.hpp"

using namespace qindep;

TEST(Basis, DimensionsMatchRelationSpace) {
  for (std::int64_t n : {2, 3, 6, 12, 15, 30, 36, 105}) {
    const auto g = GroupSpec::cyclic(n);
    const auto b = structured_basis(g);
    EXPECT_EQ(static_cast<std::int64_t>(b.dimension()), n - euler_phi(n)) << n;
    for (const auto& r : b.vectors) EXPECT_TRUE(is_relation(r));
  }
  const auto l = GroupSpec::parse("3x6x9");
  EXPECT_EQ(structured_basis(l).dimension(), 82u);
}

TEST(Tester, CosetOfSmallestPrime) {
  const auto g = GroupSpec::cyclic(15);
  const auto v = is_quasi_independent(Subset(g, {0, 5, 10}));
  EXPECT_EQ(v.quasi_independent, Decision::no);
  EXPECT_FALSE(v.independent);
  const auto w = is_quasi_independent(Subset(g, {0, 5, 11}));
  EXPECT_EQ(w.quasi_independent, Decision::yes);
  EXPECT_TRUE(w.independent);
}

TEST(Tester, TwoAxesMinusZero) {
  const auto g = GroupSpec::cyclic(15);
  const Subset e(g, {3, 5, 6, 9, 10, 12});
  for (auto f : {is_quasi_independent, coset_reduction_test, structural_test}) {
    const auto v = f(e, Budget{});
    EXPECT_EQ(v.quasi_independent, Decision::no);
  }
  EXPECT_FALSE(oracle_is_quasi_independent(e).quasi_independent);
}

TEST(Tester, UnitsOfPrimePowerNotQi) {
  const auto g = GroupSpec::cyclic(9);
  const Subset e(g, {1, 2, 4, 5, 7, 8});
  EXPECT_EQ(is_quasi_independent(e).quasi_independent, Decision::no);
  EXPECT_FALSE(oracle_is_quasi_independent(e).quasi_independent);
  const Subset top(g, {3, 4, 5, 6, 7, 8});
  EXPECT_EQ(is_quasi_independent(top).quasi_independent, Decision::yes);
  EXPECT_TRUE(oracle_is_quasi_independent(top).quasi_independent);
}

// ---------------------------------------------------------------------------
// Properties

namespace {

std::vector<Element> random_elements(std::int64_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<Element> e;
  for (std::size_t i = 0; i < k; ++i) e.push_back(static_cast<Element>(rng() % static_cast<std::uint64_t>(n)));
  return e;
}

}  // namespace

TEST(Tester, EmptySetAndZero) {
  const auto g = GroupSpec::cyclic(15);
  EXPECT_EQ(is_quasi_independent(Subset(g)).quasi_independent, Decision::yes);
  EXPECT_TRUE(is_independent(Subset(g)).independent);
  // 0 stands for the root of unity 1.
  EXPECT_EQ(is_quasi_independent(Subset(g, {0})).quasi_independent, Decision::yes);
  EXPECT_TRUE(is_independent(Subset(g, {0})).independent);
}

TEST(Tester, OracleAgreementUpToThirty) {
  std::mt19937_64 rng(30);
  for (std::int64_t n = 3; n <= 30; ++n) {
    const auto g = GroupSpec::cyclic(n);
    for (int i = 0; i < 60; ++i) {
      const Subset e(g, random_elements(n, 1 + rng() % 10, rng));
      const bool truth = oracle_is_quasi_independent(e).quasi_independent;
      const auto want = truth ? Decision::yes : Decision::no;
      ASSERT_EQ(is_quasi_independent(e).quasi_independent, want) << to_string(e);
      ASSERT_EQ(coset_reduction_test(e).quasi_independent, want) << to_string(e);
      ASSERT_EQ(structural_test(e).quasi_independent, want) << to_string(e);
    }
  }
}

TEST(Tester, OracleAgreementOnLattice) {
  std::mt19937_64 rng(369);
  const auto g = GroupSpec::parse("3x6x9");
  for (int i = 0; i < 150; ++i) {
    const Subset e(g, random_elements(g.order(), 1 + rng() % 10, rng));
    const bool truth = oracle_is_quasi_independent(e).quasi_independent;
    ASSERT_EQ(is_quasi_independent(e).quasi_independent, truth ? Decision::yes : Decision::no) << to_string(e);
  }
}

TEST(Tester, WitnessesAreSoundRelations) {
  std::mt19937_64 rng(4);
  for (std::int64_t n : {12, 18, 30, 36, 42, 60, 105}) {
    const auto g = GroupSpec::cyclic(n);
    for (int i = 0; i < 40; ++i) {
      const Subset e(g, random_elements(n, 2 + rng() % 20, rng));
      const auto v = is_quasi_independent(e);
      if (v.quasi_witness) {
        EXPECT_TRUE(v.quasi_witness->is_quasi());
        EXPECT_FALSE(v.quasi_witness->is_zero());
        EXPECT_TRUE(cyclotomic_is_relation(g, v.quasi_witness->terms));
        for (auto x : v.quasi_witness->support()) EXPECT_TRUE(e.contains(x));
      }
      if (v.relation_witness) {
        EXPECT_TRUE(cyclotomic_is_relation(g, v.relation_witness->terms));
      }
      EXPECT_EQ(v.quasi_independent == Decision::no, v.quasi_witness.has_value());
    }
  }
}

TEST(Tester, RotationInvariance) {
  std::mt19937_64 rng(8);
  for (std::int64_t n : {15, 20, 21, 28}) {
    const auto g = GroupSpec::cyclic(n);
    for (int i = 0; i < 30; ++i) {
      const Subset e(g, random_elements(n, 3 + rng() % 10, rng));
      const auto d = is_quasi_independent(e).quasi_independent;
      for (Element t = 1; t < n; t += 3) EXPECT_EQ(is_quasi_independent(e.translate(t)).quasi_independent, d);
    }
  }
}

// Sets meeting each Z_m-coset at most once (n = m p, odd square-free).
TEST(Tester, SpikeIndependence) {
  for (auto [m, p] : std::vector<std::pair<std::int64_t, std::int64_t>>{{3, 5}, {5, 3}, {3, 7}, {7, 3}}) {
    const std::int64_t n = m * p;
    const auto g = GroupSpec::cyclic(n);
    std::vector<Element> cur;
    auto rec = [&](auto&& self, Element from) -> void {
      if (!cur.empty()) {
        const Subset e(g, cur);
        const bool ind = is_independent(e).independent;
        if (static_cast<std::int64_t>(cur.size()) < p) {
          ASSERT_TRUE(ind) << to_string(e);
        } else {
          bool coset = true;
          for (auto x : cur) coset = coset && mod(x - cur[0], n) % m == 0;
          ASSERT_EQ(ind, !coset) << to_string(e);
        }
      }
      if (static_cast<std::int64_t>(cur.size()) == p) return;
      for (Element x = from; x < n; ++x) {
        bool clash = false;
        for (auto y : cur) clash = clash || mod(x - y, p) == 0;  // same coset of Z_m = p Z_n
        if (clash) continue;
        cur.push_back(x);
        self(self, x + 1);
        cur.pop_back();
      }
    };
    rec(rec, 0);
  }
}

TEST(Tester, TinyBudgetNeverLies) {
  std::mt19937_64 rng(9);
  const auto g = GroupSpec::cyclic(105);
  Budget tiny;
  tiny.dim_cap = 2;
  tiny.node_cap = 10;
  std::size_t undecided = 0;
  for (int i = 0; i < 40; ++i) {
    const Subset e(g, random_elements(105, 20 + rng() % 30, rng));
    const auto full = structural_test(e).quasi_independent;
    const auto cut = structural_test(e, tiny).quasi_independent;
    if (cut == Decision::undecided) {
      ++undecided;
    } else {
      EXPECT_EQ(cut, full) << to_string(e);
    }
  }
  EXPECT_GT(undecided, 0u);
}
