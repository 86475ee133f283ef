#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "qindep/permutations.hpp"

using namespace qindep;

namespace {

Perm transposition(const GroupSpec& g, Element a, Element b) {
  auto p = Perm::identity(g);
  std::swap(p.images[static_cast<std::size_t>(a)], p.images[static_cast<std::size_t>(b)]);
  return p;
}

Perm random_perm(const GroupSpec& g, std::mt19937_64& rng) {
  std::vector<Element> img(static_cast<std::size_t>(g.order()));
  std::iota(img.begin(), img.end(), 0);
  std::shuffle(img.begin(), img.end(), rng);
  return Perm(g, std::move(img));
}

/// Random coordinate product on Z_15 composed with a translation.
Perm random_product_15(std::mt19937_64& rng) {
  const auto g = GroupSpec::cyclic(15);
  std::vector<Element> s3 = {0, 1, 2}, s5 = {0, 1, 2, 3, 4};
  std::shuffle(s3.begin(), s3.end(), rng);
  std::shuffle(s5.begin(), s5.end(), rng);
  const Perm p = compose(make_type1(g, 0, s3), make_type1(g, 1, s5));
  return compose(make_translation(g, static_cast<Element>(rng() % 15)), p);
}

}  // namespace

TEST(Perm, ParseAndPrint) {
  const auto p = Perm::parse("5:1,2,3,4,0");
  EXPECT_EQ(p.str(), "5:1,2,3,4,0");
  EXPECT_EQ(p, make_translation(GroupSpec::cyclic(5), 1));
  EXPECT_THROW(Perm::parse("5:1,2,3,4"), InvalidInput);
  EXPECT_THROW(Perm::parse("5:1,1,3,4,0"), InvalidInput);
  EXPECT_THROW(Perm::parse("1,2,3"), InvalidInput);
}

TEST(Perm, ComposeInverse) {
  const auto g = GroupSpec::cyclic(12);
  const auto a = make_affine(g, 5, 3);
  const auto b = transposition(g, 1, 7);
  EXPECT_TRUE(compose(a, inverse(a)).is_identity());
  EXPECT_EQ(compose(a, b)(1), a(7));
}

TEST(Type1, AllFactorsOnZ3Preserve) {
  const auto g = GroupSpec::cyclic(15);
  std::vector<Element> s = {0, 1, 2};
  do {
    const auto p = make_type1(g, 0, s);
    EXPECT_TRUE(preserves_qi(p).preserves);
    EXPECT_TRUE(is_coset_structured(p));
  } while (std::next_permutation(s.begin(), s.end()));
  EXPECT_TRUE(make_type1(g, 0, {0, 1, 2}).is_identity());
}

TEST(Type1, PrimePowerAxis) {
  const auto g = GroupSpec::cyclic(9);
  // Permutes the coset {0,3,6} and maps {1,4,7} to {2,5,8}.
  const auto p = make_type1(g, 0, {3, 2, 1, 6, 5, 4, 0, 8, 7});
  EXPECT_TRUE(preserves_qi(p).preserves);
  EXPECT_THROW(make_type1(g, 0, {1, 0, 2, 3, 4, 5, 6, 7, 8}), InvalidInput);
  EXPECT_THROW(make_type1(g, 1, {0, 1, 2}), InvalidInput);
}

TEST(Type2, SwapsInsideZ2Cosets) {
  const auto g = GroupSpec::cyclic(6);
  const auto p = make_type2(g, {false, true, false});
  EXPECT_EQ(p(1), 4);
  EXPECT_EQ(p(4), 1);
  EXPECT_EQ(p(0), 0);
  EXPECT_TRUE(preserves_qi(p).preserves);
  EXPECT_TRUE(make_type2(g, {false, false, false}).is_identity());
  EXPECT_THROW(make_type2(GroupSpec::cyclic(15), std::vector<bool>(7)), InvalidInput);
}

TEST(Type3And4, Z12) {
  const auto g = GroupSpec::cyclic(12);
  const auto t3 = make_type3(g, {1, 0});
  EXPECT_TRUE(preserves_qi(t3).preserves);
  const auto t4 = make_type4(g, make_translation(GroupSpec::cyclic(6), 1));
  EXPECT_EQ(t4(0), 2);
  EXPECT_EQ(t4(1), 1);
  EXPECT_TRUE(preserves_qi(t4).preserves);
  EXPECT_TRUE(make_type3(GroupSpec::cyclic(15), {0}).is_identity());
  EXPECT_THROW(make_type3(g, {0, 0}), InvalidInput);
  EXPECT_THROW(make_type4(g, transposition(GroupSpec::cyclic(6), 1, 2)), InvalidInput);

  const auto f = classify(compose(t3, t4));
  ASSERT_TRUE(f.has_value());
  EXPECT_EQ(recompose(*f), compose(t3, t4));
}

TEST(Affine, UnitsAndTranslations) {
  const auto g = GroupSpec::cyclic(15);
  EXPECT_TRUE(preserves_qi(make_affine(g, 2, 0)).preserves);
  EXPECT_TRUE(preserves_qi(make_affine(g, 1, 3)).preserves);
  EXPECT_TRUE(is_coset_structured(make_affine(g, 7, 4)));
  EXPECT_THROW(make_affine(g, 3, 0), InvalidInput);
}

TEST(Preservation, TranspositionHasCounterexample) {
  const auto g = GroupSpec::cyclic(15);
  const auto p = transposition(g, 1, 2);
  const auto r = preserves_qi(p);
  EXPECT_FALSE(r.preserves);
  EXPECT_TRUE(r.exhaustive);
  ASSERT_TRUE(r.counterexample.has_value());
  const auto a = is_quasi_independent(*r.counterexample).quasi_independent;
  const auto b = is_quasi_independent(p.apply(*r.counterexample)).quasi_independent;
  EXPECT_NE(a, b);
  EXPECT_FALSE(is_coset_structured(p));
  EXPECT_FALSE(classify(p).has_value());
  EXPECT_TRUE(preserves_qi(Perm::identity(g)).preserves);
}

TEST(Preservation, BatteryIsOneSided) {
  const auto g = GroupSpec::cyclic(30);
  const auto good = make_affine(g, 7, 11);
  const auto r = preserves_qi(good, PreservationMode::battery, {3, 300, 5, {}});
  EXPECT_TRUE(r.preserves);
  EXPECT_FALSE(r.exhaustive);
  const auto bad = preserves_qi(transposition(g, 1, 2), PreservationMode::battery, {3, 300, 5, {}});
  EXPECT_FALSE(bad.preserves);
  EXPECT_THROW(preserves_qi(good), InvalidInput);
}

TEST(Classify, ProductWithTranslationRecovered) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_product_15(rng);
    const auto f = classify(p);
    ASSERT_TRUE(f.has_value()) << p.str();
    EXPECT_EQ(f->translation, p(0));
    EXPECT_EQ(recompose(*f), p);
    for (const auto& x : f->factors) EXPECT_TRUE(std::holds_alternative<Type1Factor>(x));
  }
}

// classify succeeds exactly when the permutation preserves, over every
// permutation of Z_n.
TEST(Classify, CompleteForSmallOrders) {
  for (std::int64_t n : {3, 4, 5, 6, 7, 8}) {
    const auto g = GroupSpec::cyclic(n);
    std::vector<Element> img(static_cast<std::size_t>(n));
    std::iota(img.begin(), img.end(), 0);
    std::size_t preserving = 0;
    do {
      const Perm p(g, img);
      const bool pres = preserves_qi(p).preserves;
      const bool cls = classify(p).has_value();
      ASSERT_EQ(pres, cls) << p.str();
      if (is_coset_structured(p)) {
        ASSERT_TRUE(pres) << p.str();
      }
      preserving += pres;
    } while (std::next_permutation(img.begin(), img.end()));
    EXPECT_GT(preserving, 0u) << n;
  }
}

TEST(Classify, RandomOddSquareFree) {
  std::mt19937_64 rng(11);
  const auto g = GroupSpec::cyclic(15);
  for (int i = 0; i < 3000; ++i) {
    const auto p = i % 2 ? random_product_15(rng) : random_perm(g, rng);
    ASSERT_EQ(preserves_qi(p).preserves, classify(p).has_value()) << p.str();
  }
}

TEST(Classify, StructuredSamplesOnZ12AndZ18) {
  std::mt19937_64 rng(3);
  for (std::int64_t n : {12, 18}) {
    const auto g = GroupSpec::cyclic(n);
    const std::int64_t rad = radical_of(n);
    std::vector<Perm> gens;
    std::vector<Element> reps(static_cast<std::size_t>(n / rad));
    std::iota(reps.begin(), reps.end(), 0);
    std::shuffle(reps.begin(), reps.end(), rng);
    gens.push_back(make_type3(g, reps));
    gens.push_back(make_type4(g, make_affine(GroupSpec::cyclic(rad), 5, 1), 1));
    std::vector<bool> sw(static_cast<std::size_t>(n / 2));
    for (std::size_t i = 0; i < sw.size(); ++i) sw[i] = rng() & 1;
    gens.push_back(make_type2(g, sw));
    gens.push_back(make_affine(g, n - 1, 2));
    for (int i = 0; i < 200; ++i) {
      Perm p = Perm::identity(g);
      for (int k = 0; k < 4; ++k) p = compose(p, gens[rng() % gens.size()]);
      const auto f = classify(p);
      ASSERT_TRUE(f.has_value()) << p.str();
      ASSERT_TRUE(preserves_qi(p).preserves) << p.str();
      EXPECT_EQ(recompose(*f), p);
    }
  }
}

TEST(Closure, ProductsAndInversesPreserve) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 40; ++i) {
    const auto a = random_product_15(rng);
    const auto b = make_affine(GroupSpec::cyclic(15), 2, static_cast<Element>(rng() % 15));
    EXPECT_TRUE(preserves_qi(compose(a, b)).preserves);
    EXPECT_TRUE(preserves_qi(inverse(a)).preserves);
  }
}

TEST(Classify, JsonNamesFactorTypes) {
  const auto g = GroupSpec::cyclic(12);
  const auto f = classify(make_type2(g, {true, false, false, false, false, false}));
  ASSERT_TRUE(f.has_value());
  const auto j = to_json(*f);
  EXPECT_EQ(j["group"], "12");
  ASSERT_FALSE(j["factors"].empty());
}
