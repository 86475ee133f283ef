#include <gtest/gtest.h>

#include <random>

#include "qindep/certificate.hpp"

using namespace qindep;

namespace {

Subset random_subset(const GroupSpec& g, std::size_t k, std::mt19937_64& rng) {
  std::vector<Element> e;
  for (std::size_t i = 0; i < k; ++i) e.push_back(static_cast<Element>(rng() % static_cast<std::uint64_t>(g.order())));
  return Subset(g, std::move(e));
}

}  // namespace

TEST(Certificate, NegativeRoundTrip) {
  const auto g = GroupSpec::cyclic(15);
  const Subset e(g, {5, 10, 3, 6, 9, 12});
  const auto j = make_certificate(e, is_quasi_independent(e));
  EXPECT_EQ(j["schema"], kCertificateSchema);
  EXPECT_EQ(j["verdict"], "not-quasi-independent");
  const auto c = verify_certificate(nlohmann::json::parse(j.dump()));
  EXPECT_TRUE(c.ok) << c.message;
}

TEST(Certificate, PositiveRoundTrip) {
  const auto g = GroupSpec::cyclic(21);
  const Subset e(g, {1, 2, 4, 5, 8});
  const auto c = verify_certificate(make_certificate(e, is_quasi_independent(e)));
  EXPECT_TRUE(c.ok) << c.message;
}

TEST(Certificate, LatticeRoundTrip) {
  const auto g = GroupSpec::lattice({3, 4});
  std::vector<Element> row;
  for (std::int64_t j = 0; j < 4; ++j) row.push_back(g.index({0, j}));
  const Subset e(g, row);
  const auto v = is_quasi_independent(e);
  EXPECT_EQ(v.quasi_independent, Decision::no);
  EXPECT_TRUE(verify_certificate(make_certificate(e, v)).ok);
}

TEST(Certificate, TamperingIsCaught) {
  const auto g = GroupSpec::cyclic(15);
  const Subset e(g, {5, 10, 3, 6, 9, 12});
  auto j = make_certificate(e, is_quasi_independent(e));

  auto flipped = j;
  flipped["quasi_witness"][0][1] = "-1";
  flipped["quasi_witness"][1][1] = "-1";
  flipped["quasi_witness"][2][1] = "-1";
  EXPECT_FALSE(verify_certificate(flipped).ok);

  auto claimed_yes = j;
  claimed_yes["verdict"] = "quasi-independent";
  claimed_yes["independent"] = true;
  EXPECT_FALSE(verify_certificate(claimed_yes).ok);

  auto schema = j;
  schema["schema"] = "other/1";
  EXPECT_FALSE(verify_certificate(schema).ok);

  auto outside = j;
  outside["subset"] = {5, 10, 3, 6, 9};
  EXPECT_FALSE(verify_certificate(outside).ok);

  const Subset qi(g, {1, 2, 4});
  auto forged = make_certificate(qi, is_quasi_independent(qi));
  forged["verdict"] = "not-quasi-independent";
  EXPECT_FALSE(verify_certificate(forged).ok);
}

// Every negative witness passes the cyclotomic check, every positive verdict
// agrees with the oracle.
TEST(Certificate, RandomVerdicts) {
  std::mt19937_64 rng(17);
  for (std::int64_t n : {12, 15, 18, 20, 21, 30}) {
    const auto g = GroupSpec::cyclic(n);
    for (int i = 0; i < 150; ++i) {
      const auto e = random_subset(g, 1 + rng() % 12, rng);
      const auto v = is_quasi_independent(e);
      ASSERT_NE(v.quasi_independent, Decision::undecided);
      if (v.quasi_independent == Decision::no) {
        ASSERT_TRUE(v.quasi_witness.has_value());
        EXPECT_TRUE(cyclotomic_is_relation(g, v.quasi_witness->terms));
      }
      EXPECT_EQ(v.quasi_independent == Decision::yes, oracle_is_quasi_independent(e).quasi_independent);
      EXPECT_TRUE(verify_certificate(make_certificate(e, v)).ok);
    }
  }
}
