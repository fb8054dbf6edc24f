#include <gtest/gtest.h>

#include "oracles.hpp"
#include "walkthrough_support.hpp"

using namespace pirlab;

namespace {

const PrimeField F(101);

MessageStore random_store(std::size_t K, std::size_t L, std::uint64_t seed) {
  SeededSource src(seed, "store");
  return MessageStore::random(F, K, L, src);
}

std::size_t binomial(std::size_t n, std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

}  // namespace

TEST(Cgks, DecodesAtHalfRate) {
  const auto store = random_store(3, 1, 1);
  for (std::size_t theta = 1; theta <= 3; ++theta) {
    SeededSource src(theta, "cgks");
    const auto r = cgks_round(store, theta, src);
    EXPECT_EQ(r.decoded, store.message(theta));
    EXPECT_EQ(empirical_rate(r.transcript).rate, Rational(1, 2));
  }
}

TEST(Cgks, SecondQueryDiffersOnlyAtTheta) {
  SeededSource src(5, "q");
  const auto pair = cgks_queries(F, 4, 3, src);
  const auto a = std::get<LinearQuery>(pair.for_database(1).body).coefficients;
  const auto b = std::get<LinearQuery>(pair.for_database(2).body).coefficients;
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ((b[k] - a[k]).value(), k == 2 ? 1U : 0U);
}

TEST(Cgks, RejectsUnsupportedShapes) {
  SeededSource src(1);
  auto three = replicate(random_store(2, 1, 1), 3);
  EXPECT_THROW(cgks_round(three, 1, src), InvalidArgument);
  EXPECT_THROW(cgks_round(random_store(2, 2, 1), 1, src), InvalidArgument);
  EXPECT_THROW(cgks_round(random_store(2, 1, 1), 3, src), InvalidArgument);
}

TEST(Residual, RateIsOneMinusOneOverN) {
  for (std::size_t N = 2; N <= 6; ++N) {
    const auto store = random_store(3, 2 * (N - 1), N);
    SeededSource src(N, "residual");
    const auto r = residual_round(store, N, 2, src);
    EXPECT_EQ(r.decoded, store.message(2));
    EXPECT_EQ(empirical_rate(r.transcript).rate, Rational(N - 1, N));
  }
}

TEST(Residual, RejectsRaggedMessages) {
  SeededSource src(1);
  EXPECT_THROW(residual_round(random_store(2, 3, 1), 3, 1, src), InvalidArgument);
}

TEST(SunJafar, RateMatchesCapacityOracle) {
  for (std::size_t N = 2; N <= 3; ++N)
    for (std::size_t K = 1; K <= 3; ++K)
      for (std::size_t theta = 1; theta <= K; ++theta) {
        const std::size_t sub = detail::ipow(N, K);
        const auto store = random_store(K, 2 * sub, N * 10 + K);
        SeededSource src(theta, "sj");
        const auto r = sunjafar_round(store, N, theta, src);
        EXPECT_EQ(r.decoded, store.message(theta)) << N << K << theta;
        EXPECT_EQ(empirical_rate(r.transcript).rate, Rational(oracle::pir_capacity(N, K)));
      }
}

TEST(SunJafar, EveryDatabaseSeesTheSameRequestProfile) {
  const std::size_t N = 3;
  const std::size_t K = 3;
  for (std::size_t theta = 1; theta <= K; ++theta) {
    SeededSource src(theta);
    const auto plan = sunjafar_plan(N, K, theta, src);
    for (std::size_t n = 1; n <= N; ++n) {
      std::map<std::size_t, std::size_t> by_size;
      for (const auto& req : plan.requests[n - 1]) ++by_size[req.size()];
      for (std::size_t t = 1; t <= K; ++t) EXPECT_EQ(by_size[t], binomial(K, t) * detail::ipow(N - 1, t - 1));
    }
  }
}

TEST(SunJafar, IdentityPlanReproducesTheTwoByTwoTable) {
  const auto store = walk::marker_store(2, 4);
  const auto names = walk::symbol_names(2, 4);
  const std::map<std::size_t, std::vector<std::vector<std::string>>> expected = {
      {1, {{"a1", "b1", "a3+b2"}, {"a2", "b2", "a4+b1"}}},
      {2, {{"a1", "b1", "a2+b3"}, {"a2", "b2", "a1+b4"}}},
  };
  for (const auto& [theta, per_db] : expected) {
    auto src = walk::identity_source();
    const auto r = sunjafar_round(store, 2, theta, src);
    for (std::size_t n = 0; n < 2; ++n) {
      std::vector<std::string> got;
      for (const auto& a : r.transcript.per_db[n].answers.front()) got.push_back(walk::terms(a, names));
      EXPECT_EQ(got, per_db[n]) << "theta " << theta << " db " << n + 1;
    }
    EXPECT_EQ(r.decoded, store.message(theta));
  }
}

TEST(Tian, QuerySumsIdentifyTheDatabase) {
  for (std::size_t N = 2; N <= 4; ++N)
    for (std::size_t theta = 1; theta <= 3; ++theta) {
      SeededSource src(N * theta);
      const auto q = tian_query(N, 3, theta, tian_random_key(N, 3, src));
      for (std::size_t n = 1; n <= N; ++n) {
        std::size_t sum = 0;
        for (auto v : q.per_db[n - 1]) sum += v;
        EXPECT_EQ(sum % N, n - 1);
      }
    }
}

TEST(Tian, ZeroKeyIdlesOneDatabase) {
  const auto store = random_store(3, 2, 9);
  const auto r = tian_round(store, 3, 2, {0, 0});
  EXPECT_EQ(r.transcript.per_db[0].downloaded_symbols, 0U);
  EXPECT_EQ(r.transcript.downloaded_symbols(), 2U);
  EXPECT_EQ(r.decoded, store.message(2));
}

TEST(Tian, ExpectedRateEqualsCapacity) {
  for (std::size_t N = 2; N <= 3; ++N)
    for (std::size_t K = 2; K <= 3; ++K) {
      const auto store = random_store(K, 2 * (N - 1), N + K);
      for (std::size_t theta = 1; theta <= K; ++theta) {
        EXPECT_EQ(tian_enumerated_rate(store, N, theta), Rational(oracle::pir_capacity(N, K)));
      }
      EXPECT_EQ(tian_expected_rate(N, K), Rational(oracle::pir_capacity(N, K)));
    }
}

TEST(Tian, RejectsBadKeys) {
  EXPECT_THROW(tian_query(3, 3, 1, {0}), InvalidArgument);
  EXPECT_THROW(tian_query(3, 3, 1, {0, 3}), InvalidArgument);
  EXPECT_THROW(tian_query(1, 3, 1, {0, 0}), InvalidArgument);
}

TEST(Leaky, EveryRowDecodesAndExpectedRateIsTwoThirds) {
  const auto store = random_store(2, 3, 4);
  for (std::size_t theta = 1; theta <= 2; ++theta) {
    for (std::size_t row = 0; row < 4; ++row) {
      auto dbs = replicate(store, 2);
      EXPECT_EQ(leaky_round_row(dbs, theta, row).decoded, store.message(theta));
    }
    EXPECT_EQ(leaky_expected_rate(store, theta), Rational(2, 3));
  }
}

TEST(Leaky, OnlyTwoByTwo) {
  SeededSource src(1);
  EXPECT_THROW(leaky_round(random_store(3, 1, 1), 1, src), InvalidArgument);
  auto three = replicate(random_store(2, 1, 1), 3);
  EXPECT_THROW(leaky_round(three, 1, src), InvalidArgument);
}
