#include <gtest/gtest.h>

#include "pirlab/databank.hpp"

using namespace pirlab;

namespace {

const PrimeField F7(7);

MessageStore small_store() { return MessageStore::from_values(F7, {{1, 2, 3, 4}, {5, 6, 0, 1}}); }

SymbolVector v(std::initializer_list<std::int64_t> xs) {
  SymbolVector out;
  for (auto x : xs) out.push_back(F7.element(x));
  return out;
}

}  // namespace

TEST(MessageStore, ShapeChecks) {
  EXPECT_THROW(MessageStore(F7, {}), InvalidArgument);
  EXPECT_THROW(MessageStore::from_values(F7, {{1, 2}, {3}}), InvalidArgument);
  EXPECT_THROW(MessageStore::from_values(F7, {{}}), InvalidArgument);
  EXPECT_THROW(MessageStore(F7, {SymbolVector{PrimeField(5).one()}}), FieldMismatch);
  const auto s = small_store();
  EXPECT_EQ(s.K(), 2U);
  EXPECT_EQ(s.L(), 4U);
  EXPECT_EQ(s.at(2, 1).value(), 6U);
  EXPECT_THROW(s.message(0), InvalidArgument);
  EXPECT_THROW(s.message(3), InvalidArgument);
}

TEST(DatabaseState, LinearAnswerIsDotProduct) {
  DatabaseState db(1, small_store());
  // 2 * W1[1] + 3 * W1[2] + 1 * W2[1] + 0 * W2[2]
  const auto a = db.serve(Query{"residual", LinearQuery{1, 2, v({2, 3, 1, 0})}});
  EXPECT_EQ(a, v({2 * 2 + 3 * 3 + 6}));
  EXPECT_EQ(db.log().size(), 1U);
}

TEST(DatabaseState, CombinationAnswerCoversEveryPosition) {
  DatabaseState db(2, small_store());
  EXPECT_EQ(db.serve(Query{"leaky", CombinationQuery{v({1, 1})}}), v({6, 8, 3, 5}));
}

TEST(DatabaseState, SumAnswerRepeatsPerSubpacket) {
  DatabaseState db(1, small_store());
  SumQuery q{2, {{SymbolRef{1, 0}}, {SymbolRef{1, 1}, SymbolRef{2, 0}}}};
  // subpacket 0: W1[0]=1, W1[1]+W2[0]=2+5; subpacket 1: W1[2]=3, W1[3]+W2[2]=4+0
  EXPECT_EQ(db.serve(Query{"sunjafar", q}), v({1, 0, 3, 4}));
}

TEST(DatabaseState, IndexAnswerTreatsZeroAsDummy) {
  DatabaseState db(1, small_store());
  // stride 2: W1 index 2 -> W1[1], W2 index 0 -> dummy
  EXPECT_EQ(db.serve(Query{"tian", IndexQuery{2, {2, 0}}}), v({2, 4}));
  EXPECT_EQ(db.serve(Query{"tian", IndexQuery{2, {0, 0}}}), v({0, 0}));
}

TEST(DatabaseState, RejectsMalformedQueries) {
  DatabaseState db(1, small_store());
  EXPECT_THROW(db.serve(Query{"residual", LinearQuery{3, 2, v({1, 1, 1, 1})}}), MalformedQuery);
  EXPECT_THROW(db.serve(Query{"residual", LinearQuery{0, 1, v({1})}}), MalformedQuery);
  EXPECT_THROW(db.serve(Query{"leaky", CombinationQuery{v({1})}}), MalformedQuery);
  EXPECT_THROW(db.serve(Query{"tian", IndexQuery{2, {3, 0}}}), MalformedQuery);
  EXPECT_THROW(db.serve(Query{"sunjafar", SumQuery{3, {}}}), MalformedQuery);
  EXPECT_THROW(db.serve(Query{"sunjafar", SumQuery{2, {{SymbolRef{3, 0}}}}}), InvalidArgument);
  EXPECT_TRUE(db.log().empty());
}

TEST(DatabaseState, UnknownSchemeOrWrongBodyIsRejected) {
  DatabaseState db(1, small_store());
  EXPECT_THROW(db.serve(Query{"nope", CombinationQuery{v({1, 0})}}), UnknownScheme);
  EXPECT_THROW(db.serve(Query{"tian", CombinationQuery{v({1, 0})}}), UnknownScheme);
  register_scheme("custom-comb", 1);
  EXPECT_EQ(db.serve(Query{"custom-comb", CombinationQuery{v({0, 1})}}), v({5, 6, 0, 1}));
}

TEST(CommonRandomnessPool, MasksAnswersAndNeverReusesSlots) {
  auto pool = CommonRandomnessPool(v({3, 4}));
  auto dbs = replicate(small_store(), 2);
  for (auto& db : dbs) db.attach_pool(pool.shared());
  const auto slot = pool.reserve(1);
  const Query q{"residual", LinearQuery{0, 1, v({1, 0})}};
  EXPECT_EQ(dbs[0].serve(q, slot), v({1 + 3}));
  EXPECT_EQ(dbs[1].serve(q, slot), v({1 + 3}));
  EXPECT_EQ(pool.reserve(1), 1U);
  EXPECT_EQ(pool.remaining(), 0U);
  EXPECT_THROW(pool.reserve(1), PoolExhausted);
  DatabaseState bare(3, small_store());
  EXPECT_THROW(bare.serve(q, 0), PoolExhausted);
}

TEST(Transcript, CountsSymbolsAndBits) {
  auto dbs = replicate(small_store(), 2);
  SchemeTranscript t("leaky", 2, 2, 4, 7, 1);
  exchange(dbs, t, 2, Query{"leaky", CombinationQuery{v({1, 0})}});
  EXPECT_EQ(t.per_db[0].downloaded_symbols, 0U);
  EXPECT_EQ(t.per_db[1].downloaded_symbols, 4U);
  EXPECT_EQ(t.per_db[1].uploaded_symbols, 2U);
  EXPECT_EQ(t.downloaded_bits(), 12U);
  EXPECT_EQ(empirical_rate(t).rate, Rational(1));
  EXPECT_FALSE(empirical_rate(t).pool_symbols_per_symbol.has_value());
  EXPECT_THROW(SchemeTranscript("leaky", 2, 2, 4, 7, 3), InvalidArgument);
}

TEST(Transcript, JsonSchema) {
  auto dbs = replicate(small_store(), 2);
  SchemeTranscript t("leaky", 2, 2, 4, 7, 2);
  exchange(dbs, t, 1, Query{"leaky", CombinationQuery{v({1, 1})}});
  exchange(dbs, t, 2, Query{"leaky", CombinationQuery{v({0, 1})}});
  const auto j = to_json(t);
  EXPECT_EQ(j["scheme"], "leaky");
  EXPECT_EQ(j["q"], "7");
  EXPECT_EQ(j["theta"], 2);
  EXPECT_EQ(j["per_db"].size(), 2U);
  EXPECT_EQ(j["per_db"][1]["downloaded_symbols"], 4);
  EXPECT_EQ(j["rate"], "1/2");
  std::vector<std::string> keys;
  for (const auto& [k, val] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"scheme", "N", "K", "L", "q", "theta", "per_db", "rate"}));
}

TEST(CostReport, MatchesCapacity) {
  CostReport r;
  r.rate = Rational(2, 3);
  EXPECT_FALSE(r.matches_capacity());
  r.capacity = Rational(2, 3);
  EXPECT_TRUE(r.matches_capacity());
}
