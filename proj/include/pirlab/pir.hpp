#pragma once

// Replicated-database PIR schemes:
//   cgks      two-server single-symbol retrieval, rate 1/2
//   residual  N-server retrieval of N-1 symbols per subpacket, rate 1 - 1/N
//   sunjafar  deterministic capacity-achieving scheme (message symmetry plus
//             side information), subpacket N^K
//   tian      probabilistic capacity-achieving scheme with a random key and
//             a dummy zero symbol, subpacket N-1
//   leaky     probabilistic four-row scheme for N = K = 2
//
// Every round takes the database replicas it talks to, so the caller can
// inspect their logs afterwards.

#include <algorithm>
#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pirlab/databank.hpp"
#include "pirlab/error.hpp"
#include "pirlab/field.hpp"
#include "pirlab/random.hpp"
#include "pirlab/rational.hpp"

namespace pirlab {

struct RoundResult {
  SchemeTranscript transcript;
  SymbolVector decoded;
};

namespace detail {

inline void check_theta(std::size_t theta, std::size_t K) {
  if (theta < 1 || theta > K) throw InvalidArgument("theta must be in [1, K]");
}

inline std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

// All size-t subsets of {1..K}, lexicographic.
inline std::vector<std::vector<std::size_t>> subsets_of_size(std::size_t K, std::size_t t) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (cur.size() == t) {
      out.push_back(cur);
      return;
    }
    for (std::size_t k = start; k <= K; ++k) {
      cur.push_back(k);
      self(self, k + 1);
      cur.pop_back();
    }
  };
  rec(rec, 1);
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// cgks

/// DB1 receives h, DB2 receives h + e_theta.
struct CgksQueryPair {
  SymbolVector h;
  std::size_t theta = 1;

  Query for_database(std::size_t n) const {
    LinearQuery body{0, 1, h};
    if (n == 2) body.coefficients[theta - 1] += h[0].field().one();
    return Query{"cgks", std::move(body)};
  }
};

inline CgksQueryPair cgks_queries(const PrimeField& field, std::size_t K, std::size_t theta, RandomSource& source) {
  detail::check_theta(theta, K);
  return CgksQueryPair{sample_vector(field, K, source), theta};
}

inline RoundResult cgks_round(std::vector<DatabaseState>& dbs, std::size_t theta, RandomSource& source) {
  if (dbs.size() != 2) throw InvalidArgument("cgks needs exactly N = 2 databases");
  const MessageStore& meta = dbs.front().store();
  if (meta.L() != 1) throw InvalidArgument("cgks retrieves single-symbol messages (L = 1)");
  const auto pair = cgks_queries(meta.field(), meta.K(), theta, source);
  SchemeTranscript t("cgks", 2, meta.K(), 1, meta.field().modulus(), theta);
  const auto a1 = exchange(dbs, t, 1, pair.for_database(1));
  const auto a2 = exchange(dbs, t, 2, pair.for_database(2));
  return RoundResult{std::move(t), {a2[0] - a1[0]}};
}

inline RoundResult cgks_round(const MessageStore& store, std::size_t theta, RandomSource& source) {
  auto dbs = replicate(store, 2);
  return cgks_round(dbs, theta, source);
}

// ---------------------------------------------------------------------------
// residual

/// h is K x (N-1); DB1 gets flatten(h), DB j+1 gets flatten(h) + 1 at (theta, j).
struct ResidualQuerySet {
  std::size_t N = 2;
  std::size_t K = 1;
  std::size_t theta = 1;
  SymbolVector h;  // message-major, K * (N - 1)

  Query for_database(std::size_t n, std::size_t offset, const std::string& tag = "residual") const {
    LinearQuery body{offset, N - 1, h};
    if (n >= 2) body.coefficients[(theta - 1) * (N - 1) + (n - 2)] += h[0].field().one();
    return Query{tag, std::move(body)};
  }
};

inline ResidualQuerySet residual_queries(const PrimeField& field, std::size_t N, std::size_t K, std::size_t theta,
                                         RandomSource& source) {
  if (N < 2) throw InvalidArgument("residual scheme needs N >= 2");
  detail::check_theta(theta, K);
  return ResidualQuerySet{N, K, theta, sample_vector(field, K * (N - 1), source)};
}

namespace detail {

inline RoundResult residual_round_impl(std::vector<DatabaseState>& dbs, std::size_t theta, RandomSource& source,
                                       const std::string& tag, CommonRandomnessPool* pool) {
  const std::size_t N = dbs.size();
  if (N < 2) throw InvalidArgument("residual scheme needs N >= 2");
  const MessageStore& meta = dbs.front().store();
  const std::size_t width = N - 1;
  if (meta.L() % width != 0) throw InvalidArgument("L must be a multiple of N - 1");
  check_theta(theta, meta.K());
  if (pool != nullptr)
    for (auto& db : dbs) db.attach_pool(pool->shared());

  SchemeTranscript t(tag, N, meta.K(), meta.L(), meta.field().modulus(), theta);
  SymbolVector decoded = zeros(meta.field(), meta.L());
  for (std::size_t offset = 0; offset < meta.L(); offset += width) {
    const auto qs = residual_queries(meta.field(), N, meta.K(), theta, source);
    std::optional<std::size_t> slot;
    if (pool != nullptr) {
      slot = pool->reserve(1);
      t.pool_symbols += 1;
    }
    SymbolVector answers;
    for (std::size_t n = 1; n <= N; ++n) answers.push_back(exchange(dbs, t, n, qs.for_database(n, offset, tag), slot)[0]);
    for (std::size_t j = 1; j <= width; ++j) decoded[offset + j - 1] = answers[j] - answers[0];
  }
  return RoundResult{std::move(t), std::move(decoded)};
}

}  // namespace detail

inline RoundResult residual_round(std::vector<DatabaseState>& dbs, std::size_t theta, RandomSource& source) {
  return detail::residual_round_impl(dbs, theta, source, "residual", nullptr);
}

inline RoundResult residual_round(const MessageStore& store, std::size_t N, std::size_t theta, RandomSource& source) {
  auto dbs = replicate(store, N);
  return residual_round(dbs, theta, source);
}

// ---------------------------------------------------------------------------
// sunjafar

/// Per database, requests are listed in canonical order: by sum size t, then
/// lexicographic message subset, then instance. Every subset of size t gets
/// (N-1)^(t-1) requests at every database regardless of theta.
struct SunJafarPlan {
  struct DecodeStep {
    std::size_t db = 1;       // where the desired-bearing request went
    std::size_t request = 0;  // its position in that database's list
    std::size_t desired = 0;  // subpacket position of the new desired symbol
    std::optional<std::pair<std::size_t, std::size_t>> side_info;  // (db, request) to subtract
  };

  std::size_t N = 2;
  std::size_t K = 1;
  std::size_t theta = 1;
  std::size_t subpacket = 2;  // N^K
  std::vector<std::vector<std::vector<SymbolRef>>> requests;  // [db-1][request] -> refs
  std::vector<DecodeStep> decode;

  Query for_database(std::size_t n) const { return Query{"sunjafar", SumQuery{subpacket, requests.at(n - 1)}}; }

  std::size_t downloads_per_subpacket() const {
    std::size_t total = 0;
    for (const auto& r : requests) total += r.size();
    return total;
  }
};

/// Builds the plan. Symbol positions of each message pass through an
/// independent uniformly random permutation drawn from `source`; only the
/// positions the plan uses are drawn.
///
/// The desired-bearing request over S + {theta} at database d is paired with
/// one S-sum downloaded at another database; the S-sums of all other
/// databases, taken in database order, cover the (N-1)^|S| such requests
/// exactly once each.
inline SunJafarPlan sunjafar_plan(std::size_t N, std::size_t K, std::size_t theta, RandomSource& source) {
  if (N < 2) throw InvalidArgument("sunjafar needs N >= 2");
  if (K < 1) throw InvalidArgument("sunjafar needs K >= 1");
  detail::check_theta(theta, K);

  SunJafarPlan plan;
  plan.N = N;
  plan.K = K;
  plan.theta = theta;
  plan.subpacket = detail::ipow(N, K);
  plan.requests.assign(N, {});

  std::vector<LazyPermutation> perms;
  for (std::size_t k = 0; k < K; ++k) perms.emplace_back(plan.subpacket);
  std::vector<std::size_t> next_logical(K, 0);
  auto fresh = [&](std::size_t k) { return SymbolRef{k, perms[k - 1](next_logical[k - 1]++, source)}; };

  using Key = std::vector<std::size_t>;
  // undesired[d][S] -> requests (refs), in instance order
  std::vector<std::map<Key, std::vector<std::vector<SymbolRef>>>> undesired(N);
  for (std::size_t t = 1; t <= K; ++t) {
    const std::size_t instances = detail::ipow(N - 1, t - 1);
    for (std::size_t d = 0; d < N; ++d) {
      for (const auto& S : detail::subsets_of_size(K, t)) {
        if (std::find(S.begin(), S.end(), theta) != S.end()) continue;
        auto& bucket = undesired[d][S];
        for (std::size_t i = 0; i < instances; ++i) {
          std::vector<SymbolRef> refs;
          for (auto k : S) refs.push_back(fresh(k));
          bucket.push_back(std::move(refs));
        }
      }
    }
  }

  struct Pending {
    std::vector<SymbolRef> refs;
    std::size_t desired = 0;
    std::optional<std::pair<std::size_t, std::size_t>> side;  // (db index 0-based, instance in bucket)
    Key side_subset;
  };
  std::vector<std::map<Key, std::vector<Pending>>> desired(N);
  for (std::size_t t = 1; t <= K; ++t) {
    const std::size_t instances = detail::ipow(N - 1, t - 1);
    for (std::size_t d = 0; d < N; ++d) {
      for (const auto& S : detail::subsets_of_size(K, t)) {
        if (std::find(S.begin(), S.end(), theta) == S.end()) continue;
        Key rest;
        for (auto k : S)
          if (k != theta) rest.push_back(k);
        auto& bucket = desired[d][S];
        // Side information pool: other databases' rest-sums in database order.
        std::vector<std::pair<std::size_t, std::size_t>> sources;
        if (!rest.empty()) {
          for (std::size_t other = 0; other < N; ++other) {
            if (other == d) continue;
            for (std::size_t i = 0; i < undesired[other][rest].size(); ++i) sources.emplace_back(other, i);
          }
          if (sources.size() != instances) throw Error("sunjafar side-information count mismatch");
        }
        for (std::size_t i = 0; i < instances; ++i) {
          const SymbolRef want = fresh(theta);
          Pending p;
          p.desired = want.index;
          if (!rest.empty()) {
            p.side = sources[i];
            p.side_subset = rest;
            p.refs = undesired[sources[i].first][rest][sources[i].second];
          }
          p.refs.push_back(want);
          std::sort(p.refs.begin(), p.refs.end(), [](const SymbolRef& a, const SymbolRef& b) { return a.message < b.message; });
          bucket.push_back(std::move(p));
        }
      }
    }
  }

  // Assemble canonical request lists and remember where undesired sums landed.
  std::vector<std::map<Key, std::size_t>> first_slot(N);
  std::vector<std::vector<std::pair<std::size_t, Pending>>> decode_later(N);
  for (std::size_t d = 0; d < N; ++d) {
    auto& list = plan.requests[d];
    for (std::size_t t = 1; t <= K; ++t) {
      for (const auto& S : detail::subsets_of_size(K, t)) {
        if (auto it = undesired[d].find(S); it != undesired[d].end()) {
          first_slot[d][S] = list.size();
          for (const auto& refs : it->second) list.push_back(refs);
        } else if (auto jt = desired[d].find(S); jt != desired[d].end()) {
          for (auto& p : jt->second) {
            decode_later[d].emplace_back(list.size(), p);
            list.push_back(p.refs);
          }
        }
      }
    }
  }
  for (std::size_t d = 0; d < N; ++d) {
    for (const auto& [slot, p] : decode_later[d]) {
      SunJafarPlan::DecodeStep step;
      step.db = d + 1;
      step.request = slot;
      step.desired = p.desired;
      if (p.side) step.side_info = std::make_pair(p.side->first + 1, first_slot[p.side->first].at(p.side_subset) + p.side->second);
      plan.decode.push_back(step);
    }
  }
  return plan;
}

inline RoundResult sunjafar_round(std::vector<DatabaseState>& dbs, const SunJafarPlan& plan) {
  if (dbs.size() != plan.N || plan.requests.size() != plan.N) throw InvalidArgument("plan does not match the database count");
  const MessageStore& meta = dbs.front().store();
  if (meta.K() != plan.K) throw InvalidArgument("plan does not match the message count");
  if (meta.L() % plan.subpacket != 0) throw InvalidArgument("L must be a multiple of N^K");
  if (plan.decode.size() != plan.subpacket) throw InvalidArgument("malformed plan: decode steps do not cover the subpacket");

  SchemeTranscript t("sunjafar", plan.N, plan.K, meta.L(), meta.field().modulus(), plan.theta);
  std::vector<SymbolVector> answers;
  for (std::size_t n = 1; n <= plan.N; ++n) answers.push_back(exchange(dbs, t, n, plan.for_database(n)));

  const std::size_t packets = meta.L() / plan.subpacket;
  SymbolVector decoded = zeros(meta.field(), meta.L());
  std::vector<bool> filled(plan.subpacket, false);
  for (const auto& step : plan.decode) {
    if (step.desired >= plan.subpacket || filled[step.desired]) throw InvalidArgument("malformed plan: desired positions repeat");
    filled[step.desired] = true;
  }
  for (std::size_t s = 0; s < packets; ++s) {
    for (const auto& step : plan.decode) {
      const std::size_t per = plan.requests[step.db - 1].size();
      FieldElement value = answers[step.db - 1][s * per + step.request];
      if (step.side_info) {
        const auto [sdb, sreq] = *step.side_info;
        value -= answers[sdb - 1][s * plan.requests[sdb - 1].size() + sreq];
      }
      decoded[s * plan.subpacket + step.desired] = value;
    }
  }
  return RoundResult{std::move(t), std::move(decoded)};
}

inline RoundResult sunjafar_round(const MessageStore& store, std::size_t N, std::size_t theta, RandomSource& source) {
  auto dbs = replicate(store, N);
  return sunjafar_round(dbs, sunjafar_plan(N, store.K(), theta, source));
}

// ---------------------------------------------------------------------------
// tian

/// Q_n copies the key at every coordinate except theta, where
/// Q_n(theta) = (n - 1 - sum(key)) mod N, so sum(Q_n) = n - 1 (mod N).
struct TianQuery {
  std::size_t N = 2;
  std::size_t K = 1;
  std::size_t theta = 1;
  std::vector<std::size_t> key;                    // K - 1 entries in [0, N)
  std::vector<std::vector<std::size_t>> per_db;    // per_db[n-1] = Q_n

  bool skipped(std::size_t n) const {
    const auto& q = per_db.at(n - 1);
    return std::all_of(q.begin(), q.end(), [](std::size_t v) { return v == 0; });
  }

  Query for_database(std::size_t n, const std::string& tag = "tian") const {
    return Query{tag, IndexQuery{N - 1, per_db.at(n - 1)}};
  }
};

inline TianQuery tian_query(std::size_t N, std::size_t K, std::size_t theta, std::vector<std::size_t> key) {
  if (N < 2) throw InvalidArgument("tian needs N >= 2");
  detail::check_theta(theta, K);
  if (key.size() != K - 1) throw InvalidArgument("tian key must have K - 1 entries");
  std::size_t sum = 0;
  for (auto v : key) {
    if (v >= N) throw InvalidArgument("tian key entry out of range");
    sum += v;
  }
  TianQuery q{N, K, theta, std::move(key), {}};
  for (std::size_t n = 1; n <= N; ++n) {
    std::vector<std::size_t> row;
    std::size_t f = 0;
    for (std::size_t k = 1; k <= K; ++k) {
      if (k == theta) {
        row.push_back(((n - 1) + N * (sum / N + 1) - sum) % N);
      } else {
        row.push_back(q.key[f++]);
      }
    }
    q.per_db.push_back(std::move(row));
  }
  return q;
}

inline std::vector<std::size_t> tian_random_key(std::size_t N, std::size_t K, RandomSource& source) {
  std::vector<std::size_t> key;
  for (std::size_t i = 0; i + 1 < K; ++i) key.push_back(static_cast<std::size_t>(source.draw(N)));
  return key;
}

namespace detail {

inline RoundResult tian_round_impl(std::vector<DatabaseState>& dbs, std::size_t theta, std::vector<std::size_t> key,
                                   const std::string& tag, CommonRandomnessPool* pool) {
  const std::size_t N = dbs.size();
  const MessageStore& meta = dbs.front().store();
  const auto q = tian_query(N, meta.K(), theta, std::move(key));
  const std::size_t stride = N - 1;
  if (meta.L() % stride != 0) throw InvalidArgument("L must be a multiple of N - 1");
  const std::size_t packets = meta.L() / stride;
  std::optional<std::size_t> base;
  if (pool != nullptr) {
    for (auto& db : dbs) db.attach_pool(pool->shared());
    base = pool->reserve(packets);
  }

  SchemeTranscript t(tag, N, meta.K(), meta.L(), meta.field().modulus(), theta);
  if (pool != nullptr) t.pool_symbols = packets;
  std::vector<SymbolVector> answers(N, zeros(meta.field(), packets));
  for (std::size_t n = 1; n <= N; ++n) {
    // An all-zero query has a known zero answer; with a pool it is S and
    // still needed to cancel S.
    if (pool == nullptr && q.skipped(n)) continue;
    answers[n - 1] = exchange(dbs, t, n, q.for_database(n, tag), base);
  }
  // Database whose theta coordinate is j holds the j-th desired symbol plus
  // the same interference as the database with coordinate 0.
  std::vector<std::size_t> by_coord(N);
  for (std::size_t n = 1; n <= N; ++n) by_coord[q.per_db[n - 1][theta - 1]] = n;
  SymbolVector decoded = zeros(meta.field(), meta.L());
  for (std::size_t s = 0; s < packets; ++s)
    for (std::size_t j = 1; j <= stride; ++j)
      decoded[s * stride + j - 1] = answers[by_coord[j] - 1][s] - answers[by_coord[0] - 1][s];
  return RoundResult{std::move(t), std::move(decoded)};
}

}  // namespace detail

inline RoundResult tian_round(std::vector<DatabaseState>& dbs, std::size_t theta, std::vector<std::size_t> key) {
  return detail::tian_round_impl(dbs, theta, std::move(key), "tian", nullptr);
}

inline RoundResult tian_round(const MessageStore& store, std::size_t N, std::size_t theta, std::vector<std::size_t> key) {
  auto dbs = replicate(store, N);
  return tian_round(dbs, theta, std::move(key));
}

/// (N-1) N^(K-1) / (N^K - 1): only the all-zero key lets one database idle.
inline Rational tian_expected_rate(std::size_t N, std::size_t K) {
  if (N < 2 || K < 1) throw InvalidArgument("tian needs N >= 2 and K >= 1");
  const BigInt nk1 = pow_int(N, static_cast<unsigned>(K - 1));
  return Rational(BigInt(N - 1) * nk1, BigInt(N) * (nk1 - 1) + BigInt(N - 1));
}

/// Expected rate measured by running one round per key and averaging the
/// downloads exactly.
inline Rational tian_enumerated_rate(const MessageStore& store, std::size_t N, std::size_t theta) {
  const std::size_t K = store.K();
  const std::size_t keys = detail::ipow(N, K - 1);
  BigInt total_down = 0;
  for (std::size_t code = 0; code < keys; ++code) {
    std::vector<std::size_t> key;
    std::size_t c = code;
    for (std::size_t i = 0; i + 1 < K; ++i) {
      key.push_back(c % N);
      c /= N;
    }
    total_down += tian_round(store, N, theta, key).transcript.downloaded_symbols();
  }
  return Rational(BigInt(store.L()) * keys, total_down);
}

// ---------------------------------------------------------------------------
// leaky

/// One row of the four-row table: per database, the combination to request or
/// nullopt for "no query".
using LeakyRow = std::array<std::optional<SymbolVector>, 2>;

inline std::array<LeakyRow, 4> leaky_table(const PrimeField& field, std::size_t theta) {
  detail::check_theta(theta, 2);
  const std::size_t other = 3 - theta;
  auto unit = [&](std::size_t k) {
    SymbolVector c = zeros(field, 2);
    c[k - 1] = field.one();
    return c;
  };
  const SymbolVector both{field.one(), field.one()};
  return {{
      {unit(theta), std::nullopt},
      {std::nullopt, unit(theta)},
      {unit(other), both},
      {both, unit(other)},
  }};
}

inline RoundResult leaky_round_row(std::vector<DatabaseState>& dbs, std::size_t theta, std::size_t row) {
  if (dbs.size() != 2) throw InvalidArgument("leaky scheme is only defined for N = 2, K = 2");
  const MessageStore& meta = dbs.front().store();
  if (meta.K() != 2) throw InvalidArgument("leaky scheme is only defined for N = 2, K = 2");
  if (row >= 4) throw InvalidArgument("leaky row must be in [0, 4)");
  const auto table = leaky_table(meta.field(), theta);
  SchemeTranscript t("leaky", 2, 2, meta.L(), meta.field().modulus(), theta);
  std::array<SymbolVector, 2> a;
  for (std::size_t n = 1; n <= 2; ++n) {
    if (table[row][n - 1]) a[n - 1] = exchange(dbs, t, n, Query{"leaky", CombinationQuery{*table[row][n - 1]}});
  }
  SymbolVector decoded = zeros(meta.field(), meta.L());
  for (std::size_t l = 0; l < meta.L(); ++l) {
    switch (row) {
      case 0: decoded[l] = a[0][l]; break;
      case 1: decoded[l] = a[1][l]; break;
      case 2: decoded[l] = a[1][l] - a[0][l]; break;
      default: decoded[l] = a[0][l] - a[1][l]; break;
    }
  }
  return RoundResult{std::move(t), std::move(decoded)};
}

/// Picks one of the four rows uniformly.
inline RoundResult leaky_round(std::vector<DatabaseState>& dbs, std::size_t theta, RandomSource& source) {
  return leaky_round_row(dbs, theta, static_cast<std::size_t>(source.draw(4)));
}

inline RoundResult leaky_round(const MessageStore& store, std::size_t theta, RandomSource& source) {
  auto dbs = replicate(store, 2);
  return leaky_round(dbs, theta, source);
}

/// L over the expected number of downloaded symbols, averaged over the rows.
inline Rational leaky_expected_rate(const MessageStore& store, std::size_t theta) {
  BigInt total = 0;
  for (std::size_t row = 0; row < 4; ++row) {
    auto dbs = replicate(store, 2);
    total += leaky_round_row(dbs, theta, row).transcript.downloaded_symbols();
  }
  return Rational(BigInt(store.L()) * 4, total);
}

}  // namespace pirlab
