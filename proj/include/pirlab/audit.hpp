#pragma once

// Exact privacy audits by enumeration of every randomness path.
//
// A protocol is run under an ExhaustiveSource once per path of its draw tree;
// each path carries weight 1 / (product of the bounds drawn on it), so the
// observed outputs form an exact distribution over rationals. Enumeration is
// split across threads by the value of the first draw (PIRLAB_THREADS caps
// the worker count).
//
// Canonical query encodings are "<scheme>|<body>" with body
//   lin@<offset>x<width>:c,c,...   LinearQuery coefficients
//   comb:c,c,...                   CombinationQuery coefficients
//   sum/<subpacket>:k.i+k.i;...    SumQuery requests (message.index)
//   idx/<stride>:i,i,...           IndexQuery indices
//   vec:c,c,...                    PRUW read query vector
//   -                              database not contacted

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pirlab/databank.hpp"
#include "pirlab/error.hpp"
#include "pirlab/field.hpp"
#include "pirlab/pir.hpp"
#include "pirlab/pruw.hpp"
#include "pirlab/random.hpp"
#include "pirlab/rational.hpp"
#include "pirlab/sparsify.hpp"
#include "pirlab/spir.hpp"

namespace pirlab::audit {

struct Limits {
  std::uint64_t max_paths = 10'000'000;
  std::size_t threads = 0;  // 0: hardware concurrency
};

/// Worker count after applying PIRLAB_THREADS.
inline std::size_t worker_threads(const Limits& limits) {
  std::size_t t = limits.threads != 0 ? limits.threads : std::max(1U, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("PIRLAB_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && cap > 0) t = std::min<std::size_t>(t, cap);
  }
  return t;
}

using Distribution = std::map<std::string, Rational>;

namespace detail {

// Counts per (outcome, path denominator); turned into rationals once at the end.
struct Tally {
  std::map<std::string, std::map<BigInt, std::uint64_t>> counts;

  void add(const std::string& key, const BigInt& den) { ++counts[key][den]; }

  void merge(const Tally& other) {
    for (const auto& [key, dens] : other.counts)
      for (const auto& [den, c] : dens) counts[key][den] += c;
  }

  Distribution finish() const {
    Distribution out;
    for (const auto& [key, dens] : counts) {
      Rational p = 0;
      for (const auto& [den, c] : dens) p += Rational(BigInt(c), den);
      out.emplace(key, p);
    }
    return out;
  }
};

inline std::string join_symbols(const SymbolVector& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i != 0) s += ',';
    s += std::to_string(v[i].value());
  }
  return s;
}

template <class T>
std::string join_numbers(const std::vector<T>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i != 0) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace detail

/// Exact law of run(source) over every path of its draw tree. `run` must be
/// callable concurrently and return a std::string.
template <class Run>
Distribution enumerate_outcomes(Run run, const Limits& limits = {}) {
  ExhaustiveSource probe;
  const std::string only = run(probe);
  if (probe.depth() == 0) return {{only, Rational(1)}};
  const std::uint64_t first = probe.bound_at(0);
  const std::size_t workers = static_cast<std::size_t>(std::min<std::uint64_t>(worker_threads(limits), first));

  std::atomic<std::uint64_t> paths{0};
  std::vector<detail::Tally> tallies(workers);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](std::size_t w) {
    try {
      for (std::uint64_t v = w; v < first; v += workers) {
        ExhaustiveSource src({v});
        do {
          std::string key = run(src);
          if (++paths > limits.max_paths)
            throw SpaceTooLarge("randomness space exceeds " + std::to_string(limits.max_paths) +
                                " paths; use sampled mode");
          tallies[w].add(key, src.path_denominator());
        } while (src.next());
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (std::size_t w = 1; w < workers; ++w) tallies[0].merge(tallies[w]);
  return tallies[0].finish();
}

inline Rational total_probability(const Distribution& d) {
  Rational s = 0;
  for (const auto& [k, p] : d) s += p;
  return s;
}

/// (1/2) sum |p - p'| over the union of supports.
inline Rational total_variation(const Distribution& a, const Distribution& b) {
  Rational sum = 0;
  for (const auto& [k, p] : a) {
    auto it = b.find(k);
    const Rational d = it == b.end() ? p : p - it->second;
    sum += d < 0 ? Rational(-d) : d;
  }
  for (const auto& [k, p] : b)
    if (a.find(k) == a.end()) sum += p;
  return sum / 2;
}

/// Distance from the uniform law on `space` outcomes.
inline Rational tv_from_uniform(const Distribution& d, const BigInt& space) {
  const Rational u(BigInt(1), space);
  Rational sum = 0;
  for (const auto& [k, p] : d) {
    const Rational diff = p - u;
    sum += diff < 0 ? Rational(-diff) : diff;
  }
  sum += Rational(space - BigInt(d.size())) * u;
  return sum / 2;
}

// ---------------------------------------------------------------------------
// User privacy

inline std::string encode(const std::optional<Query>& q, const std::string& scheme) {
  if (!q) return scheme + "|-";
  std::string body = std::visit(
      [](const auto& b) -> std::string {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, LinearQuery>) {
          return "lin@" + std::to_string(b.offset) + "x" + std::to_string(b.width) + ":" +
                 detail::join_symbols(b.coefficients);
        } else if constexpr (std::is_same_v<T, CombinationQuery>) {
          return "comb:" + detail::join_symbols(b.coefficients);
        } else if constexpr (std::is_same_v<T, SumQuery>) {
          std::string s = "sum/" + std::to_string(b.subpacket) + ":";
          for (std::size_t r = 0; r < b.requests.size(); ++r) {
            if (r != 0) s += ';';
            for (std::size_t i = 0; i < b.requests[r].size(); ++i) {
              if (i != 0) s += '+';
              s += std::to_string(b.requests[r][i].message) + "." + std::to_string(b.requests[r][i].index);
            }
          }
          return s;
        } else {
          return "idx/" + std::to_string(b.stride) + ":" + detail::join_numbers(b.indices);
        }
      },
      q->body);
  return scheme + "|" + body;
}

struct SchemeParams {
  std::size_t N = 2;
  std::size_t K = 2;
  std::uint64_t q = 3;
  std::size_t M = 2;  // PRUW submodels
  std::size_t L = 5;  // sparsification model size
  std::size_t s = 2;  // sparsification update count
};

/// Number of message (or submodel) indices a scheme chooses among.
inline std::size_t theta_count(const std::string& scheme, const SchemeParams& p) {
  return scheme == "pruw" ? p.M : p.K;
}

/// The query database n receives, drawing the user's randomness from `source`.
inline std::string sample_query_encoding(const std::string& scheme, const SchemeParams& p, std::size_t theta,
                                         std::size_t n, RandomSource& source) {
  const PrimeField field(p.q);
  if (n < 1) throw InvalidArgument("database index must be >= 1");
  if (scheme == "cgks") {
    if (p.N != 2 || n > 2) throw InvalidArgument("cgks needs exactly N = 2 databases");
    return encode(cgks_queries(field, p.K, theta, source).for_database(n), scheme);
  }
  if (scheme == "residual" || scheme == "spir-det") {
    if (n > p.N) throw InvalidArgument("database index out of range");
    return encode(residual_queries(field, p.N, p.K, theta, source).for_database(n, 0, scheme), scheme);
  }
  if (scheme == "sunjafar") {
    if (n > p.N) throw InvalidArgument("database index out of range");
    return encode(sunjafar_plan(p.N, p.K, theta, source).for_database(n), scheme);
  }
  if (scheme == "tian" || scheme == "spir-prob") {
    if (n > p.N) throw InvalidArgument("database index out of range");
    const auto q = tian_query(p.N, p.K, theta, tian_random_key(p.N, p.K, source));
    const bool contacted = scheme == "spir-prob" || !q.skipped(n);
    return contacted ? encode(q.for_database(n, scheme), scheme) : encode(std::nullopt, scheme);
  }
  if (scheme == "leaky") {
    if (p.N != 2 || p.K != 2 || n > 2) throw InvalidArgument("leaky scheme is only defined for N = 2, K = 2");
    const auto table = leaky_table(field, theta);
    const auto& cell = table[static_cast<std::size_t>(source.draw(4))][n - 1];
    return cell ? encode(Query{"leaky", CombinationQuery{*cell}}, scheme) : encode(std::nullopt, scheme);
  }
  if (scheme == "pruw") {
    const auto frame = pruw::EvaluationFrame::standard(field, p.N, p.M, 1);
    if (n > p.N) throw InvalidArgument("database index out of range");
    return scheme + "|vec:" + detail::join_symbols(pruw::make_read_query(frame, theta, source).per_db[n - 1]);
  }
  if (scheme == "fixture-leaky-theta") {
    // Planted leak: the desired index travels in the clear.
    pirlab::detail::check_theta(theta, p.K);
    SymbolVector e = zeros(field, p.K);
    e[theta - 1] = field.one();
    return encode(Query{scheme, LinearQuery{0, 1, e}}, scheme);
  }
  throw UnknownScheme(scheme);
}

struct QueryDistribution {
  std::string scheme;
  std::size_t n = 1;
  std::size_t theta = 1;
  // Keys are relabeling shapes instead of raw queries (see sunjafar_shape).
  bool orbit = false;
  Distribution probabilities;

  Rational total() const { return total_probability(probabilities); }
};

/// Replaces every symbol index of a sum query by its first-occurrence rank
/// within its message. For a deterministic plan pushed through independent
/// uniform per-message permutations, the query a database sees is uniform
/// over all queries sharing this shape, so two plans give identical laws iff
/// their shapes agree and disjoint laws otherwise.
inline std::string sunjafar_shape(const SumQuery& q) {
  std::map<std::size_t, std::map<std::size_t, std::size_t>> rank;
  SumQuery out{q.subpacket, {}};
  for (const auto& request : q.requests) {
    std::vector<SymbolRef> refs;
    for (const auto& r : request) {
      auto& m = rank[r.message];
      auto [it, inserted] = m.try_emplace(r.index, m.size());
      refs.push_back(SymbolRef{r.message, it->second});
    }
    out.requests.push_back(std::move(refs));
  }
  return encode(Query{"sunjafar", out}, "sunjafar-shape");
}

/// Paths a brute-force sunjafar enumeration would visit: per message, the
/// falling factorial of the subpacket over the positions the plan uses.
inline BigInt sunjafar_space(std::size_t N, std::size_t K, std::size_t theta) {
  ExhaustiveSource first;
  const auto plan = sunjafar_plan(N, K, theta, first);
  std::map<std::size_t, std::set<std::size_t>> used;
  for (const auto& db : plan.requests)
    for (const auto& req : db)
      for (const auto& r : req) used[r.message].insert(r.index);
  BigInt space = 1;
  for (const auto& [k, positions] : used)
    for (std::size_t i = 0; i < positions.size(); ++i) space *= plan.subpacket - i;
  return space;
}

enum class SunJafarMode { automatic, brute_force, orbit };

inline QueryDistribution enumerate_query_dist(const std::string& scheme, const SchemeParams& p, std::size_t theta,
                                              std::size_t n, const Limits& limits = {},
                                              SunJafarMode mode = SunJafarMode::automatic) {
  QueryDistribution d{scheme, n, theta, false, {}};
  if (scheme == "sunjafar") {
    if (mode == SunJafarMode::automatic)
      mode = sunjafar_space(p.N, p.K, theta) <= limits.max_paths ? SunJafarMode::brute_force : SunJafarMode::orbit;
    if (mode == SunJafarMode::orbit) {
      if (n < 1 || n > p.N) throw InvalidArgument("database index out of range");
      ExhaustiveSource first;
      const auto q = sunjafar_plan(p.N, p.K, theta, first).for_database(n);
      d.orbit = true;
      d.probabilities.emplace(sunjafar_shape(std::get<SumQuery>(q.body)), Rational(1));
      return d;
    }
  }
  d.probabilities = enumerate_outcomes(
      [&scheme, &p, theta, n](RandomSource& src) { return sample_query_encoding(scheme, p, theta, n, src); }, limits);
  return d;
}

inline Rational user_privacy_tv(const std::string& scheme, const SchemeParams& p, std::size_t theta,
                                std::size_t theta_prime, std::size_t n, const Limits& limits = {},
                                SunJafarMode mode = SunJafarMode::automatic) {
  if (scheme == "sunjafar" && mode == SunJafarMode::automatic) {
    // Both sides must use the same representation.
    const bool small = sunjafar_space(p.N, p.K, theta) <= limits.max_paths &&
                       sunjafar_space(p.N, p.K, theta_prime) <= limits.max_paths;
    mode = small ? SunJafarMode::brute_force : SunJafarMode::orbit;
  }
  const auto a = enumerate_query_dist(scheme, p, theta, n, limits, mode);
  const auto b = enumerate_query_dist(scheme, p, theta_prime, n, limits, mode);
  return total_variation(a.probabilities, b.probabilities);
}

inline std::size_t database_count(const std::string& scheme, const SchemeParams& p) {
  if (scheme == "cgks" || scheme == "leaky") return 2;
  if (scheme == "fixture-leaky-theta") return p.N;
  return p.N;
}

/// Largest user-privacy TV over every theta pair and every database.
inline Rational user_privacy_sweep(const std::string& scheme, const SchemeParams& p, const Limits& limits = {}) {
  Rational worst = 0;
  const std::size_t thetas = theta_count(scheme, p);
  for (std::size_t n = 1; n <= database_count(scheme, p); ++n)
    for (std::size_t a = 1; a <= thetas; ++a)
      for (std::size_t b = a + 1; b <= thetas; ++b) worst = std::max(worst, user_privacy_tv(scheme, p, a, b, n, limits));
  return worst;
}

// ---------------------------------------------------------------------------
// Database privacy

/// P(secret | view) for every view the user can observe.
struct PosteriorTable {
  std::map<std::string, Distribution> by_view;
  BigInt secret_space = 1;

  /// Largest distance of any posterior from uniform.
  Rational max_tv_from_uniform() const {
    Rational worst = 0;
    for (const auto& [view, post] : by_view) worst = std::max(worst, tv_from_uniform(post, secret_space));
    return worst;
  }
  bool uniform() const { return max_tv_from_uniform() == 0; }
};

inline constexpr char kViewSeparator = '\x1f';

/// `run` returns view + kViewSeparator + secret.
template <class Run>
PosteriorTable db_privacy_posterior(Run run, const BigInt& secret_space, const Limits& limits = {}) {
  const auto joint = enumerate_outcomes(run, limits);
  PosteriorTable t;
  t.secret_space = secret_space;
  for (const auto& [key, p] : joint) {
    const auto cut = key.find(kViewSeparator);
    if (cut == std::string::npos) throw InvalidArgument("outcome lacks a view/secret separator");
    t.by_view[key.substr(0, cut)][key.substr(cut + 1)] += p;
  }
  for (auto& [view, post] : t.by_view) {
    const Rational mass = total_probability(post);
    for (auto& [secret, p] : post) p /= mass;
  }
  return t;
}

enum class DbPrivacyCase {
  spir_deterministic,
  spir_probabilistic,
  plain_pir,  // residual scheme without common randomness
  pool_leak,  // deterministic SPIR with S handed to the user
};

inline std::string transcript_view(const SchemeTranscript& t) {
  std::string view;
  const auto answers = spir_user_view(t);
  for (std::size_t i = 0; i < t.per_db.size(); ++i) {
    view += '[';
    for (const auto& q : t.per_db[i].queries) view += encode(q, t.scheme) + ' ';
    view += answers.answers[i] ? detail::join_symbols(*answers.answers[i]) : std::string("-");
    view += ']';
  }
  return view;
}

/// Posterior of the non-desired messages given everything the user sees,
/// over uniform non-desired messages, the pool symbol and the user's own
/// randomness. One subpacket (L = N - 1); W_theta is fixed to `desired`.
inline PosteriorTable spir_db_privacy(DbPrivacyCase which, std::size_t N, std::size_t K, std::uint64_t q,
                                      std::size_t theta, std::int64_t desired = 1, const Limits& limits = {}) {
  if (N < 2) throw InvalidArgument("database privacy needs N >= 2");
  pirlab::detail::check_theta(theta, K);
  const PrimeField field(q);
  const std::size_t L = N - 1;
  auto run = [=](RandomSource& src) {
    std::vector<SymbolVector> messages;
    std::string secret;
    for (std::size_t k = 1; k <= K; ++k) {
      if (k == theta) {
        messages.push_back(SymbolVector(L, field.element(desired)));
      } else {
        messages.push_back(sample_vector(field, L, src));
        secret += detail::join_symbols(messages.back()) + ';';
      }
    }
    auto dbs = replicate(MessageStore(field, messages), N);
    RoundResult r;
    std::string extra;
    if (which == DbPrivacyCase::plain_pir) {
      r = residual_round(dbs, theta, src);
    } else {
      auto pool = CommonRandomnessPool::random(field, 1, src);
      if (which == DbPrivacyCase::spir_probabilistic) {
        r = spir_round_probabilistic(dbs, theta, pool, tian_random_key(N, K, src));
      } else {
        r = spir_round_deterministic(dbs, theta, pool, src);
      }
      if (which == DbPrivacyCase::pool_leak) extra = "S=" + std::to_string((*pool.shared())[0].value());
    }
    if (r.decoded != messages[theta - 1]) throw Error("decode failed during database-privacy enumeration");
    return transcript_view(r.transcript) + extra + kViewSeparator + secret;
  };
  return db_privacy_posterior(run, pow_int(q, static_cast<unsigned>((K - 1) * L)), limits);
}

// ---------------------------------------------------------------------------
// One-time pad uniformity

struct OtpVerdict {
  bool uniform = false;
  Rational tv;  // distance from uniform over F_q^length
  std::size_t support = 0;
  BigInt expected_support;
};

/// `gen` maps the noise source to a symbol vector of fixed length.
template <class Gen>
OtpVerdict otp_uniformity(Gen gen, std::uint64_t q, const Limits& limits = {}) {
  ExhaustiveSource probe;
  const std::size_t length = gen(probe).size();
  const auto d = enumerate_outcomes([&gen](RandomSource& src) { return detail::join_symbols(gen(src)); }, limits);
  OtpVerdict v;
  v.expected_support = pow_int(q, static_cast<unsigned>(length));
  v.support = d.size();
  v.tv = tv_from_uniform(d, v.expected_support);
  v.uniform = v.tv == 0;
  return v;
}

// ---------------------------------------------------------------------------
// Sparsification index privacy

/// Law of the permuted indices a database receives when the real positions
/// `updated` (1-based) change, over a uniform secret permutation of [1, L].
inline Distribution sparse_index_dist(std::size_t L, const std::vector<std::size_t>& updated, const Limits& limits = {}) {
  if (L > 8) throw SpaceTooLarge("permutation enumeration is capped at L <= 8");
  return enumerate_outcomes(
      [L, &updated](RandomSource& src) {
        const sparsify::ClientSecret secret{sparsify::SegmentationPlan::make(L, 1), {random_permutation(L, src)}};
        std::vector<std::size_t> seen;
        for (auto r : updated) {
          if (r < 1 || r > L) throw InvalidArgument("update index out of range");
          seen.push_back(secret.permuted_of(0, r - 1) + 1);
        }
        std::sort(seen.begin(), seen.end());
        return detail::join_numbers(seen);
      },
      limits);
}

// ---------------------------------------------------------------------------
// Reports

struct CheckResult {
  std::string check;
  bool pass = false;
  Rational tv;
  nlohmann::ordered_json params;
};

inline nlohmann::ordered_json to_json(const std::string& scheme, const CheckResult& c) {
  nlohmann::ordered_json j;
  j["scheme"] = scheme;
  j["check"] = c.check;
  j["params"] = c.params;
  j["result"] = c.pass ? "pass" : "fail";
  j["tv"] = to_string(c.tv);
  return j;
}

namespace detail {

inline nlohmann::ordered_json params_json(const SchemeParams& p, bool with_m) {
  nlohmann::ordered_json j;
  j["N"] = p.N;
  if (with_m) {
    j["M"] = p.M;
  } else {
    j["K"] = p.K;
  }
  j["q"] = std::to_string(p.q);
  return j;
}

inline std::vector<CheckResult> pruw_checks(const SchemeParams& p, const Limits& limits) {
  std::vector<CheckResult> out;
  const PrimeField field(p.q);
  const auto frame = pruw::EvaluationFrame::standard(field, p.N, p.M, 1);
  const auto params = params_json(p, true);
  const Rational tv = user_privacy_sweep("pruw", p, limits);
  out.push_back({"user-privacy", tv == 0, tv, params});

  Rational worst_query = 0;
  Rational worst_update = 0;
  for (std::size_t n = 1; n <= p.N; ++n) {
    for (std::size_t theta = 1; theta <= p.M; ++theta) {
      const auto v = otp_uniformity(
          [&frame, theta, n](RandomSource& src) { return pruw::make_read_query(frame, theta, src).per_db[n - 1]; },
          p.q, limits);
      worst_query = std::max(worst_query, v.tv);
    }
    const auto u = otp_uniformity(
        [&frame, &field, n](RandomSource& src) {
          return SymbolVector{pruw::evaluate_update(frame, n, field.one(), sample_uniform(field, src))};
        },
        p.q, limits);
    worst_update = std::max(worst_update, u.tv);
  }
  out.push_back({"otp-query", worst_query == 0, worst_query, params});
  out.push_back({"otp-update", worst_update == 0, worst_update, params});

  if (p.N >= 3) {
    Rational worst_share = 0;
    Rational worst_gap = 0;
    for (std::size_t n = 1; n <= p.N; ++n) {
      auto share_of = [&frame, &field, n](std::int64_t w) {
        return [&frame, &field, n, w](RandomSource& src) {
          return SymbolVector{pruw::evaluate_share(frame, n, field.element(w), pruw::draw_share_noise(frame, src))};
        };
      };
      worst_share = std::max(worst_share, otp_uniformity(share_of(1), p.q, limits).tv);
      const auto zero = enumerate_outcomes([&](RandomSource& s) { return join_symbols(share_of(0)(s)); }, limits);
      const auto one = enumerate_outcomes([&](RandomSource& s) { return join_symbols(share_of(1)(s)); }, limits);
      worst_gap = std::max(worst_gap, total_variation(zero, one));
    }
    out.push_back({"otp-share", worst_share == 0, worst_share, params});
    out.push_back({"share-independence", worst_gap == 0, worst_gap, params});
  }
  return out;
}

inline std::vector<CheckResult> sparsify_checks(const SchemeParams& p, const Limits& limits) {
  std::vector<CheckResult> out;
  nlohmann::ordered_json params;
  params["L"] = p.L;
  params["s"] = p.s;
  params["q"] = std::to_string(p.q);

  // Every s-subset of real positions against the first one.
  std::vector<std::vector<std::size_t>> sets;
  std::vector<std::size_t> cur;
  auto rec = [&](auto&& self, std::size_t start) -> void {
    if (cur.size() == p.s) {
      sets.push_back(cur);
      return;
    }
    for (std::size_t i = start; i <= p.L; ++i) {
      cur.push_back(i);
      self(self, i + 1);
      cur.pop_back();
    }
  };
  rec(rec, 1);
  Rational worst = 0;
  const auto base = sparse_index_dist(p.L, sets.front(), limits);
  for (std::size_t i = 1; i < sets.size(); ++i)
    worst = std::max(worst, total_variation(base, sparse_index_dist(p.L, sets[i], limits)));
  out.push_back({"index-privacy", worst == 0, worst, params});

  const PrimeField field(p.q);
  const auto alpha = field.one();
  const auto v = otp_uniformity(
      [&](RandomSource& src) { return SymbolVector{field.one() + alpha * sample_uniform(field, src)}; }, p.q, limits);
  out.push_back({"otp-update", v.uniform, v.tv, params});
  return out;
}

}  // namespace detail

/// Every audit that applies to `scheme`.
inline std::vector<CheckResult> audit_scheme(const std::string& scheme, const SchemeParams& p, const Limits& limits = {}) {
  if (scheme == "pruw") return detail::pruw_checks(p, limits);
  if (scheme == "sparsify") return detail::sparsify_checks(p, limits);
  std::vector<CheckResult> out;
  const auto params = detail::params_json(p, false);
  const Rational tv = user_privacy_sweep(scheme, p, limits);
  out.push_back({"user-privacy", tv == 0, tv, params});
  if (scheme == "spir-det" || scheme == "spir-prob") {
    const auto which = scheme == "spir-det" ? DbPrivacyCase::spir_deterministic : DbPrivacyCase::spir_probabilistic;
    Rational worst = 0;
    for (std::size_t theta = 1; theta <= p.K; ++theta)
      worst = std::max(worst, spir_db_privacy(which, p.N, p.K, p.q, theta, 1, limits).max_tv_from_uniform());
    out.push_back({"db-privacy", worst == 0, worst, params});
  }
  return out;
}

}  // namespace pirlab::audit
