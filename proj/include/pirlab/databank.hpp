#pragma once

// Replicated non-colluding databases, the query/answer wire types, transcript
// capture and exact cost accounting.
//
// Conventions: messages are numbered from 1 (theta in [1, K]); symbol
// positions inside a message are numbered from 0.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "pirlab/error.hpp"
#include "pirlab/field.hpp"
#include "pirlab/rational.hpp"

namespace pirlab {

/// K messages of L symbols each.
class MessageStore {
 public:
  MessageStore(const PrimeField& field, std::vector<SymbolVector> messages)
      : field_(field), messages_(std::move(messages)) {
    if (messages_.empty()) throw InvalidArgument("store needs at least one message");
    const std::size_t length = messages_.front().size();
    if (length == 0) throw InvalidArgument("messages must have at least one symbol");
    for (const auto& m : messages_) {
      if (m.size() != length) throw InvalidArgument("all messages must have the same length");
      for (const auto& s : m) {
        if (s.modulus() != field.modulus()) throw FieldMismatch();
      }
    }
  }

  static MessageStore random(const PrimeField& field, std::size_t K, std::size_t L, RandomSource& source) {
    std::vector<SymbolVector> messages;
    messages.reserve(K);
    for (std::size_t k = 0; k < K; ++k) messages.push_back(sample_vector(field, L, source));
    return MessageStore(field, std::move(messages));
  }

  static MessageStore from_values(const PrimeField& field, const std::vector<std::vector<std::int64_t>>& values) {
    std::vector<SymbolVector> messages;
    for (const auto& row : values) {
      SymbolVector m;
      for (auto v : row) m.push_back(field.element(v));
      messages.push_back(std::move(m));
    }
    return MessageStore(field, std::move(messages));
  }

  const PrimeField& field() const { return field_; }
  std::size_t K() const { return messages_.size(); }
  std::size_t L() const { return messages_.front().size(); }

  /// Message k, 1-based.
  const SymbolVector& message(std::size_t k) const {
    if (k < 1 || k > K()) throw InvalidArgument("message index out of range");
    return messages_[k - 1];
  }
  const FieldElement& at(std::size_t k, std::size_t position) const {
    const auto& m = message(k);
    if (position >= m.size()) throw MalformedQuery("symbol position out of range");
    return m[position];
  }
  FieldElement& mutable_at(std::size_t k, std::size_t position) {
    if (k < 1 || k > K() || position >= L()) throw InvalidArgument("symbol out of range");
    return messages_[k - 1][position];
  }

  friend bool operator==(const MessageStore&, const MessageStore&) = default;

 private:
  PrimeField field_;
  std::vector<SymbolVector> messages_;
};

// ---------------------------------------------------------------------------
// Query bodies. Each body kind has one answer rule in DatabaseState::serve.

/// One answer symbol: sum over k, j of coeff[k][j] * W_k[offset + j].
/// Coefficients are message-major, K * width entries.
struct LinearQuery {
  std::size_t offset = 0;
  std::size_t width = 1;
  SymbolVector coefficients;
};

/// L answer symbols: position l gets sum over k of coeff[k] * W_k[l].
/// An all-zero combination is never sent; the database is simply not asked.
struct CombinationQuery {
  SymbolVector coefficients;
};

struct SymbolRef {
  std::size_t message = 1;  // 1-based
  std::size_t index = 0;    // position inside the subpacket
  friend bool operator==(const SymbolRef&, const SymbolRef&) = default;
};

/// For each subpacket s and each request, one symbol:
/// sum over refs of W_k[s * subpacket + index].
struct SumQuery {
  std::size_t subpacket = 1;
  std::vector<std::vector<SymbolRef>> requests;
};

/// For each subpacket s, one symbol: sum over k of W_k[s * stride + indices[k] - 1]
/// where index 0 selects the all-zero dummy symbol.
struct IndexQuery {
  std::size_t stride = 1;
  std::vector<std::size_t> indices;
};

using QueryBody = std::variant<LinearQuery, CombinationQuery, SumQuery, IndexQuery>;

struct Query {
  std::string scheme;
  QueryBody body;
};

/// Number of symbols the user uploads for a query.
inline std::size_t upload_symbols(const Query& q) {
  return std::visit(
      [](const auto& b) -> std::size_t {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, LinearQuery>) {
          return b.coefficients.size();
        } else if constexpr (std::is_same_v<T, CombinationQuery>) {
          return b.coefficients.size();
        } else if constexpr (std::is_same_v<T, SumQuery>) {
          std::size_t n = 0;
          for (const auto& r : b.requests) n += r.size();
          return n;
        } else {
          return b.indices.size();
        }
      },
      q.body);
}

/// Scheme tag -> index of the QueryBody alternative it answers with.
inline std::map<std::string, std::size_t>& answer_rules() {
  static std::map<std::string, std::size_t> rules = {
      {"cgks", 0},     {"residual", 0},  {"spir-det", 0}, {"fixture-leaky-theta", 0},
      {"leaky", 1},    {"sunjafar", 2},  {"tian", 3},     {"spir-prob", 3},
  };
  return rules;
}

inline void register_scheme(const std::string& tag, std::size_t body_kind) { answer_rules()[tag] = body_kind; }

/// One replica. Reads only its own store; the query log is append-only.
class DatabaseState {
 public:
  DatabaseState(std::size_t index, MessageStore store) : index_(index), store_(std::move(store)) {}

  std::size_t index() const { return index_; }
  const MessageStore& store() const { return store_; }
  MessageStore& mutable_store() { return store_; }
  const std::vector<Query>& log() const { return log_; }

  void attach_pool(std::shared_ptr<const SymbolVector> pool) { pool_ = std::move(pool); }

  /// Answers `query` from this database's own state. With `pool_base`, the
  /// s-th answer symbol is masked with common randomness pool[pool_base + s].
  SymbolVector serve(const Query& query, std::optional<std::size_t> pool_base = std::nullopt) {
    auto rule = answer_rules().find(query.scheme);
    if (rule == answer_rules().end() || rule->second != query.body.index()) throw UnknownScheme(query.scheme);
    SymbolVector answer = std::visit([this](const auto& b) { return answer_body(b); }, query.body);
    if (pool_base) {
      if (!pool_ || *pool_base + answer.size() > pool_->size()) throw PoolExhausted();
      for (std::size_t s = 0; s < answer.size(); ++s) answer[s] += (*pool_)[*pool_base + s];
    }
    log_.push_back(query);
    return answer;
  }

 private:
  SymbolVector answer_body(const LinearQuery& q) const {
    const std::size_t K = store_.K();
    if (q.width == 0 || q.coefficients.size() != K * q.width || q.offset + q.width > store_.L())
      throw MalformedQuery("linear query has the wrong shape");
    FieldElement acc = store_.field().zero();
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t j = 0; j < q.width; ++j) acc += q.coefficients[k * q.width + j] * store_.at(k + 1, q.offset + j);
    return {acc};
  }

  SymbolVector answer_body(const CombinationQuery& q) const {
    if (q.coefficients.size() != store_.K()) throw MalformedQuery("combination query has the wrong length");
    SymbolVector out = zeros(store_.field(), store_.L());
    for (std::size_t k = 0; k < store_.K(); ++k)
      for (std::size_t l = 0; l < store_.L(); ++l) out[l] += q.coefficients[k] * store_.at(k + 1, l);
    return out;
  }

  SymbolVector answer_body(const SumQuery& q) const {
    if (q.subpacket == 0 || store_.L() % q.subpacket != 0) throw MalformedQuery("sum query subpacket mismatch");
    const std::size_t packets = store_.L() / q.subpacket;
    SymbolVector out;
    out.reserve(packets * q.requests.size());
    for (std::size_t s = 0; s < packets; ++s) {
      for (const auto& request : q.requests) {
        FieldElement acc = store_.field().zero();
        for (const auto& ref : request) {
          if (ref.index >= q.subpacket) throw MalformedQuery("sum query index outside subpacket");
          acc += store_.at(ref.message, s * q.subpacket + ref.index);
        }
        out.push_back(acc);
      }
    }
    return out;
  }

  SymbolVector answer_body(const IndexQuery& q) const {
    if (q.indices.size() != store_.K() || q.stride == 0 || store_.L() % q.stride != 0)
      throw MalformedQuery("index query has the wrong shape");
    const std::size_t packets = store_.L() / q.stride;
    SymbolVector out;
    out.reserve(packets);
    for (std::size_t s = 0; s < packets; ++s) {
      FieldElement acc = store_.field().zero();
      for (std::size_t k = 0; k < q.indices.size(); ++k) {
        const std::size_t idx = q.indices[k];
        if (idx > q.stride) throw MalformedQuery("index query entry out of range");
        if (idx != 0) acc += store_.at(k + 1, s * q.stride + idx - 1);
      }
      out.push_back(acc);
    }
    return out;
  }

  std::size_t index_;
  MessageStore store_;
  std::vector<Query> log_;
  std::shared_ptr<const SymbolVector> pool_;
};

/// Server-side common randomness: one sequence shared read-only by every
/// database and never shown to the user. The orchestrator owns the cursor;
/// reserved slots are never handed out twice.
class CommonRandomnessPool {
 public:
  explicit CommonRandomnessPool(SymbolVector symbols)
      : symbols_(std::make_shared<const SymbolVector>(std::move(symbols))) {}

  static CommonRandomnessPool random(const PrimeField& field, std::size_t size, RandomSource& source) {
    return CommonRandomnessPool(sample_vector(field, size, source));
  }

  /// Reserves `count` fresh symbols and returns the first slot.
  std::size_t reserve(std::size_t count) {
    if (cursor_ + count > symbols_->size()) throw PoolExhausted();
    const std::size_t base = cursor_;
    cursor_ += count;
    return base;
  }

  std::shared_ptr<const SymbolVector> shared() const { return symbols_; }
  std::size_t consumed() const { return cursor_; }
  std::size_t remaining() const { return symbols_->size() - cursor_; }

 private:
  std::shared_ptr<const SymbolVector> symbols_;
  std::size_t cursor_ = 0;
};

/// N independent replicas (indices 1..N) with empty logs.
inline std::vector<DatabaseState> replicate(const MessageStore& store, std::size_t N) {
  if (N < 1) throw InvalidArgument("need at least one database");
  std::vector<DatabaseState> out;
  out.reserve(N);
  for (std::size_t n = 1; n <= N; ++n) out.emplace_back(n, store);
  return out;
}

// ---------------------------------------------------------------------------
// Transcripts and costs.

struct DatabaseExchange {
  std::size_t n = 0;
  std::vector<Query> queries;
  std::vector<SymbolVector> answers;
  std::size_t uploaded_symbols = 0;
  std::size_t downloaded_symbols = 0;
};

struct SchemeTranscript {
  std::string scheme;
  std::size_t N = 0;
  std::size_t K = 0;
  std::size_t L = 0;  // desired symbols retrieved by the round
  std::uint64_t q = 2;
  std::size_t theta = 1;
  std::vector<DatabaseExchange> per_db;
  std::size_t pool_symbols = 0;  // common randomness consumed

  SchemeTranscript() = default;
  SchemeTranscript(std::string scheme_id, std::size_t n_db, std::size_t k, std::size_t l, std::uint64_t modulus,
                   std::size_t desired)
      : scheme(std::move(scheme_id)), N(n_db), K(k), L(l), q(modulus), theta(desired) {
    if (theta < 1 || theta > K) throw InvalidArgument("theta out of range");
    for (std::size_t i = 1; i <= N; ++i) per_db.push_back(DatabaseExchange{i, {}, {}, 0, 0});
  }

  void record(std::size_t n, const Query& query, const SymbolVector& answer) {
    auto& ex = per_db.at(n - 1);
    ex.uploaded_symbols += upload_symbols(query);
    ex.downloaded_symbols += answer.size();
    ex.queries.push_back(query);
    ex.answers.push_back(answer);
  }

  std::size_t downloaded_symbols() const {
    std::size_t total = 0;
    for (const auto& ex : per_db) total += ex.downloaded_symbols;
    return total;
  }
  std::size_t uploaded_symbols() const {
    std::size_t total = 0;
    for (const auto& ex : per_db) total += ex.uploaded_symbols;
    return total;
  }
  unsigned bits_per_symbol() const { return PrimeField(q, PrimeField::Unchecked{}).bits_per_symbol(); }
  std::uint64_t downloaded_bits() const { return downloaded_symbols() * bits_per_symbol(); }
  std::uint64_t uploaded_bits() const { return uploaded_symbols() * bits_per_symbol(); }
};

/// Sends `query` to database n (1-based) and records the exchange.
inline SymbolVector exchange(std::vector<DatabaseState>& dbs, SchemeTranscript& t, std::size_t n, const Query& query,
                             std::optional<std::size_t> pool_base = std::nullopt) {
  SymbolVector answer = dbs.at(n - 1).serve(query, pool_base);
  t.record(n, query, answer);
  return answer;
}

struct CostReport {
  Rational rate;
  std::optional<Rational> capacity;
  std::optional<Rational> reading_cost;
  std::optional<Rational> writing_cost;
  std::optional<Rational> pool_symbols_per_symbol;

  bool matches_capacity() const { return capacity && *capacity == rate; }
};

/// rate = L / downloaded symbols, exactly.
inline CostReport empirical_rate(const SchemeTranscript& t) {
  const std::size_t down = t.downloaded_symbols();
  if (down == 0) throw InvalidArgument("transcript has no downloads");
  if (t.L == 0) throw InvalidArgument("transcript retrieved nothing");
  CostReport r;
  r.rate = Rational(t.L, down);
  if (t.pool_symbols != 0) r.pool_symbols_per_symbol = Rational(t.pool_symbols, t.L);
  return r;
}

inline nlohmann::ordered_json to_json(const SchemeTranscript& t) {
  nlohmann::ordered_json j;
  j["scheme"] = t.scheme;
  j["N"] = t.N;
  j["K"] = t.K;
  j["L"] = t.L;
  j["q"] = std::to_string(t.q);
  j["theta"] = t.theta;
  auto per_db = nlohmann::ordered_json::array();
  for (const auto& ex : t.per_db) {
    nlohmann::ordered_json e;
    e["n"] = ex.n;
    e["uploaded_symbols"] = ex.uploaded_symbols;
    e["downloaded_symbols"] = ex.downloaded_symbols;
    per_db.push_back(std::move(e));
  }
  j["per_db"] = std::move(per_db);
  j["rate"] = t.downloaded_symbols() == 0 ? std::string("0/1") : to_string(empirical_rate(t).rate);
  return j;
}

}  // namespace pirlab
