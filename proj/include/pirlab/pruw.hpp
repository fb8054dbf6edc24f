#pragma once

// Private read-update-write for federated submodel learning.
//
// Every stored symbol, query and update is one evaluation of a noisy
// polynomial at the database's point alpha_n:
//
//   share   S = w + (f - a) * (Z_0 + Z_1 a + ... + Z_{N-3} a^{N-3})
//   query   Q(k) = [k == theta] / (f - a) + Zbar_k
//   answer  A = sum_k S_k Q(k) = w_theta / (f - a) + V_0 + V_1 a + ... + V_{N-2} a^{N-2}
//   update  U = Delta + (f - a) * Zdot
//   apply   S_k += (f - a) * U * Q(k)
//
// N evaluations of the answer determine w_theta and the N - 1 interference
// coefficients. The applied increment keeps the share form because its noise
// part has degree 1 <= N - 3, so N >= 4 is required for read and write.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pirlab/error.hpp"
#include "pirlab/field.hpp"
#include "pirlab/random.hpp"
#include "pirlab/rational.hpp"

namespace pirlab::pruw {

/// Public constants shared by the client and all databases.
class EvaluationFrame {
 public:
  EvaluationFrame(const PrimeField& field, FieldElement f, SymbolVector alphas, std::size_t M, std::size_t L)
      : field_(field), f_(f), alphas_(std::move(alphas)), M_(M), L_(L) {
    if (alphas_.empty()) throw InvalidArgument("frame needs at least one database");
    if (M_ < 1 || L_ < 1) throw InvalidArgument("frame needs M >= 1 and L >= 1");
    for (std::size_t i = 0; i < alphas_.size(); ++i) {
      if (alphas_[i] == f_) throw InvalidArgument("evaluation points must differ from f");
      for (std::size_t j = i + 1; j < alphas_.size(); ++j)
        if (alphas_[i] == alphas_[j]) throw InvalidArgument("evaluation points must be distinct");
    }
  }

  /// alpha_n = n for n = 1..N and f = 0; needs q > N.
  static EvaluationFrame standard(const PrimeField& field, std::size_t N, std::size_t M, std::size_t L) {
    if (field.modulus() <= N) throw InvalidArgument("field too small for N distinct evaluation points plus f");
    SymbolVector alphas;
    for (std::size_t n = 1; n <= N; ++n) alphas.push_back(field.element(static_cast<std::int64_t>(n)));
    return EvaluationFrame(field, field.zero(), std::move(alphas), M, L);
  }

  const PrimeField& field() const { return field_; }
  std::size_t N() const { return alphas_.size(); }
  std::size_t M() const { return M_; }
  std::size_t L() const { return L_; }
  const FieldElement& f() const { return f_; }
  const FieldElement& alpha(std::size_t n) const { return alphas_.at(n - 1); }
  FieldElement gap(std::size_t n) const { return f_ - alpha(n); }
  /// Degree of the storage noise polynomial inside the (f - alpha) factor.
  std::size_t noise_degree() const {
    if (N() < 3) throw InvalidArgument("secret-shared storage needs N >= 3 databases");
    return N() - 3;
  }

  void require_read_write() const {
    if (N() < 4) throw InvalidArgument("read-update-write needs N >= 4 databases");
  }

 private:
  PrimeField field_;
  FieldElement f_;
  SymbolVector alphas_;
  std::size_t M_;
  std::size_t L_;
};

inline SymbolVector draw_share_noise(const EvaluationFrame& frame, RandomSource& source) {
  return sample_vector(frame.field(), frame.noise_degree() + 1, source);
}

/// w + (f - alpha_n) * sum_i noise[i] alpha_n^i
inline FieldElement evaluate_share(const EvaluationFrame& frame, std::size_t n, const FieldElement& w,
                                   const SymbolVector& noise) {
  FieldElement poly = frame.field().zero();
  FieldElement power = frame.field().one();
  for (const auto& z : noise) {
    poly += z * power;
    power *= frame.alpha(n);
  }
  return w + frame.gap(n) * poly;
}

/// Delta + (f - alpha_n) * zdot
inline FieldElement evaluate_update(const EvaluationFrame& frame, std::size_t n, const FieldElement& delta,
                                    const FieldElement& zdot) {
  return delta + frame.gap(n) * zdot;
}

/// Query vectors for all databases: e_theta / (f - alpha_n) + Zbar, with the
/// same Zbar everywhere.
struct ReadQuery {
  std::size_t theta = 1;
  std::vector<SymbolVector> per_db;
};

inline ReadQuery make_read_query(const EvaluationFrame& frame, std::size_t theta, RandomSource& source) {
  if (theta < 1 || theta > frame.M()) throw InvalidArgument("theta must be in [1, M]");
  const SymbolVector zbar = sample_vector(frame.field(), frame.M(), source);
  ReadQuery q{theta, {}};
  for (std::size_t n = 1; n <= frame.N(); ++n) {
    SymbolVector v = zbar;
    v[theta - 1] += frame.gap(n).inv();
    q.per_db.push_back(std::move(v));
  }
  return q;
}

/// Per-database incremental table: M rows of L symbols.
using Table = std::vector<SymbolVector>;

/// One database's share table plus the query cached for the current round.
class PruwDatabase {
 public:
  PruwDatabase(std::size_t n, FieldElement alpha, FieldElement gap, Table shares)
      : n_(n), alpha_(alpha), gap_(gap), shares_(std::move(shares)) {}

  std::size_t index() const { return n_; }
  const FieldElement& alpha() const { return alpha_; }
  const Table& shares() const { return shares_; }

  /// Dot product of the stored column at each requested position with the
  /// query. Caches the query under `round` for the writing phase.
  SymbolVector answer(std::uint64_t round, const SymbolVector& query, const std::vector<std::size_t>& positions) {
    if (query.size() != shares_.size()) throw MalformedQuery("read query length must equal M");
    cached_ = std::make_pair(round, query);
    SymbolVector out;
    out.reserve(positions.size());
    for (auto l : positions) {
      FieldElement acc = gap_.field().zero();
      for (std::size_t k = 0; k < shares_.size(); ++k) acc += shares_[k].at(l) * query[k];
      out.push_back(acc);
    }
    return out;
  }

  /// (f - alpha_n) * U * Q(k) for every submodel, at the updated positions.
  Table incremental(std::uint64_t round, const std::vector<std::pair<std::size_t, FieldElement>>& updates) const {
    if (!cached_ || cached_->first != round) throw InvalidArgument("write without a read in the same round");
    const SymbolVector& q = cached_->second;
    Table inc(shares_.size(), zeros(gap_.field(), shares_.front().size()));
    for (const auto& [l, u] : updates) {
      if (l >= shares_.front().size()) throw MalformedQuery("update position out of range");
      for (std::size_t k = 0; k < shares_.size(); ++k) inc[k][l] = gap_ * u * q[k];
    }
    return inc;
  }

  void add(const Table& inc) {
    for (std::size_t k = 0; k < shares_.size(); ++k)
      for (std::size_t l = 0; l < shares_[k].size(); ++l) shares_[k][l] += inc[k][l];
  }

 private:
  std::size_t n_;
  FieldElement alpha_;
  FieldElement gap_;
  Table shares_;
  std::optional<std::pair<std::uint64_t, SymbolVector>> cached_;
};

/// Secret-shares an M x L model across the frame's N databases with fresh
/// noise for every (k, l).
inline std::vector<PruwDatabase> pruw_init(const std::vector<SymbolVector>& models, const EvaluationFrame& frame,
                                           RandomSource& source) {
  if (frame.N() < 3) throw InvalidArgument("storage needs N >= 3");
  if (models.size() != frame.M()) throw InvalidArgument("model count must equal M");
  std::vector<Table> tables(frame.N(), Table(frame.M(), zeros(frame.field(), frame.L())));
  for (std::size_t k = 0; k < frame.M(); ++k) {
    if (models[k].size() != frame.L()) throw InvalidArgument("submodel length must equal L");
    for (std::size_t l = 0; l < frame.L(); ++l) {
      const auto noise = draw_share_noise(frame, source);
      for (std::size_t n = 1; n <= frame.N(); ++n) tables[n - 1][k][l] = evaluate_share(frame, n, models[k][l], noise);
    }
  }
  std::vector<PruwDatabase> dbs;
  for (std::size_t n = 1; n <= frame.N(); ++n) dbs.emplace_back(n, frame.alpha(n), frame.gap(n), std::move(tables[n - 1]));
  return dbs;
}

/// Splits N evaluations of a share into its data term and noise coefficients
/// against the basis {1, (f-a), (f-a) a, ..., (f-a) a^(N-2)}. `in_form` holds
/// when the top noise coefficient vanishes, i.e. noise degree <= N - 3.
struct ShareDecomposition {
  FieldElement data;
  SymbolVector noise;
  bool in_form = false;
};

inline ShareDecomposition decompose_share(const EvaluationFrame& frame, const SymbolVector& values) {
  const std::size_t N = frame.N();
  if (values.size() != N) throw InvalidArgument("need one value per database");
  FieldMatrix a(N, N, frame.field());
  for (std::size_t n = 1; n <= N; ++n) {
    a(n - 1, 0) = frame.field().one();
    FieldElement power = frame.field().one();
    for (std::size_t c = 1; c < N; ++c) {
      a(n - 1, c) = frame.gap(n) * power;
      power *= frame.alpha(n);
    }
  }
  auto x = solve_linear(std::move(a), values);
  ShareDecomposition d{x[0], SymbolVector(x.begin() + 1, x.end()), false};
  d.in_form = d.noise.back().is_zero();
  return d;
}

/// Recovers w_theta from the N answers at one position.
inline FieldElement decode_answer(const EvaluationFrame& frame, const SymbolVector& answers) {
  const std::size_t N = frame.N();
  FieldMatrix a(N, N, frame.field());
  for (std::size_t n = 1; n <= N; ++n) {
    a(n - 1, 0) = frame.gap(n).inv();
    FieldElement power = frame.field().one();
    for (std::size_t c = 1; c < N; ++c) {
      a(n - 1, c) = power;
      power *= frame.alpha(n);
    }
  }
  return solve_linear(std::move(a), answers)[0];
}

inline std::vector<std::size_t> all_positions(std::size_t L) {
  std::vector<std::size_t> p(L);
  for (std::size_t l = 0; l < L; ++l) p[l] = l;
  return p;
}

struct ReadResult {
  ReadQuery query;
  std::vector<std::size_t> positions;
  SymbolVector decoded;  // length L; positions not read stay zero
  std::size_t downloaded_symbols = 0;
  std::size_t uploaded_symbols = 0;
};

/// Reading phase. `positions` restricts the read (random sparsification);
/// by default every position is read.
inline ReadResult pruw_read(const EvaluationFrame& frame, std::vector<PruwDatabase>& dbs, std::size_t theta,
                            std::uint64_t round, RandomSource& source,
                            std::optional<std::vector<std::size_t>> positions = std::nullopt) {
  frame.require_read_write();
  if (dbs.size() != frame.N()) throw InvalidArgument("database count must equal N");
  ReadResult r;
  r.query = make_read_query(frame, theta, source);
  r.positions = positions ? *positions : all_positions(frame.L());
  std::vector<SymbolVector> answers;
  for (std::size_t n = 1; n <= frame.N(); ++n) {
    answers.push_back(dbs[n - 1].answer(round, r.query.per_db[n - 1], r.positions));
    r.downloaded_symbols += answers.back().size();
    r.uploaded_symbols += r.query.per_db[n - 1].size();
  }
  r.decoded = zeros(frame.field(), frame.L());
  for (std::size_t i = 0; i < r.positions.size(); ++i) {
    SymbolVector column;
    for (const auto& a : answers) column.push_back(a[i]);
    r.decoded[r.positions[i]] = decode_answer(frame, column);
  }
  return r;
}

struct WriteResult {
  std::vector<Table> increments;  // per database
  std::size_t uploaded_symbols = 0;
};

/// Writing phase: sends U_n = Delta + (f - alpha_n) Zdot for each position
/// (fresh Zdot per position); each database places it with the query it
/// cached during this round's read and adds the increment to its storage.
inline WriteResult pruw_write(const EvaluationFrame& frame, std::vector<PruwDatabase>& dbs, const SymbolVector& delta,
                              std::uint64_t round, RandomSource& source,
                              std::optional<std::vector<std::size_t>> positions = std::nullopt) {
  frame.require_read_write();
  if (delta.size() != frame.L()) throw InvalidArgument("update length must equal L");
  const auto where = positions ? *positions : all_positions(frame.L());
  std::vector<std::vector<std::pair<std::size_t, FieldElement>>> per_db(frame.N());
  for (auto l : where) {
    const FieldElement zdot = sample_uniform(frame.field(), source);
    for (std::size_t n = 1; n <= frame.N(); ++n) per_db[n - 1].emplace_back(l, evaluate_update(frame, n, delta[l], zdot));
  }
  WriteResult w;
  for (std::size_t n = 1; n <= frame.N(); ++n) {
    w.increments.push_back(dbs[n - 1].incremental(round, per_db[n - 1]));
    dbs[n - 1].add(w.increments.back());
    w.uploaded_symbols += per_db[n - 1].size();
  }
  return w;
}

struct RoundtripReport {
  bool read_matches = false;        // first read returned models[theta]
  bool write_matches = false;       // every submodel reads back as the shadow model
  bool form_preserved = false;      // every share still decomposes in form
  Rational reading_cost;            // downloaded / L
  Rational writing_cost;            // uploaded / L
};

/// init -> read theta -> write Delta -> read every submodel, checked against a
/// plaintext shadow copy.
inline RoundtripReport pruw_roundtrip(const EvaluationFrame& frame, const std::vector<SymbolVector>& models,
                                      std::size_t theta, const SymbolVector& delta, RandomSource& source) {
  auto dbs = pruw_init(models, frame, source);
  RoundtripReport rep;
  const auto read = pruw_read(frame, dbs, theta, 1, source);
  rep.read_matches = read.decoded == models.at(theta - 1);
  const auto write = pruw_write(frame, dbs, delta, 1, source);
  rep.reading_cost = Rational(read.downloaded_symbols, frame.L());
  rep.writing_cost = Rational(write.uploaded_symbols, frame.L());

  auto shadow = models;
  for (std::size_t l = 0; l < frame.L(); ++l) shadow[theta - 1][l] += delta[l];
  rep.write_matches = true;
  for (std::size_t k = 1; k <= frame.M(); ++k) {
    const auto check = pruw_read(frame, dbs, k, 1 + k, source);
    rep.write_matches = rep.write_matches && check.decoded == shadow[k - 1];
  }
  rep.form_preserved = true;
  for (std::size_t k = 0; k < frame.M(); ++k) {
    for (std::size_t l = 0; l < frame.L(); ++l) {
      SymbolVector values;
      for (const auto& db : dbs) values.push_back(db.shares()[k][l]);
      const auto d = decompose_share(frame, values);
      rep.form_preserved = rep.form_preserved && d.in_form && d.data == shadow[k][l];
    }
  }
  return rep;
}

/// Random sparsification: read and write only a uniformly chosen
/// (1 - D) fraction of positions. D * L must be an integer.
inline std::vector<std::size_t> random_kept_positions(std::size_t L, const Rational& distortion, RandomSource& source) {
  if (distortion < 0 || distortion > 1) throw InvalidArgument("distortion must lie in [0, 1]");
  const Rational skipped = distortion * L;
  if (boost::multiprecision::denominator(skipped) != 1) throw InvalidArgument("D * L must be an integer");
  const auto keep = L - boost::multiprecision::numerator(skipped).convert_to<std::size_t>();
  auto perm = random_permutation(L, source);
  std::vector<std::size_t> kept(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(keep));
  std::sort(kept.begin(), kept.end());
  return kept;
}

struct SparseCosts {
  Rational reading_cost;
  Rational writing_cost;
  std::vector<std::size_t> read_positions;
  std::vector<std::size_t> write_positions;
  bool kept_positions_correct = false;  // every kept position decoded / updated exactly
};

/// One read-write round with reading distortion d_read and writing
/// distortion d_write, measured against a plaintext shadow.
inline SparseCosts pruw_sparse_round(const EvaluationFrame& frame, const std::vector<SymbolVector>& models,
                                     std::size_t theta, const SymbolVector& delta, const Rational& d_read,
                                     const Rational& d_write, RandomSource& source) {
  auto dbs = pruw_init(models, frame, source);
  SparseCosts c;
  c.read_positions = random_kept_positions(frame.L(), d_read, source);
  c.write_positions = random_kept_positions(frame.L(), d_write, source);
  const auto read = pruw_read(frame, dbs, theta, 1, source, c.read_positions);
  const auto write = pruw_write(frame, dbs, delta, 1, source, c.write_positions);
  c.reading_cost = Rational(read.downloaded_symbols, frame.L());
  c.writing_cost = Rational(write.uploaded_symbols, frame.L());

  bool ok = true;
  for (auto l : c.read_positions) ok = ok && read.decoded[l] == models[theta - 1][l];
  auto shadow = models[theta - 1];
  for (auto l : c.write_positions) shadow[l] += delta[l];
  const auto after = pruw_read(frame, dbs, theta, 2, source);
  ok = ok && after.decoded == shadow;
  c.kept_positions_correct = ok;
  return c;
}

inline nlohmann::ordered_json shares_to_json(const EvaluationFrame& frame, const std::vector<PruwDatabase>& dbs) {
  nlohmann::ordered_json j;
  j["q"] = std::to_string(frame.field().modulus());
  j["f"] = std::to_string(frame.f().value());
  j["N"] = frame.N();
  j["M"] = frame.M();
  j["L"] = frame.L();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& db : dbs) {
    nlohmann::ordered_json e;
    e["n"] = db.index();
    e["alpha"] = std::to_string(db.alpha().value());
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : db.shares()) {
      auto r = nlohmann::ordered_json::array();
      for (const auto& v : row) r.push_back(std::to_string(v.value()));
      rows.push_back(std::move(r));
    }
    e["shares"] = std::move(rows);
    arr.push_back(std::move(e));
  }
  j["databases"] = std::move(arr);
  return j;
}

}  // namespace pirlab::pruw
