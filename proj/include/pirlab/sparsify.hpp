#pragma once

// Permutation-based private top-r sparsification.
//
// The coordinator picks a secret permutation P of each segment's positions
// (P[j'] = real position sent under permuted position j') and gives database
// n the noisy permutation-reversing blocks R_n = Pi + alpha_n X, where
// Pi e_j' = e_P(j') and X is uniform noise shared by all databases. The model
// is stored as s_n = w + alpha_n z1 + alpha_n^2 z2.
//
// Write: the client sends (permuted index, Delta + alpha_n zdot) pairs; the
// database adds R_n times the embedded vector, which lands Delta at the real
// positions in the constant coefficient and keeps every share of degree 2.
// Read: the database returns <s_n, R_n e_j'>, a degree-3 polynomial in
// alpha_n whose constant term is w[P(j')]; N >= 4 evaluations recover it.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "pirlab/error.hpp"
#include "pirlab/field.hpp"
#include "pirlab/pruw.hpp"
#include "pirlab/random.hpp"
#include "pirlab/rational.hpp"

namespace pirlab::sparsify {

/// B contiguous segments; the first B - 1 have floor(L / B) positions and the
/// last takes the remainder.
struct SegmentationPlan {
  std::size_t L = 1;
  std::size_t B = 1;
  std::vector<std::size_t> starts;
  std::vector<std::size_t> sizes;

  static SegmentationPlan make(std::size_t L, std::size_t B) {
    if (L < 1) throw InvalidArgument("model size must be >= 1");
    if (B < 1 || B > L) throw InvalidArgument("segment count must satisfy 1 <= B <= L");
    SegmentationPlan p{L, B, {}, {}};
    const std::size_t base = L / B;
    std::size_t start = 0;
    for (std::size_t b = 0; b < B; ++b) {
      const std::size_t size = b + 1 == B ? L - start : base;
      p.starts.push_back(start);
      p.sizes.push_back(size);
      start += size;
    }
    return p;
  }

  bool ragged() const { return L % B != 0; }

  /// Segment containing global position (0-based).
  std::size_t segment_of(std::size_t position) const {
    for (std::size_t b = 0; b < B; ++b)
      if (position < starts[b] + sizes[b]) return b;
    throw InvalidArgument("position outside the model");
  }
};

/// Matrix symbols each database stores: sum of squared segment sizes, which
/// is L^2 / B when B divides L.
inline std::size_t storage_overhead(std::size_t L, std::size_t B) {
  const auto plan = SegmentationPlan::make(L, B);
  std::size_t total = 0;
  for (auto s : plan.sizes) total += s * s;
  return total;
}

/// Known to clients only.
struct ClientSecret {
  SegmentationPlan plan;
  // perms[b][j'] = real local position (0-based) behind permuted local position j'
  std::vector<std::vector<std::size_t>> perms;

  /// Permuted local position of a real local position in segment b.
  std::size_t permuted_of(std::size_t b, std::size_t real_local) const {
    const auto& p = perms.at(b);
    auto it = std::find(p.begin(), p.end(), real_local);
    if (it == p.end()) throw InvalidArgument("position outside segment");
    return static_cast<std::size_t>(it - p.begin());
  }
};

/// 0/1 matrix with Pi e_j' = e_P(j'), i.e. Pi(P[j'], j') = 1.
inline FieldMatrix reversing_matrix(const std::vector<std::size_t>& perm, const PrimeField& field) {
  FieldMatrix m(perm.size(), perm.size(), field);
  for (std::size_t j = 0; j < perm.size(); ++j) m(perm[j], j) = field.one();
  return m;
}

/// What database n holds: its evaluation point, one R_n block per segment and
/// its share vector.
class SparseDatabase {
 public:
  SparseDatabase(std::size_t n, FieldElement alpha, SegmentationPlan plan, std::vector<FieldMatrix> blocks,
                 SymbolVector shares)
      : n_(n), alpha_(alpha), plan_(std::move(plan)), blocks_(std::move(blocks)), shares_(std::move(shares)) {}

  std::size_t index() const { return n_; }
  const FieldElement& alpha() const { return alpha_; }
  const SegmentationPlan& plan() const { return plan_; }
  const std::vector<FieldMatrix>& blocks() const { return blocks_; }
  const SymbolVector& shares() const { return shares_; }

  /// <s_n restricted to the segment, R_n e_j'> for global permuted index j'
  /// (1-based).
  FieldElement answer(std::size_t permuted_global) const {
    if (permuted_global < 1 || permuted_global > plan_.L) throw InvalidArgument("permuted index out of range");
    const std::size_t b = plan_.segment_of(permuted_global - 1);
    const std::size_t local = permuted_global - 1 - plan_.starts[b];
    const auto col = blocks_[b].column(local);
    FieldElement acc = alpha_.field().zero();
    for (std::size_t i = 0; i < col.size(); ++i) acc += shares_[plan_.starts[b] + i] * col[i];
    return acc;
  }

  std::size_t storage_symbols() const {
    std::size_t total = 0;
    for (const auto& m : blocks_) total += m.rows() * m.cols();
    return total;
  }

  SymbolVector& mutable_shares() { return shares_; }

 private:
  std::size_t n_;
  FieldElement alpha_;
  SegmentationPlan plan_;
  std::vector<FieldMatrix> blocks_;
  SymbolVector shares_;
};

struct CoordinatorOutput {
  ClientSecret client;
  std::vector<SparseDatabase> databases;
  std::vector<FieldMatrix> noise;  // X per segment; coordinator-only, kept for verification
};

/// Setup with explicit per-segment permutations.
inline CoordinatorOutput coordinator_setup_with(const SymbolVector& model, std::size_t B,
                                                std::vector<std::vector<std::size_t>> perms,
                                                const pruw::EvaluationFrame& frame, RandomSource& source) {
  if (frame.N() < 4) throw InvalidArgument("sparse read-write needs N >= 4 databases");
  for (std::size_t n = 1; n <= frame.N(); ++n)
    if (frame.alpha(n).is_zero()) throw InvalidArgument("sparse shares need nonzero evaluation points");
  const auto plan = SegmentationPlan::make(model.size(), B);
  if (perms.size() != B) throw InvalidArgument("one permutation per segment");
  for (std::size_t b = 0; b < B; ++b) {
    auto sorted = perms[b];
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if (sorted.size() != plan.sizes[b] || sorted[i] != i) throw InvalidArgument("not a permutation of the segment");
  }
  const PrimeField& field = frame.field();
  CoordinatorOutput out{ClientSecret{plan, std::move(perms)}, {}, {}};
  for (std::size_t b = 0; b < B; ++b) {
    FieldMatrix x(plan.sizes[b], plan.sizes[b], field);
    for (std::size_t r = 0; r < x.rows(); ++r)
      for (std::size_t c = 0; c < x.cols(); ++c) x(r, c) = sample_uniform(field, source);
    out.noise.push_back(std::move(x));
  }
  const SymbolVector z1 = sample_vector(field, model.size(), source);
  const SymbolVector z2 = sample_vector(field, model.size(), source);
  for (std::size_t n = 1; n <= frame.N(); ++n) {
    const FieldElement a = frame.alpha(n);
    std::vector<FieldMatrix> blocks;
    for (std::size_t b = 0; b < B; ++b) {
      FieldMatrix r = reversing_matrix(out.client.perms[b], field);
      for (std::size_t i = 0; i < r.rows(); ++i)
        for (std::size_t j = 0; j < r.cols(); ++j) r(i, j) += a * out.noise[b](i, j);
      blocks.push_back(std::move(r));
    }
    SymbolVector shares;
    for (std::size_t l = 0; l < model.size(); ++l) shares.push_back(model[l] + a * z1[l] + a * a * z2[l]);
    out.databases.emplace_back(n, a, plan, std::move(blocks), std::move(shares));
  }
  return out;
}

/// Setup with uniformly random per-segment permutations.
inline CoordinatorOutput coordinator_setup(const SymbolVector& model, std::size_t B, const pruw::EvaluationFrame& frame,
                                           RandomSource& source) {
  const auto plan = SegmentationPlan::make(model.size(), B);
  std::vector<std::vector<std::size_t>> perms;
  for (auto size : plan.sizes) perms.push_back(random_permutation(size, source));
  return coordinator_setup_with(model, B, std::move(perms), frame, source);
}

/// One database's copy of a sparse write: global permuted indices (1-based)
/// and the noisy values meant for that database.
struct SparseMessage {
  std::vector<std::size_t> permuted;
  SymbolVector values;
};

/// Client side of a sparse write. `updates` are (real global position,
/// 1-based; Delta). Values travel as Delta + alpha_n zdot with a fresh zdot
/// per update shared by all databases. Entries are listed in ascending
/// permuted order.
inline std::vector<SparseMessage> client_write_sparse(const ClientSecret& secret, const pruw::EvaluationFrame& frame,
                                                      const std::vector<std::pair<std::size_t, FieldElement>>& updates,
                                                      RandomSource& source) {
  std::set<std::size_t> seen;
  std::vector<std::pair<std::size_t, FieldElement>> permuted;  // (global permuted 1-based, Delta)
  for (const auto& [real, delta] : updates) {
    if (real < 1 || real > secret.plan.L) throw InvalidArgument("update index out of range");
    if (!seen.insert(real).second) throw InvalidArgument("duplicate update index");
    const std::size_t b = secret.plan.segment_of(real - 1);
    const std::size_t local = real - 1 - secret.plan.starts[b];
    permuted.emplace_back(secret.plan.starts[b] + secret.permuted_of(b, local) + 1, delta);
  }
  std::sort(permuted.begin(), permuted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<SparseMessage> out(frame.N());
  for (const auto& [j, delta] : permuted) {
    const FieldElement zdot = sample_uniform(frame.field(), source);
    for (std::size_t n = 1; n <= frame.N(); ++n) {
      out[n - 1].permuted.push_back(j);
      out[n - 1].values.push_back(delta + frame.alpha(n) * zdot);
    }
  }
  return out;
}

/// Database side of a sparse write: s_n += R_n * embed(message), segment by
/// segment.
inline void db_rearrange_and_apply(SparseDatabase& db, const SparseMessage& message) {
  const auto& plan = db.plan();
  if (message.permuted.size() != message.values.size()) throw MalformedQuery("index/value count mismatch");
  std::map<std::size_t, SymbolVector> embedded;  // segment -> vector
  for (std::size_t i = 0; i < message.permuted.size(); ++i) {
    const std::size_t j = message.permuted[i];
    if (j < 1 || j > plan.L) throw InvalidArgument("permuted index out of range");
    const std::size_t b = plan.segment_of(j - 1);
    auto [it, inserted] = embedded.try_emplace(b, zeros(db.alpha().field(), plan.sizes[b]));
    it->second[j - 1 - plan.starts[b]] += message.values[i];
  }
  auto& shares = db.mutable_shares();
  for (const auto& [b, e] : embedded) {
    const auto placed = db.blocks()[b] * e;
    for (std::size_t i = 0; i < placed.size(); ++i) shares[plan.starts[b] + i] += placed[i];
  }
}

/// ceil(r' L) permuted indices, most frequent first; ties go to the smaller
/// index. `history` holds the permuted indices (1-based) received at t - 1.
inline std::vector<std::size_t> db_select_popular(const std::vector<std::vector<std::size_t>>& history, std::size_t L,
                                                  const Rational& fraction) {
  if (fraction <= 0 || fraction > 1) throw InvalidArgument("read fraction must lie in (0, 1]");
  if (history.empty()) throw InvalidArgument("no update history to select from");
  std::vector<std::size_t> counts(L + 1, 0);
  for (const auto& batch : history)
    for (auto j : batch) {
      if (j < 1 || j > L) throw InvalidArgument("history index out of range");
      ++counts[j];
    }
  const Rational want = fraction * L;
  BigInt take = boost::multiprecision::numerator(want) / boost::multiprecision::denominator(want);
  if (Rational(take) < want) take += 1;
  std::vector<std::size_t> order(L);
  for (std::size_t j = 0; j < L; ++j) order[j] = j + 1;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  order.resize(take.convert_to<std::size_t>());
  std::sort(order.begin(), order.end());
  return order;
}

/// Client side of a sparse read: answers[n-1][i] is database n's answer for
/// selected[i]. Returns (real global position, 1-based; value).
inline std::vector<std::pair<std::size_t, FieldElement>> client_read_sparse(
    const ClientSecret& secret, const pruw::EvaluationFrame& frame, const std::vector<std::size_t>& selected,
    const std::vector<SymbolVector>& answers) {
  if (frame.N() < 4) throw InvalidArgument("sparse read needs N >= 4 databases");
  if (answers.size() != frame.N()) throw InvalidArgument("need one answer vector per database");
  SymbolVector xs;
  for (std::size_t n = 1; n <= frame.N(); ++n) xs.push_back(frame.alpha(n));
  std::vector<std::pair<std::size_t, FieldElement>> out;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    SymbolVector ys;
    for (const auto& a : answers) ys.push_back(a.at(i));
    const std::size_t j = selected[i];
    const std::size_t b = secret.plan.segment_of(j - 1);
    const std::size_t real = secret.plan.starts[b] + secret.perms[b][j - 1 - secret.plan.starts[b]] + 1;
    out.emplace_back(real, interpolate_at(xs, ys, frame.field().zero()));
  }
  return out;
}

/// Runs the database side of a read for every database.
inline std::vector<SymbolVector> db_answers(const std::vector<SparseDatabase>& dbs, const std::vector<std::size_t>& selected) {
  std::vector<SymbolVector> out;
  for (const auto& db : dbs) {
    SymbolVector a;
    for (auto j : selected) a.push_back(db.answer(j));
    out.push_back(std::move(a));
  }
  return out;
}

/// Exact leakage entropy in bits when s of the L positions are updated,
/// chosen uniformly. Single-stage reveals the per-segment count vector;
/// two-stage hides which segment holds which count, revealing only the
/// multiset of counts.
inline double leakage_entropy(std::size_t L, std::size_t B, std::size_t s, bool two_stage) {
  if (L > 24) throw SpaceTooLarge("leakage enumeration is capped at L <= 24; use sampling");
  if (s > L) throw InvalidArgument("sparse count exceeds model size");
  const auto plan = SegmentationPlan::make(L, B);

  auto choose = [](std::size_t n, std::size_t k) {
    BigInt r = 1;
    for (std::size_t i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
  };
  // Enumerate count vectors c with c_b <= size_b and sum c = s; each occurs
  // in prod C(size_b, c_b) of the C(L, s) supports.
  std::map<std::vector<std::size_t>, BigInt> weight;
  std::vector<std::size_t> counts(B, 0);
  auto rec = [&](auto&& self, std::size_t b, std::size_t left, BigInt ways) -> void {
    if (b + 1 == B) {
      if (left > plan.sizes[b]) return;
      counts[b] = left;
      auto key = counts;
      if (two_stage) std::sort(key.begin(), key.end());
      weight[key] += ways * choose(plan.sizes[b], left);
      return;
    }
    for (std::size_t c = 0; c <= std::min(left, plan.sizes[b]); ++c) {
      counts[b] = c;
      self(self, b + 1, left - c, ways * choose(plan.sizes[b], c));
    }
  };
  rec(rec, 0, s, BigInt(1));

  const BigInt total = choose(L, s);
  double h = 0.0;
  for (const auto& [key, w] : weight) {
    if (w == 0) continue;
    const double p = Rational(w, total).convert_to<double>();
    h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;
}

}  // namespace pirlab::sparsify
