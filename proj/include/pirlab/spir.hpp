#pragma once

// Symmetric PIR: the residual and tian schemes with every answer masked by a
// server-side common randomness symbol S. Differences of answers cancel S, so
// decoding is unchanged while each individual answer becomes a one-time pad of
// everything the user is not entitled to.

#include <cstddef>
#include <optional>
#include <vector>

#include "pirlab/databank.hpp"
#include "pirlab/pir.hpp"

namespace pirlab {

/// One fresh pool symbol per subpacket round. Throws PoolExhausted when the
/// pool cannot cover L / (N - 1) rounds.
inline RoundResult spir_round_deterministic(std::vector<DatabaseState>& dbs, std::size_t theta,
                                            CommonRandomnessPool& pool, RandomSource& source) {
  if (dbs.size() < 2) throw InvalidArgument("SPIR needs N >= 2");
  const MessageStore& meta = dbs.front().store();
  if (meta.L() % (dbs.size() - 1) == 0 && pool.remaining() < meta.L() / (dbs.size() - 1)) throw PoolExhausted();
  return detail::residual_round_impl(dbs, theta, source, "spir-det", &pool);
}

inline RoundResult spir_round_probabilistic(std::vector<DatabaseState>& dbs, std::size_t theta,
                                            CommonRandomnessPool& pool, std::vector<std::size_t> key) {
  return detail::tian_round_impl(dbs, theta, std::move(key), "spir-prob", &pool);
}

/// Exactly what the user sees of a round: for every database in order, its
/// answers or nullopt when it was not contacted.
struct UserView {
  std::vector<std::optional<SymbolVector>> answers;

  friend bool operator==(const UserView&, const UserView&) = default;
};

inline UserView spir_user_view(const SchemeTranscript& t) {
  UserView v;
  for (const auto& ex : t.per_db) {
    if (ex.answers.empty()) {
      v.answers.push_back(std::nullopt);
      continue;
    }
    SymbolVector all;
    for (const auto& a : ex.answers) all.insert(all.end(), a.begin(), a.end());
    v.answers.push_back(std::move(all));
  }
  return v;
}

}  // namespace pirlab
