#pragma once

// Closed-form capacities and costs, all as exact rationals.

#include <cstddef>
#include <utility>

#include "pirlab/error.hpp"
#include "pirlab/rational.hpp"

namespace pirlab::capacity {

namespace detail {

// (1 + r + r^2 + ... + r^(K-1))^-1
inline Rational inverse_geometric(const Rational& ratio, std::size_t K) {
  if (K < 1) throw InvalidArgument("K must be >= 1");
  Rational sum = 0;
  Rational term = 1;
  for (std::size_t i = 0; i < K; ++i) {
    sum += term;
    term *= ratio;
  }
  return 1 / sum;
}

}  // namespace detail

/// Replicated PIR with N non-colluding databases and K messages.
inline Rational c_pir(std::size_t N, std::size_t K) {
  if (N < 1) throw InvalidArgument("N must be >= 1");
  return detail::inverse_geometric(Rational(1, N), K);
}

inline Rational c_spir(std::size_t N) {
  if (N < 2) throw InvalidArgument("SPIR needs N >= 2");
  return 1 - Rational(1, N);
}

/// (N, M) MDS-coded storage.
inline Rational c_coded(std::size_t N, std::size_t K, std::size_t M) {
  if (M < 1 || M > N) throw InvalidArgument("coded PIR needs 1 <= M <= N");
  return detail::inverse_geometric(Rational(M, N), K);
}

/// Any T of the N databases may collude.
inline Rational c_colluding(std::size_t N, std::size_t K, std::size_t T) {
  if (T < 1 || T > N) throw InvalidArgument("colluding PIR needs 1 <= T <= N");
  return detail::inverse_geometric(Rational(T, N), K);
}

/// B Byzantine databases on top of T-collusion.
inline Rational c_byzantine(std::size_t N, std::size_t K, std::size_t T, std::size_t B) {
  if (N <= 2 * B) throw InvalidArgument("Byzantine PIR needs N > 2B");
  if (T < 1) throw InvalidArgument("Byzantine PIR needs T >= 1");
  const std::size_t useful = N - 2 * B;
  return Rational(useful, N) * detail::inverse_geometric(Rational(T, useful), K);
}

/// Retrieve P of K messages at once. P < K/2 with K/P not an integer has no
/// known capacity and throws UncharacterizedRegime.
inline Rational c_mmpir(std::size_t N, std::size_t K, std::size_t P) {
  if (N < 1) throw InvalidArgument("N must be >= 1");
  if (P < 1 || P > K) throw InvalidArgument("multi-message PIR needs 1 <= P <= K");
  const bool large = 2 * P >= K;
  const bool divides = K % P == 0;
  auto first_branch = [&] { return 1 / (1 + Rational(K - P, P * N)); };
  auto second_branch = [&] {
    if (N < 2) throw InvalidArgument("multi-message PIR with P <= K/2 needs N >= 2");
    const Rational inv_n(1, N);
    return (1 - inv_n) / (1 - pow_rational(inv_n, static_cast<unsigned>(K / P)));
  };
  if (large && divides && 2 * P == K) {
    // Both branches apply on the boundary and must agree.
    Rational a = first_branch();
    if (N >= 2 && a != second_branch()) throw Error("multi-message branches disagree at P = K/2");
    return a;
  }
  if (large) return first_branch();
  if (divides) return second_branch();
  throw UncharacterizedRegime();
}

struct ReadWriteCosts {
  Rational reading;
  Rational writing;
};

/// Linear rate-distortion law: C_R = (1 - D_R) C_1, C_W = (1 - D_W) C_2.
inline ReadWriteCosts rd_costs(const Rational& d_read, const Rational& d_write, const Rational& c1, const Rational& c2) {
  if (d_read < 0 || d_read > 1 || d_write < 0 || d_write > 1)
    throw InvalidArgument("distortion budgets must lie in [0, 1]");
  return {(1 - d_read) * c1, (1 - d_write) * c2};
}

}  // namespace pirlab::capacity
