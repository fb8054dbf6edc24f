#pragma once

// Reference computations for the tests. They work on plain integers and
// boost rationals and never call into the library under test.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

/// Modular inverse by exhaustive search; q must be small.
inline std::uint64_t brute_inverse(std::uint64_t a, std::uint64_t q) {
  for (std::uint64_t x = 1; x < q; ++x)
    if ((a % q) * x % q == 1) return x;
  return 0;
}

inline std::uint64_t mod(std::int64_t v, std::uint64_t q) {
  const auto m = static_cast<std::int64_t>(q);
  return static_cast<std::uint64_t>(((v % m) + m) % m);
}

/// Every x in F_q^n with A x = b, by trying all q^n vectors.
inline std::vector<std::vector<std::uint64_t>> brute_solutions(const std::vector<std::vector<std::uint64_t>>& a,
                                                               const std::vector<std::uint64_t>& b, std::uint64_t q) {
  const std::size_t n = a.front().size();
  std::vector<std::vector<std::uint64_t>> found;
  std::vector<std::uint64_t> x(n, 0);
  while (true) {
    bool ok = true;
    for (std::size_t r = 0; r < a.size() && ok; ++r) {
      std::uint64_t acc = 0;
      for (std::size_t c = 0; c < n; ++c) acc = (acc + a[r][c] * x[c]) % q;
      ok = acc == b[r] % q;
    }
    if (ok) found.push_back(x);
    std::size_t i = 0;
    while (i < n && ++x[i] == q) x[i++] = 0;
    if (i == n) break;
  }
  return found;
}

/// Newton divided differences evaluated at x; small q only.
inline std::uint64_t newton_at(const std::vector<std::uint64_t>& xs, const std::vector<std::uint64_t>& ys,
                               std::uint64_t x, std::uint64_t q) {
  std::vector<std::uint64_t> c = ys;
  const std::size_t n = xs.size();
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = n - 1; i >= j; --i) {
      const std::uint64_t num = (c[i] + q - c[i - 1]) % q;
      const std::uint64_t den = (xs[i] + q - xs[i - j]) % q;
      c[i] = num * brute_inverse(den, q) % q;
    }
  std::uint64_t acc = c[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) acc = (acc * ((x + q - xs[i]) % q) + c[i]) % q;
  return acc;
}

/// (1 - 1/N) / (1 - 1/N^K), or 1/K for a single database.
inline Rat pir_capacity(std::uint64_t N, std::uint64_t K) {
  if (N == 1) return Rat(1, K);
  Int nk = 1;
  for (std::uint64_t i = 0; i < K; ++i) nk *= N;
  return (Rat(1) - Rat(1, N)) / (Rat(1) - Rat(Int(1), nk));
}

/// Leakage entropy in bits by listing every s-subset of L positions as a
/// bitmask. Segments: B - 1 of size floor(L/B), the last takes the rest.
inline double bitmask_leakage(unsigned L, unsigned B, unsigned s, bool two_stage) {
  std::vector<unsigned> bounds;
  for (unsigned b = 1; b < B; ++b) bounds.push_back(b * (L / B));
  bounds.push_back(L);
  std::map<std::vector<unsigned>, std::uint64_t> hist;
  std::uint64_t total = 0;
  for (std::uint32_t mask = 0; mask < (1U << L); ++mask) {
    if (static_cast<unsigned>(std::popcount(mask)) != s) continue;
    std::vector<unsigned> counts(B, 0);
    for (unsigned pos = 0; pos < L; ++pos) {
      if (!(mask >> pos & 1U)) continue;
      unsigned b = 0;
      while (pos >= bounds[b]) ++b;
      ++counts[b];
    }
    if (two_stage) std::sort(counts.begin(), counts.end());
    ++hist[counts];
    ++total;
  }
  double h = 0;
  for (const auto& [k, c] : hist) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

/// Total variation between two equally weighted samples listed outcome by
/// outcome (every listed outcome has the same probability within its list).
inline Rat tv_of_lists(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::string, Rat> pa;
  std::map<std::string, Rat> pb;
  for (const auto& s : a) pa[s] += Rat(1, a.size());
  for (const auto& s : b) pb[s] += Rat(1, b.size());
  Rat sum = 0;
  for (const auto& [k, p] : pa) {
    const Rat d = p - (pb.count(k) ? pb[k] : Rat(0));
    sum += d < 0 ? Rat(-d) : d;
  }
  for (const auto& [k, p] : pb)
    if (!pa.count(k)) sum += p;
  return sum / 2;
}

/// Query vectors of the dummy-index scheme for every key, straight from the
/// construction: coordinates copy the key except theta, which makes the sum
/// n - 1 modulo N. Rendered as digit strings.
inline std::vector<std::string> tian_queries_for_db(unsigned N, unsigned K, unsigned theta, unsigned n) {
  std::vector<std::string> out;
  unsigned keys = 1;
  for (unsigned i = 1; i < K; ++i) keys *= N;
  for (unsigned code = 0; code < keys; ++code) {
    std::vector<unsigned> key;
    unsigned c = code;
    unsigned sum = 0;
    for (unsigned i = 1; i < K; ++i) {
      key.push_back(c % N);
      sum += c % N;
      c /= N;
    }
    std::string q;
    unsigned f = 0;
    for (unsigned k = 1; k <= K; ++k) {
      const unsigned v = k == theta ? static_cast<unsigned>(mod(static_cast<std::int64_t>(n - 1) - sum, N)) : key[f++];
      q += std::to_string(v);
    }
    out.push_back(q);
  }
  return out;
}

}  // namespace oracle
