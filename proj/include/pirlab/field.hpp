#pragma once

// Exact arithmetic over a prime field F_q, q < 2^61.

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pirlab/error.hpp"
#include "pirlab/random.hpp"

namespace pirlab {

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp != 0) {
    if (exp & 1U) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

// Deterministic Miller-Rabin; these witnesses cover every n < 2^64.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

}  // namespace detail

class FieldElement;

/// The prime field F_q. Cheap to copy; two specs are the same field iff
/// their moduli are equal.
class PrimeField {
 public:
  static constexpr std::uint64_t kMaxModulus = std::uint64_t{1} << 61;

  explicit PrimeField(std::uint64_t q) : q_(q) {
    if (q >= kMaxModulus) throw InvalidArgument("field modulus must be below 2^61");
    if (!detail::is_prime(q)) throw InvalidArgument("field modulus " + std::to_string(q) + " is not prime");
  }

  struct Unchecked {};
  // Skips the primality test; only for moduli taken from existing elements.
  PrimeField(std::uint64_t q, Unchecked) : q_(q) {}

  std::uint64_t modulus() const { return q_; }

  /// ceil(log2 q): information-theoretic width of one symbol.
  unsigned bits_per_symbol() const {
    unsigned bits = 0;
    while ((std::uint64_t{1} << bits) < q_) ++bits;
    return bits;
  }

  FieldElement element(std::int64_t value) const;
  FieldElement zero() const;
  FieldElement one() const;

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint64_t q_;
};

class FieldElement {
 public:
  FieldElement(std::uint64_t value, const PrimeField& field) : value_(value % field.modulus()), q_(field.modulus()) {}

  std::uint64_t value() const { return value_; }
  std::uint64_t modulus() const { return q_; }
  PrimeField field() const { return PrimeField(q_, PrimeField::Unchecked{}); }
  bool is_zero() const { return value_ == 0; }

  FieldElement operator+(const FieldElement& o) const {
    check(o);
    std::uint64_t s = value_ + o.value_;
    return raw(s >= q_ ? s - q_ : s);
  }
  FieldElement operator-(const FieldElement& o) const {
    check(o);
    return raw(value_ >= o.value_ ? value_ - o.value_ : value_ + q_ - o.value_);
  }
  FieldElement operator-() const { return raw(value_ == 0 ? 0 : q_ - value_); }
  FieldElement operator*(const FieldElement& o) const {
    check(o);
    return raw(detail::mulmod(value_, o.value_, q_));
  }
  FieldElement operator/(const FieldElement& o) const { return *this * o.inv(); }

  FieldElement& operator+=(const FieldElement& o) { return *this = *this + o; }
  FieldElement& operator-=(const FieldElement& o) { return *this = *this - o; }
  FieldElement& operator*=(const FieldElement& o) { return *this = *this * o; }

  /// Multiplicative inverse via Fermat; throws NonInvertible on zero.
  FieldElement inv() const {
    if (value_ == 0) throw NonInvertible();
    return raw(detail::powmod(value_, q_ - 2, q_));
  }

  FieldElement pow(std::uint64_t exponent) const { return raw(detail::powmod(value_, exponent, q_)); }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.q_ == b.q_ && a.value_ == b.value_;
  }

  friend std::ostream& operator<<(std::ostream& os, const FieldElement& e) { return os << e.value_; }

 private:
  friend class PrimeField;
  FieldElement(std::uint64_t value, std::uint64_t q, int) : value_(value), q_(q) {}
  FieldElement raw(std::uint64_t v) const { return FieldElement(v, q_, 0); }
  void check(const FieldElement& o) const {
    if (o.q_ != q_) throw FieldMismatch();
  }

  std::uint64_t value_;
  std::uint64_t q_;
};

inline FieldElement PrimeField::element(std::int64_t value) const {
  const auto q = static_cast<std::int64_t>(q_);
  std::int64_t r = value % q;
  if (r < 0) r += q;
  return FieldElement(static_cast<std::uint64_t>(r), q_, 0);
}
inline FieldElement PrimeField::zero() const { return FieldElement(0, q_, 0); }
inline FieldElement PrimeField::one() const { return FieldElement(1 % q_, q_, 0); }

using SymbolVector = std::vector<FieldElement>;

inline FieldElement add(const FieldElement& a, const FieldElement& b) { return a + b; }
inline FieldElement inv(const FieldElement& a) { return a.inv(); }

/// Uniform element of F_q drawn from `source`.
inline FieldElement sample_uniform(const PrimeField& field, RandomSource& source) {
  return field.element(static_cast<std::int64_t>(source.draw(field.modulus())));
}

inline SymbolVector sample_vector(const PrimeField& field, std::size_t length, RandomSource& source) {
  SymbolVector out;
  out.reserve(length);
  for (std::size_t i = 0; i < length; ++i) out.push_back(sample_uniform(field, source));
  return out;
}

inline SymbolVector zeros(const PrimeField& field, std::size_t length) { return SymbolVector(length, field.zero()); }

inline FieldElement dot(std::span<const FieldElement> a, std::span<const FieldElement> b) {
  if (a.size() != b.size() || a.empty()) throw InvalidArgument("dot product of mismatched or empty vectors");
  FieldElement acc = a[0] * b[0];
  for (std::size_t i = 1; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

/// Dense row-major matrix over one field.
class FieldMatrix {
 public:
  FieldMatrix(std::size_t rows, std::size_t cols, const PrimeField& field)
      : rows_(rows), cols_(cols), data_(rows * cols, field.zero()) {}

  static FieldMatrix identity(std::size_t n, const PrimeField& field) {
    FieldMatrix m(n, n, field);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = field.one();
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  FieldElement& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const FieldElement& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const FieldElement> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  SymbolVector operator*(std::span<const FieldElement> x) const {
    if (x.size() != cols_) throw InvalidArgument("matrix-vector dimension mismatch");
    SymbolVector out;
    out.reserve(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out.push_back(dot(row(r), x));
    return out;
  }

  SymbolVector column(std::size_t c) const {
    SymbolVector out;
    out.reserve(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out.push_back((*this)(r, c));
    return out;
  }

  friend bool operator==(const FieldMatrix&, const FieldMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<FieldElement> data_;
};

/// Solves A x = b by Gauss-Jordan elimination with first-nonzero pivoting.
inline SymbolVector solve_linear(FieldMatrix a, SymbolVector b) {
  const std::size_t n = a.rows();
  if (a.cols() != n) throw InvalidArgument("solve_linear needs a square matrix");
  if (b.size() != n) throw InvalidArgument("right-hand side length mismatch");
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a(pivot, col).is_zero()) ++pivot;
    if (pivot == n) throw SingularMatrix();
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a(pivot, c), a(col, c));
      std::swap(b[pivot], b[col]);
    }
    const FieldElement scale = a(col, col).inv();
    for (std::size_t c = col; c < n; ++c) a(col, c) *= scale;
    b[col] *= scale;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a(r, col).is_zero()) continue;
      const FieldElement factor = a(r, col);
      for (std::size_t c = col; c < n; ++c) a(r, c) -= factor * a(col, c);
      b[r] -= factor * b[col];
    }
  }
  return b;
}

/// Value at `x` of the unique polynomial of degree < xs.size() through
/// (xs[i], ys[i]). Points must be distinct.
inline FieldElement interpolate_at(std::span<const FieldElement> xs, std::span<const FieldElement> ys,
                                   const FieldElement& x) {
  if (xs.size() != ys.size() || xs.empty()) throw InvalidArgument("interpolation needs matching non-empty inputs");
  FieldElement acc = x.field().zero();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    FieldElement num = ys[i];
    FieldElement den = x.field().one();
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (j == i) continue;
      num *= x - xs[j];
      den *= xs[i] - xs[j];
    }
    acc += num / den;
  }
  return acc;
}

}  // namespace pirlab
