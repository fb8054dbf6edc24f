#pragma once

// Injectable randomness. Every protocol draws through RandomSource so the
// same code runs under a seeded generator (simulation) or under an exhaustive
// enumerator that walks every possible outcome (privacy audits).

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "pirlab/error.hpp"

namespace pirlab {

class RandomSource {
 public:
  virtual ~RandomSource() = default;
  /// Uniform integer in [0, bound). bound must be >= 1.
  virtual std::uint64_t draw(std::uint64_t bound) = 0;
};

/// Stable 64-bit hash used to split one user seed into independent streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::uint64_t z = seed ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27U)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31U);
}

/// mt19937_64 with rejection sampling. The engine's output sequence is fixed
/// by the standard, so draws are reproducible across platforms.
class SeededSource final : public RandomSource {
 public:
  explicit SeededSource(std::uint64_t seed) : engine_(seed) {}
  SeededSource(std::uint64_t seed, std::string_view label) : engine_(derive_seed(seed, label)) {}

  std::uint64_t draw(std::uint64_t bound) override {
    if (bound == 0) throw InvalidArgument("draw bound must be positive");
    if (bound == 1) return 0;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x = 0;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
};

/// Walks the full tree of draw outcomes, one path per run. Use as
///
///   ExhaustiveSource src;
///   do { run(src); } while (src.next());
///
/// Bounds may depend on earlier outcomes. probability() is the exact weight
/// of the current path.
class ExhaustiveSource final : public RandomSource {
 public:
  ExhaustiveSource() = default;
  /// Pins the first draws to `prefix`; only the remaining positions vary.
  explicit ExhaustiveSource(std::vector<std::uint64_t> prefix)
      : digits_(std::move(prefix)), bounds_(digits_.size(), 0), fixed_(digits_.size()) {}

  std::uint64_t draw(std::uint64_t bound) override {
    if (bound == 0) throw InvalidArgument("draw bound must be positive");
    if (pos_ < digits_.size()) {
      if (bounds_[pos_] == 0) {
        if (digits_[pos_] >= bound) throw InvalidArgument("enumeration prefix out of range");
        bounds_[pos_] = bound;
      } else if (bounds_[pos_] != bound) {
        throw InvalidArgument("draw bounds changed on replay of the same path");
      }
      return digits_[pos_++];
    }
    digits_.push_back(0);
    bounds_.push_back(bound);
    ++pos_;
    return 0;
  }

  /// Advances to the next path. Returns false once every path was visited.
  bool next() {
    digits_.resize(std::max(pos_, fixed_));
    bounds_.resize(digits_.size());
    pos_ = 0;
    while (digits_.size() > fixed_ && digits_.back() + 1 >= bounds_.back()) {
      digits_.pop_back();
      bounds_.pop_back();
    }
    if (digits_.size() == fixed_) return false;
    ++digits_.back();
    return true;
  }

  /// Denominator of the current path's probability (product of bounds drawn).
  boost::multiprecision::cpp_int path_denominator() const {
    boost::multiprecision::cpp_int d = 1;
    for (std::size_t i = 0; i < pos_; ++i) d *= bounds_[i];
    return d;
  }

  std::size_t depth() const { return pos_; }
  /// Bound of the i-th draw on the current path.
  std::uint64_t bound_at(std::size_t i) const { return bounds_.at(i); }

 private:
  std::vector<std::uint64_t> digits_;
  std::vector<std::uint64_t> bounds_;
  std::size_t fixed_ = 0;
  std::size_t pos_ = 0;
};

/// A uniformly random injective map on [0, size) whose images are drawn only
/// when first requested. The requested images are distributed exactly as the
/// corresponding values of a uniform permutation, so enumerating it only
/// touches the positions a protocol actually uses.
class LazyPermutation {
 public:
  explicit LazyPermutation(std::size_t size) : size_(size), taken_(size, false) {}

  std::size_t operator()(std::size_t position, RandomSource& source) {
    if (position >= size_) throw InvalidArgument("permutation position out of range");
    if (auto it = images_.find(position); it != images_.end()) return it->second;
    std::uint64_t rank = source.draw(size_ - images_.size());
    std::size_t image = 0;
    for (;; ++image) {
      if (taken_[image]) continue;
      if (rank == 0) break;
      --rank;
    }
    taken_[image] = true;
    images_.emplace(position, image);
    return image;
  }

  std::size_t size() const { return size_; }

 private:
  std::size_t size_;
  std::vector<bool> taken_;
  std::unordered_map<std::size_t, std::size_t> images_;
};

/// Fisher-Yates over [0, n).
inline std::vector<std::size_t> random_permutation(std::size_t n, RandomSource& source) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto j = i + static_cast<std::size_t>(source.draw(n - i));
    std::swap(p[i], p[j]);
  }
  return p;
}

}  // namespace pirlab
