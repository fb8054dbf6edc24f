#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pirlab/field.hpp"
#include "pirlab/rational.hpp"

using namespace pirlab;

TEST(PrimeField, RejectsCompositeAndOversizedModuli) {
  EXPECT_THROW(PrimeField(1), InvalidArgument);
  EXPECT_THROW(PrimeField(9), InvalidArgument);
  EXPECT_THROW(PrimeField(561), InvalidArgument);  // Carmichael
  EXPECT_THROW(PrimeField(std::uint64_t{1} << 61), InvalidArgument);
  EXPECT_NO_THROW(PrimeField((std::uint64_t{1} << 61) - 1));
  EXPECT_NO_THROW(PrimeField(2));
}

TEST(PrimeField, BitsPerSymbol) {
  EXPECT_EQ(PrimeField(2).bits_per_symbol(), 1U);
  EXPECT_EQ(PrimeField(3).bits_per_symbol(), 2U);
  EXPECT_EQ(PrimeField(97).bits_per_symbol(), 7U);
}

TEST(FieldElement, ArithmeticMatchesIntegerReference) {
  for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 13ULL}) {
    const PrimeField f(q);
    for (std::uint64_t a = 0; a < q; ++a)
      for (std::uint64_t b = 0; b < q; ++b) {
        EXPECT_EQ((f.element(a) + f.element(b)).value(), (a + b) % q);
        EXPECT_EQ((f.element(a) - f.element(b)).value(), (a + q - b) % q);
        EXPECT_EQ((f.element(a) * f.element(b)).value(), a * b % q);
      }
  }
}

TEST(FieldElement, InverseAgreesWithBruteForce) {
  for (std::uint64_t q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 97ULL}) {
    const PrimeField f(q);
    for (std::uint64_t a = 1; a < q; ++a) EXPECT_EQ(f.element(a).inv().value(), oracle::brute_inverse(a, q)) << q;
  }
}

TEST(FieldElement, ZeroHasNoInverse) {
  const PrimeField f(7);
  EXPECT_THROW(f.zero().inv(), NonInvertible);
  EXPECT_THROW(f.one() / f.zero(), NonInvertible);
}

TEST(FieldElement, MixingFieldsThrows) {
  const PrimeField a(5);
  const PrimeField b(7);
  EXPECT_THROW(a.one() + b.one(), FieldMismatch);
  EXPECT_THROW(a.one() * b.one(), FieldMismatch);
}

TEST(FieldElement, LargeModulusDoesNotOverflow) {
  const PrimeField f((std::uint64_t{1} << 61) - 1);
  const auto x = f.element(static_cast<std::int64_t>((std::uint64_t{1} << 61) - 2));  // -1
  EXPECT_EQ((x * x).value(), 1U);
  EXPECT_EQ((x * x.inv()).value(), 1U);
}

TEST(FieldElement, NegativeLiteralsReduce) {
  const PrimeField f(5);
  EXPECT_EQ(f.element(-1).value(), 4U);
  EXPECT_EQ(f.element(-10).value(), 0U);
}

TEST(SolveLinear, MatchesUniqueBruteForceSolution) {
  const std::uint64_t q = 5;
  const PrimeField f(q);
  const std::vector<std::vector<std::uint64_t>> a = {{1, 2, 0}, {0, 1, 4}, {3, 0, 2}};
  const std::vector<std::uint64_t> b = {3, 1, 2};
  const auto ref = oracle::brute_solutions(a, b, q);
  ASSERT_EQ(ref.size(), 1U);
  FieldMatrix m(3, 3, f);
  SymbolVector rhs;
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) m(r, c) = f.element(static_cast<std::int64_t>(a[r][c]));
    rhs.push_back(f.element(static_cast<std::int64_t>(b[r])));
  }
  const auto x = solve_linear(m, rhs);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(x[i].value(), ref[0][i]);
}

TEST(SolveLinear, NeedsPivoting) {
  const PrimeField f(7);
  FieldMatrix m(2, 2, f);
  m(0, 1) = f.one();
  m(1, 0) = f.one();
  const auto x = solve_linear(m, {f.element(3), f.element(4)});
  EXPECT_EQ(x[0].value(), 4U);
  EXPECT_EQ(x[1].value(), 3U);
}

TEST(SolveLinear, SingularThrows) {
  const PrimeField f(3);
  FieldMatrix m(2, 2, f);
  m(0, 0) = f.one();
  m(0, 1) = f.element(2);
  m(1, 0) = f.element(2);
  m(1, 1) = f.one();  // row 2 = 2 * row 1 mod 3
  EXPECT_THROW(solve_linear(m, {f.one(), f.one()}), SingularMatrix);
}

TEST(Interpolate, AgreesWithNewtonForm) {
  const std::uint64_t q = 13;
  const PrimeField f(q);
  SeededSource src(3, "interp");
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint64_t> xs = {1, 4, 6, 9};
    std::vector<std::uint64_t> ys;
    SymbolVector fx;
    SymbolVector fy;
    for (auto x : xs) {
      ys.push_back(src.draw(q));
      fx.push_back(f.element(static_cast<std::int64_t>(x)));
      fy.push_back(f.element(static_cast<std::int64_t>(ys.back())));
    }
    for (std::uint64_t at = 0; at < q; ++at)
      EXPECT_EQ(interpolate_at(fx, fy, f.element(static_cast<std::int64_t>(at))).value(), oracle::newton_at(xs, ys, at, q));
  }
}

TEST(Interpolate, ThroughNodesReturnsTheirValues) {
  const PrimeField f(11);
  const SymbolVector xs = {f.element(2), f.element(3), f.element(5)};
  const SymbolVector ys = {f.element(7), f.element(1), f.element(0)};
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(interpolate_at(xs, ys, xs[i]), ys[i]);
}

TEST(Sampling, SeededDrawsAreReproducible) {
  const PrimeField f(97);
  SeededSource a(42, "x");
  SeededSource b(42, "x");
  SeededSource c(42, "y");
  const auto va = sample_vector(f, 20, a);
  EXPECT_EQ(va, sample_vector(f, 20, b));
  EXPECT_NE(va, sample_vector(f, 20, c));
}

TEST(ExhaustiveSource, VisitsEveryPathOnceWithExactWeights) {
  ExhaustiveSource src;
  std::map<std::pair<std::uint64_t, std::uint64_t>, Rational> seen;
  do {
    const auto a = src.draw(3);
    const auto b = a == 0 ? 0 : src.draw(a + 1);  // bound depends on the first draw
    seen[{a, b}] += Rational(BigInt(1), src.path_denominator());
  } while (src.next());
  EXPECT_EQ(seen.size(), 1U + 2U + 3U);
  Rational total = 0;
  for (const auto& [k, p] : seen) total += p;
  EXPECT_EQ(total, 1);
  EXPECT_EQ((seen[{2, 1}]), Rational(1, 9));
}

TEST(LazyPermutation, ImagesAreDistinctAndUniform) {
  std::map<std::pair<std::size_t, std::size_t>, Rational> law;
  ExhaustiveSource src;
  do {
    LazyPermutation p(4);
    const auto x = p(2, src);
    const auto y = p(0, src);
    ASSERT_NE(x, y);
    law[{x, y}] += Rational(BigInt(1), src.path_denominator());
  } while (src.next());
  EXPECT_EQ(law.size(), 12U);
  for (const auto& [k, p] : law) EXPECT_EQ(p, Rational(1, 12));
}

TEST(Rational, ParsesDecimalsExactly) {
  EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
  EXPECT_EQ(parse_rational("010/40"), Rational(1, 4));
  EXPECT_EQ(parse_rational("-3"), Rational(-3));
  EXPECT_EQ(parse_rational("1.50"), Rational(3, 2));
  EXPECT_THROW(parse_rational("0x10"), InvalidArgument);
  EXPECT_THROW(parse_rational("1/0"), InvalidArgument);
  EXPECT_THROW(parse_rational(""), InvalidArgument);
  EXPECT_EQ(to_string(Rational(4, 7)), "4/7");
  EXPECT_EQ(to_string(Rational(0)), "0/1");
  EXPECT_EQ(to_decimal(Rational(2, 3)), "0.666667");
}
