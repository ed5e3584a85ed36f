#include <gtest/gtest.h>

#include <cmath>

#include "ergopt/markov.hpp"
#include "ergopt/potential.hpp"
#include "oracles.hpp"

using namespace ergopt;
using LC = LocallyConstantPotential<Rational>;

namespace {

Eigen::MatrixXd mat(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

CocyclePotential random_cocycle(Rng& rng, std::size_t symbols) {
  std::vector<Eigen::MatrixXd> ms;
  while (ms.size() < symbols) {
    auto m = mat(rng.uniform() * 2 - 1, rng.uniform() * 2 - 1, rng.uniform() * 2 - 1, rng.uniform() * 2 - 1);
    if (std::abs(m.determinant()) > 0.2) ms.push_back(m);
  }
  return CocyclePotential(ms);
}

}  // namespace

TEST(LocallyConstant, TablesMustCoverAllowedBlocksExactly) {
  auto s = golden_mean_shift();
  EXPECT_THROW(LC::from_block_weights(s, 2, {{{0, 0}, Rational(1)}, {{0, 1}, Rational(1)}}), Error);
  try {
    LC::from_block_weights(s, 2, {{{0, 0}, 1}, {{0, 1}, 1}, {{1, 0}, 1}, {{1, 1}, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IncompleteTable);
  }
  EXPECT_THROW(LC::from_symbol_weights(s, {Rational(1)}), Error);
  auto f = LC::from_block_weights(s, 2, {{{0, 0}, 1}, {{0, 1}, 2}, {{1, 0}, 3}});
  EXPECT_EQ(f.weight(Word{1, 0, 1}), Rational(3));
  EXPECT_THROW(f.weight(Word{1, 1}), Error);
  EXPECT_THROW(f.weight(Word{1}), Error);
}

TEST(LocallyConstant, WithRangeAndCombine) {
  Rng rng(2);
  auto s = oracle::random_sft(rng, 3);
  auto f = oracle::random_potential(rng, s, 1);
  auto g = oracle::random_potential(rng, s, 2);
  auto f3 = f.with_range(s, 3);
  for (const Word& w : oracle::words_of_length(s, 6)) {
    if (!oracle::closes(s, w)) continue;
    EXPECT_EQ(birkhoff_sum(f, w), birkhoff_sum(f3, w));
    auto h = combine(s, Rational(2), f, Rational(-1, 3), g);
    EXPECT_EQ(birkhoff_sum(h, w), Rational(2) * birkhoff_sum(f, w) - birkhoff_sum(g, w) / 3);
  }
}

TEST(LocallyConstant, PrefixSums) {
  auto s = full_shift(2);
  auto f = LC::indicator(s, 1);
  auto p = prefix_birkhoff_sums(f, Word{1, 0, 1, 1});
  EXPECT_EQ(p, (std::vector<Rational>{1, 1, 2, 3}));
}

TEST(Approximant, LocallyConstantIsItsOwnApproximant) {
  auto s = golden_mean_shift();
  auto f = LC::indicator(s, 1);
  auto a = approximant(f, 0.5);
  EXPECT_EQ(a.certified_error, 0.0);
  EXPECT_EQ(a.potential.weights(), f.weights());
  EXPECT_THROW(approximant(f, 0.0), Error);
}

TEST(Approximant, ScalarCocycleHasZeroError) {
  auto s = full_shift(2);
  CocyclePotential c({2 * Eigen::MatrixXd::Identity(2, 2), 2 * Eigen::MatrixXd::Identity(2, 2)});
  auto a = approximant(s, c, 0.1);
  EXPECT_NEAR(a.certified_error, 0.0, 1e-12);
  for (double w : a.potential.weights()) EXPECT_NEAR(w, std::log(2.0), 1e-12);
  // Zero error: Birkhoff sums of the approximant equal f_n on every word.
  for (const Word& w : oracle::words_of_length(s, 5))
    EXPECT_NEAR(c.evaluate(w), prefix_birkhoff_sums(a.potential, w).back(), 1e-12);
}

TEST(Approximant, SequenceWithoutFamily) {
  SequencePotential p{[](std::span<const Symbol> w) { return static_cast<double>(w.size()); }, {}};
  try {
    approximant(p, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoApproximantAvailable);
  }
}

TEST(Approximant, SequencePicksSmallestDeclaredXi) {
  auto s = full_shift(2);
  auto ones = LocallyConstantPotential<double>::indicator(s, 1);
  // f_n = number of ones + sin(n): asymptotically additive with xi -> 0.
  SequencePotential p{[](std::span<const Symbol> w) {
                        double c = 0;
                        for (Symbol x : w) c += x;
                        return c + std::sin(static_cast<double>(w.size()));
                      },
                      {{0.5, ones}, {0.05, ones}, {0.2, ones}}};
  EXPECT_EQ(approximant(p, 0.3).certified_error, 0.05);
  EXPECT_THROW(approximant(p, 0.01), Error);
  auto checks = spot_check_additivity(s, p, 200, 20, 3);
  ASSERT_EQ(checks.size(), 3u);
  for (const auto& c : checks) {
    EXPECT_LE(c.worst_observed, 1.0 / 200 + 1e-12);
    EXPECT_TRUE(c.within_bound);
  }
}

TEST(Cocycle, RejectsBadMatrices) {
  EXPECT_THROW(CocyclePotential({mat(1, 1, 1, 1)}), Error);
  EXPECT_THROW(CocyclePotential({Eigen::MatrixXd::Identity(2, 2), Eigen::MatrixXd::Identity(3, 3)}), Error);
  EXPECT_THROW(CocyclePotential({}), Error);
}

TEST(Cocycle, Subadditivity) {
  Rng rng(17);
  auto s = full_shift(2);
  for (int trial = 0; trial < 10; ++trial) {
    auto c = random_cocycle(rng, 2);
    for (const Word& w : oracle::words_of_length(s, 7)) {
      const std::span<const Symbol> all(w);
      for (std::size_t n = 1; n < w.size(); ++n)
        EXPECT_LE(c.evaluate(all), c.evaluate(all.first(n)) + c.evaluate(all.subspan(n)) + 1e-9);
    }
  }
}

TEST(Denominator, BoundIsMinimumWeight) {
  auto s = golden_mean_shift();
  auto g = LC::from_symbol_weights(s, {Rational(3, 2), Rational(1, 4)});
  EXPECT_DOUBLE_EQ(DenominatorBound::of(g).sigma, 0.25);
  EXPECT_NO_THROW(DenominatorBound(0.25).check(g, "G"));
  EXPECT_THROW(DenominatorBound(0.5).check(g, "G"), Error);
  EXPECT_THROW(DenominatorBound(0.0), Error);
}

TEST(MeasureAverage, ExactExamples) {
  auto s = full_shift(2);
  auto bern = bernoulli_chain<Rational>(s, {Rational(1, 2), Rational(1, 2)});
  auto r = measure_average(LC::indicator(s, 1), bern);
  EXPECT_EQ(r.lo, Rational(1, 2));
  EXPECT_EQ(r.hi, Rational(1, 2));
  auto pair11 = LC::from_block_weights(s, 2, {{{0, 0}, 0}, {{0, 1}, 0}, {{1, 0}, 0}, {{1, 1}, 1}});
  EXPECT_EQ(measure_average(pair11, bern).lo, Rational(1, 4));
  // Range beyond the chain's presentation goes through cylinders.
  auto triple = LC::from_block_weights(s, 3, [&] {
    std::map<Word, Rational> t;
    for (const auto& w : allowed_words(s, 3)) t[w] = Rational(w == Word{1, 1, 1} ? 1 : 0);
    return t;
  }());
  EXPECT_EQ(measure_average(triple, bern).lo, Rational(1, 8));
}

TEST(MeasureAverage, LinearAndAffine) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = oracle::random_sft(rng, 3);
    auto f = oracle::random_potential(rng, s, 2);
    auto g = oracle::random_potential(rng, s, 2);
    auto bp = recode_k_blocks(s, 1);
    auto cycles = enumerate_simple_cycles(s, 3);
    auto mu = uniform_cycle_vector<Rational>(s, cycles.front());
    auto nu = uniform_cycle_vector<Rational>(s, cycles.back());
    const Rational t(1, 3);
    auto mix_chain = edge_vector_to_markov(bp, mix(mu, nu, t));
    auto mu_chain = edge_vector_to_markov(bp, mu);
    auto nu_chain = edge_vector_to_markov(bp, nu);
    EXPECT_EQ(measure_average(f, mix_chain).lo,
              t * measure_average(f, mu_chain).lo + (1 - t) * measure_average(f, nu_chain).lo);
    auto h = combine(s, Rational(2), f, Rational(5), g);
    EXPECT_EQ(measure_average(h, mix_chain).lo,
              2 * measure_average(f, mix_chain).lo + 5 * measure_average(g, mix_chain).lo);
  }
}

TEST(MeasureAverage, ScalarCocycle) {
  auto s = full_shift(2);
  CocyclePotential c({2 * Eigen::MatrixXd::Identity(2, 2), 2 * Eigen::MatrixXd::Identity(2, 2)});
  auto bern = bernoulli_chain<double>(s, {0.3, 0.7});
  auto r = measure_average(c, bern);
  EXPECT_NEAR(r.interval.lo, std::log(2.0), 1e-9);
  EXPECT_NEAR(r.interval.hi, std::log(2.0), 1e-9);
  EXPECT_TRUE(r.interval.converged);
}

TEST(MeasureAverage, CocycleUpperBoundsDecrease) {
  Rng rng(21);
  auto s = full_shift(2);
  auto bern = bernoulli_chain<double>(s, {0.5, 0.5});
  for (int trial = 0; trial < 5; ++trial) {
    auto c = random_cocycle(rng, 2);
    CocycleAverageOptions opt;
    opt.max_cylinders = 1u << 10;
    opt.mc_length = 1u << 10;
    auto r = measure_average(c, bern, opt);
    ASSERT_GE(r.doubling_upper.size(), 2u);
    for (std::size_t j = 1; j < r.doubling_upper.size(); ++j)
      EXPECT_LE(r.doubling_upper[j], r.doubling_upper[j - 1] + 1e-12);
    EXPECT_LE(r.interval.lo, r.interval.hi);
    EXPECT_LE(r.certified_lower, r.interval.hi + 1e-12);
  }
}
