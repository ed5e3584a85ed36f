#include <gtest/gtest.h>

#include <cmath>

#include "ergopt/optimizers.hpp"
#include "ergopt/orbit.hpp"
#include "oracles.hpp"

using namespace ergopt;
using LC = LocallyConstantPotential<Rational>;

namespace {

struct GoldenMean {
  Sft sft = golden_mean_shift();
  LC one = LC::indicator(sft, 1);
  LC zero = LC::indicator(sft, 0);
};

}  // namespace

TEST(Beta, Examples) {
  GoldenMean gm;
  auto b = max_ergodic_average(gm.sft, gm.one);
  EXPECT_EQ(b.value, Rational(1, 2));
  EXPECT_EQ(b.witness, Cycle(Word{0, 1}));
  auto full = full_shift(2);
  auto x0 = LC::indicator(full, 1);
  auto bf = max_ergodic_average(full, x0);
  EXPECT_EQ(bf.value, 1);
  EXPECT_EQ(bf.witness, Cycle(Word{1}));
}

TEST(Beta, ScalarCocycleIsExact) {
  auto full = full_shift(2);
  CocyclePotential c({2 * Eigen::MatrixXd::Identity(2, 2), 2 * Eigen::MatrixXd::Identity(2, 2)});
  auto r = cocycle_extremal_average(full, c, Sense::Maximize);
  EXPECT_TRUE(r.diagonal_exact);
  EXPECT_NEAR(r.interval.lo, std::log(2.0), 1e-12);
  EXPECT_NEAR(r.interval.hi, std::log(2.0), 1e-12);
}

TEST(Eta, Examples) {
  GoldenMean gm;
  EXPECT_EQ(min_ergodic_average(gm.sft, gm.one).value, 0);
  EXPECT_EQ(min_ergodic_average(gm.sft, gm.one).witness, Cycle(Word{0}));
  EXPECT_EQ(min_ergodic_average(full_shift(2), LC::indicator(full_shift(2), 1)).value, 0);
  EXPECT_EQ(min_ergodic_average(gm.sft, gm.zero).value, Rational(1, 2));
}

TEST(Beta, GraphLpAndCycleOracleAgree) {
  Rng rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    auto s = oracle::random_sft(rng, 2 + trial % 3);
    const std::size_t range = 1 + trial % 3;
    auto f = oracle::random_potential(rng, s, range);
    const std::size_t len = oracle::exhaustive_length(s, range);
    auto hi = max_ergodic_average(s, f);
    auto lo = min_ergodic_average(s, f);
    EXPECT_EQ(hi.graph_value, hi.lp_value);
    EXPECT_EQ(hi.value, oracle::periodic_extremum(s, f, len, true)) << "trial " << trial;
    EXPECT_EQ(lo.value, oracle::periodic_extremum(s, f, len, false)) << "trial " << trial;
    EXPECT_EQ(oracle::periodic_sum(f, hi.witness.symbols()) / Rational(static_cast<long>(hi.witness.length())), hi.value);
    auto hd = max_ergodic_average(s, f.cast<double>());
    EXPECT_NEAR(hd.value, to_double(hi.value), 1e-9);
  }
}

TEST(Beta, ApproximantIntervals) {
  auto full = full_shift(2);
  auto ones = LocallyConstantPotential<double>::indicator(full, 1);
  SequencePotential p{[](std::span<const Symbol> w) {
                        double c = 0;
                        for (Symbol x : w) c += x;
                        return c + 0.5;
                      },
                      {{0.1, ones}}};
  auto a = approximant(p, 0.2);
  auto r = extremal_average_interval(full, a, Sense::Maximize);
  EXPECT_NEAR(r.lo, 0.9, 1e-12);
  EXPECT_NEAR(r.hi, 1.1, 1e-12);
  EXPECT_TRUE(r.contains(1.0));
  auto lam = conditional_max_interval(full, a, ones, 0.3);
  EXPECT_TRUE(lam.contains(0.3));
  EXPECT_NEAR(lam.width(), 0.2, 1e-12);
}

TEST(Conditional, Examples) {
  auto full = full_shift(2);
  auto x0 = LC::indicator(full, 1);
  EXPECT_EQ(conditional_max(full, x0, x0, Rational(3, 10)).value, Rational(3, 10));
  GoldenMean gm;
  auto r = conditional_max(gm.sft, gm.one, gm.zero, Rational(3, 4));
  EXPECT_EQ(r.value, Rational(1, 4));
  EXPECT_FALSE(r.clamped);
  try {
    conditional_max(gm.sft, gm.one, gm.zero, Rational(1, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Infeasible);
  }
}

TEST(Conditional, UniqueMaximizerAtBetaPhi) {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = oracle::random_sft(rng, 3);
    auto f = oracle::random_potential(rng, s, 1);
    auto phi = oracle::random_potential(rng, s, 1);
    auto stats = oracle::cycle_stats(s, f, phi);
    Rational top = stats.front().phi_mean;
    for (const auto& c : stats) top = std::max(top, c.phi_mean);
    std::vector<const oracle::CycleStats*> at_top;
    for (const auto& c : stats)
      if (c.phi_mean == top) at_top.push_back(&c);
    auto r = conditional_max(s, f, phi, top);
    Rational best = at_top.front()->f_mean;
    for (auto* c : at_top) best = std::max(best, c->f_mean);
    EXPECT_EQ(r.value, best) << "trial " << trial;
    auto low = min_ergodic_average(s, phi).value;
    Rational best_low(-1000);
    for (const auto& c : stats)
      if (c.phi_mean == low) best_low = std::max(best_low, c.f_mean);
    EXPECT_EQ(conditional_max(s, f, phi, low).value, best_low);
  }
}

TEST(Conditional, MatchesTwoCycleMixtures) {
  Rng rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    auto s = oracle::random_sft(rng, 2 + trial % 3);
    auto f = oracle::random_potential(rng, s, 1);
    auto phi = oracle::random_potential(rng, s, 1);
    auto eta = min_ergodic_average(s, phi).value;
    auto beta = max_ergodic_average(s, phi).value;
    for (int i = 0; i <= 4; ++i) {
      const Rational alpha = eta + (beta - eta) * Rational(i, 4);
      auto oracle_value = oracle::two_cycle_mixture_max(s, f, phi, alpha);
      ASSERT_TRUE(oracle_value.has_value());
      EXPECT_EQ(conditional_max(s, f, phi, alpha).value, *oracle_value) << "trial " << trial << " i " << i;
    }
  }
}

TEST(Spectrum, IdentityOnFullShift) {
  auto full = full_shift(2);
  auto x0 = LC::indicator(full, 1);
  auto r = spectrum(full, x0, x0, 5);
  EXPECT_EQ(r.alpha1, 1);
  EXPECT_EQ(r.alpha2, 1);
  for (const auto& p : r.grid) EXPECT_EQ(p.lambda, p.alpha);
}

TEST(Spectrum, GoldenMeanDecreasing) {
  GoldenMean gm;
  auto r = spectrum(gm.sft, gm.one, gm.zero, 9);
  EXPECT_EQ(r.eta, Rational(1, 2));
  EXPECT_EQ(r.beta_phi, 1);
  EXPECT_EQ(r.alpha1, Rational(1, 2));
  EXPECT_EQ(r.alpha2, Rational(1, 2));
  for (const auto& p : r.grid) EXPECT_EQ(p.lambda, 1 - p.alpha);
  EXPECT_EQ(r.max_adjacent_jump, Rational(1, 16));
  EXPECT_THROW(spectrum(gm.sft, gm.one, gm.zero, 2), Error);
}

TEST(Spectrum, ZeroObjectiveIsFlat) {
  auto full = full_shift(2);
  auto r = spectrum(full, LC::constant(full, 0), LC::indicator(full, 0), 3);
  ASSERT_EQ(r.grid.size(), 3u);
  for (const auto& p : r.grid) EXPECT_EQ(p.lambda, 0);
  EXPECT_EQ(r.alpha1, r.eta);
  EXPECT_EQ(r.alpha2, r.beta_phi);
}

TEST(Spectrum, UnimodalAndFlatTopOnRandomInstances) {
  Rng rng(47);
  for (int trial = 0; trial < 15; ++trial) {
    auto s = oracle::random_sft(rng, 3 + trial % 2);
    auto f = oracle::random_potential(rng, s, 1 + trial % 2);
    auto phi = oracle::random_potential(rng, s, 1);
    auto r = spectrum(s, f, phi, 9);
    for (std::size_t i = 0; i + 2 < r.grid.size(); ++i) {
      const auto &a = r.grid[i], &b = r.grid[i + 1], &c = r.grid[i + 2];
      if (c.alpha <= r.alpha1) {
        EXPECT_LE(a.lambda, b.lambda);
        EXPECT_LE(b.lambda, c.lambda);
      }
      if (a.alpha >= r.alpha2) {
        EXPECT_GE(a.lambda, b.lambda);
        EXPECT_GE(b.lambda, c.lambda);
      }
    }
    EXPECT_EQ(conditional_max(s, f, phi, r.alpha1).value, r.beta_f);
    EXPECT_EQ(conditional_max(s, f, phi, r.alpha2).value, r.beta_f);
    EXPECT_EQ(conditional_max(s, f, phi, (r.alpha1 + r.alpha2) / 2).value, r.beta_f);
  }
}

TEST(Spectrum, JumpShrinksUnderRefinement) {
  GoldenMean gm;
  auto coarse = spectrum(gm.sft, gm.one, gm.zero, 5);
  auto fine = spectrum(gm.sft, gm.one, gm.zero, 9);
  EXPECT_EQ(fine.max_adjacent_jump * 2, coarse.max_adjacent_jump);
}

TEST(Scaling, ValuesScaleAndWitnessesStay) {
  Rng rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = oracle::random_sft(rng, 3);
    auto f = oracle::random_potential(rng, s, 1);
    auto phi = oracle::random_potential(rng, s, 1);
    const Rational c(7, 3);
    auto cf = f.scaled(c);
    auto b = max_ergodic_average(s, f);
    auto cb = max_ergodic_average(s, cf);
    EXPECT_EQ(cb.value, c * b.value);
    EXPECT_EQ(cb.witness, b.witness);
    auto mid = (min_ergodic_average(s, phi).value + max_ergodic_average(s, phi).value) / 2;
    auto l = conditional_max(s, f, phi, mid);
    auto cl = conditional_max(s, cf, phi, mid);
    EXPECT_EQ(cl.value, c * l.value);
    EXPECT_EQ(cl.witness, l.witness);
    auto g = LC::constant(s, 1);
    auto rr = ratio_max(s, f, g, DenominatorBound(1));
    auto crr = ratio_max(s, cf, g, DenominatorBound(1));
    EXPECT_EQ(crr.value, c * rr.value);
    EXPECT_EQ(crr.ergodic_witness, rr.ergodic_witness);
  }
}

TEST(Ratio, ConstrainedExamples) {
  auto full = full_shift(2);
  auto x0 = LC::indicator(full, 1);
  auto one = LC::constant(full, 1);
  EXPECT_EQ(ratio_max_constrained(full, x0, one, x0, one, Rational(7, 10), DenominatorBound(1)).value, Rational(7, 10));
  GoldenMean gm;
  auto g = LC::from_symbol_weights(gm.sft, {Rational(2), Rational(1)});  // 1 + indicator of 0
  auto unit = LC::constant(gm.sft, 1);
  auto r = ratio_max_constrained(gm.sft, gm.one, g, gm.zero, unit, Rational(3, 4), DenominatorBound(1));
  EXPECT_EQ(r.value, Rational(1, 7));
  EXPECT_EQ(total_mass(r.witness), 1);
  EXPECT_THROW(ratio_max_constrained(gm.sft, gm.one, g, gm.zero, unit, Rational(3, 4), DenominatorBound(1.5)), Error);
  try {
    ratio_max_constrained(gm.sft, gm.one, g, gm.zero, unit, Rational(1, 4), DenominatorBound(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Infeasible);
  }
}

TEST(Ratio, UnitDenominatorsReduceToConditional) {
  Rng rng(59);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = oracle::random_sft(rng, 3);
    auto f = oracle::random_potential(rng, s, 1 + trial % 2);
    auto phi = oracle::random_potential(rng, s, 1);
    auto one = LC::constant(s, 1);
    auto eta = min_ergodic_average(s, phi).value;
    auto beta = max_ergodic_average(s, phi).value;
    const Rational alpha = eta + (beta - eta) / 3;
    EXPECT_EQ(ratio_max_constrained(s, f, one, phi, one, alpha, DenominatorBound(1)).value,
              conditional_max(s, f, phi, alpha).value);
  }
}

TEST(Ratio, UnconstrainedExamples) {
  GoldenMean gm;
  auto g = LC::from_symbol_weights(gm.sft, {Rational(2), Rational(1)});  // 2 - indicator of 1
  auto r = ratio_max(gm.sft, gm.one, g, DenominatorBound(1));
  EXPECT_EQ(r.value, Rational(1, 3));
  EXPECT_EQ(r.ergodic_witness, Cycle(Word{0, 1}));
  EXPECT_EQ(ratio_max(gm.sft, g, g, DenominatorBound(1)).value, 1);
  auto full = full_shift(2);
  EXPECT_EQ(ratio_max(full, LC::indicator(full, 1), LC::constant(full, 1), DenominatorBound(1)).value, 1);
}

TEST(Ratio, ErgodicAttainmentMatchesCycleRatios) {
  Rng rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = oracle::random_sft(rng, 2 + trial % 3);
    auto f = oracle::random_potential(rng, s, 1);
    std::vector<Rational> gw;
    for (std::size_t i = 0; i < s.alphabet_size(); ++i) gw.push_back(1 + Rational(static_cast<long>(i % 3), 2));
    auto g = LC::from_symbol_weights(s, gw);
    auto r = ratio_max(s, f, g, DenominatorBound::of(g));
    ASSERT_TRUE(r.ergodic_witness.has_value());
    Rational best(-1000);
    for (const Word& c : oracle::simple_cycles(s, s.alphabet_size()))
      best = std::max(best, oracle::periodic_sum(f, c) / oracle::periodic_sum(g, c));
    EXPECT_EQ(r.value, best);
    const Word& w = r.ergodic_witness->symbols();
    EXPECT_EQ(oracle::periodic_sum(f, w) / oracle::periodic_sum(g, w), best);
  }
}

TEST(ExtremePoints, Examples) {
  GoldenMean gm;
  auto r = extreme_point_check(gm.sft, gm.one, gm.zero);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.at_eta.alpha, Rational(1, 2));
  EXPECT_EQ(*r.at_eta.cycle, Cycle(Word{0, 1}));
  EXPECT_EQ(r.at_beta.alpha, 1);
  EXPECT_EQ(*r.at_beta.cycle, Cycle(Word{0}));
  auto full = full_shift(2);
  auto x0 = LC::indicator(full, 1);
  auto rf = extreme_point_check(full, x0, x0);
  ASSERT_TRUE(rf.ok());
  EXPECT_EQ(*rf.at_beta.cycle, Cycle(Word{1}));
}
