// Copyright 2026 The cvtele Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cvtele/security.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "gtest/gtest.h"
#include "oracle/covariance_oracle.hpp"

namespace cvtele {
namespace {

using Vec = oracle::CovarianceOracle::Vec;

// Frozen from an independent dense-matrix computation (numpy, float64) of the
// same network: optimal-gain noise var(M) - cov(H, M)^2 / var(H) per party.
constexpr double kEveR1Eta08 = 1.8540456750163743;
constexpr double kBobR1Eta08 = 0.5869300646692626;
constexpr double kEveR2Eta03 = 0.8374007788039748;
constexpr double kBobR2Eta03 = 1.3550181213193753;
constexpr double kBobR1Lossless = 0.2658022288340791;

TEST(ConditionalVariance, Basics) {
  Context ctx;
  Mode a = make_squeezed(ctx, 0.4, Axis::X);
  Mode b = make_vacuum(ctx);
  EXPECT_EQ(conditional_variance(a.x, b.x), variance(b.x));
  EXPECT_EQ(conditional_variance(a.x, a.x), 0.0);
  EXPECT_THROW(conditional_variance(QuadratureForm(1.0), a.x), std::domain_error);
}

TEST(ConditionalVariance, NeverExceedsUnconditional) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Context ctx;
    Mode m1 = make_squeezed(ctx, 2 * unit(rng), Axis::X);
    Mode m2 = make_coherent(ctx, unit(rng), unit(rng));
    Mode m3 = make_squeezed(ctx, 2 * unit(rng), Axis::Y);
    QuadratureForm meas = (2 * unit(rng) - 1) * m1.x + (2 * unit(rng) - 1) * m2.x;
    QuadratureForm target = (2 * unit(rng) - 1) * m1.x + (2 * unit(rng) - 1) * m3.x;
    EXPECT_LE(conditional_variance(meas, target), variance(target) + 1e-12);
    EXPECT_GE(conditional_variance(meas, target), -1e-12);
  }
}

TEST(ConditionalVariance, EprThresholdAtHalfTransmission) {
  // Closed form for symmetric loss: 1 + eta (c - 1)(1 - 2 eta) / (1 + eta (c - 1)),
  // c = cosh 2r, which crosses 1 exactly at eta = 1/2 for every r > 0.
  for (double r : {0.3, 1.0, 5.0}) {
    const double c = std::cosh(2 * r);
    for (double eta : {0.1, 0.3, 0.49, 0.51, 0.8, 1.0}) {
      const double expected = 1 + eta * (c - 1) * (1 - 2 * eta) / (1 + eta * (c - 1));
      EXPECT_NEAR(epr_conditional_variance(r, eta), expected, 1e-10 * c);
      EXPECT_EQ(epr_conditional_variance(r, eta) < 1.0, eta > 0.5);
    }
    EXPECT_NEAR(find_conditional_threshold(r, 1e-9), 0.5, 1e-6);
  }
  // r = 0: no correlation, no crossing.
  EXPECT_THROW(find_conditional_threshold(0.0, 1e-9), std::domain_error);
}

TEST(ConditionalVariance, MatchesDenseSchurComplement) {
  for (double eta : {0.2, 0.5, 0.9}) {
    oracle::CovarianceOracle ref;
    const int a = ref.add_squeezed_y(1.5);
    const int b = ref.add_squeezed_x(1.5);
    ref.beamsplitter(a, b, 0.5);
    ref.loss(a, eta);
    ref.loss(b, eta);
    EXPECT_NEAR(epr_conditional_variance(1.5, eta), ref.conditional_var(ref.x(a), ref.x(b)), 1e-9);
  }
}

TEST(OptimalCopy, QuadraticMinimum) {
  Context ctx;
  Mode h = make_vacuum(ctx);
  Mode v = make_vacuum(ctx);
  // Reading noise -h.x + v.x: best u = 1, residual var(v.x) = 1, gain 1.
  OptimalCopy c = optimal_copy(h.x, -1.0 * h.x + v.x);
  EXPECT_NEAR(c.noise, 1.0, 1e-15);
  EXPECT_NEAR(c.gain, 1.0, 1e-15);
  // Uncorrelated held mode: unbounded gain, noise var(reading noise).
  OptimalCopy none = optimal_copy(h.x, v.x);
  EXPECT_EQ(none.noise, 1.0);
  EXPECT_EQ(none.gain, std::numeric_limits<double>::infinity());
  // Brute-force scan of g never beats the closed form.
  const QuadratureForm noise = -0.6 * h.x + v.x;
  OptimalCopy best = optimal_copy(h.x, noise);
  for (double g = 0.05; g < 20; g += 0.05) {
    QuadratureForm out = h.x;
    out.axpy(g, noise);
    EXPECT_GE(variance(out) / (g * g), best.noise - 1e-12);
  }
}

TEST(EveTeleport, FrozenValues) {
  EveReport a = compare_eve_bob(ProtocolConfig{1.0, 0.8, 0.8, 1.0});
  EXPECT_NEAR(a.n_x_eve, kEveR1Eta08, 1e-12);
  EXPECT_NEAR(a.n_y_eve, kEveR1Eta08, 1e-12);
  EXPECT_NEAR(a.n_x_bob, kBobR1Eta08, 1e-12);
  EXPECT_FALSE(a.eve_wins);

  EveReport b = compare_eve_bob(ProtocolConfig{2.0, 0.3, 0.3, 1.0});
  EXPECT_NEAR(b.n_x_eve, kEveR2Eta03, 1e-12);
  EXPECT_NEAR(b.n_x_bob, kBobR2Eta03, 1e-12);
  EXPECT_TRUE(b.eve_wins);
}

TEST(EveTeleport, BobArmOnlyLoss) {
  EveReport rep = compare_eve_bob(ProtocolConfig{1.0, 1.0, 0.8, 1.0});
  EXPECT_FALSE(rep.eve_wins);
  EveReport low = compare_eve_bob(ProtocolConfig{2.0, 1.0, 0.3, 1.0});
  EXPECT_TRUE(low.eve_wins);
}

TEST(EveTeleport, TotalLossHandsEveTheWholeBeam) {
  for (double r : {0.4, 1.0, 2.5}) {
    Context ctx;
    Mode in = make_coherent(ctx, 1, 1);
    TeleportReport eve = eve_teleport(ctx, ProtocolConfig{r, 1.0, 0.0, 1.0}, in);
    Context ctx2;
    Mode in2 = make_coherent(ctx2, 1, 1);
    TeleportReport bob_lossless = bob_optimal_teleport(ctx2, ProtocolConfig{r, 1.0, 1.0, 1.0}, in2);
    EXPECT_NEAR(eve.n_x_out, bob_lossless.n_x_out, 1e-10);
    EXPECT_NEAR(eve.n_y_out, bob_lossless.n_y_out, 1e-10);

    EveReport rep = compare_eve_bob(ProtocolConfig{r, 1.0, 0.0, 1.0});
    EXPECT_TRUE(rep.eve_wins);
    EXPECT_GT(rep.bob_total(), rep.eve_total());
  }
  EXPECT_NEAR(compare_eve_bob(ProtocolConfig{1.0, 1.0, 0.0, 1.0}).n_x_eve, kBobR1Lossless, 1e-12);
}

TEST(EveTeleport, NoTapMeansNoWin) {
  for (double r : {0.1, 1.0, 5.0}) {
    EveReport rep = compare_eve_bob(ProtocolConfig{r, 1.0, 1.0, 1.0});
    EXPECT_FALSE(rep.eve_wins);
    EXPECT_EQ(rep.gain_eve, std::numeric_limits<double>::infinity());
  }
  Context ctx;
  TeleportReport eve =
      eve_teleport(ctx, ProtocolConfig{1.0, 1.0, 1.0, 1.0}, make_coherent(ctx, 0, 0));
  EXPECT_TRUE(std::isinf(eve.gain));
  EXPECT_EQ(eve.mean_x_out, 0.0);
  EXPECT_FALSE(eve.fidelity_at_unity_gain.has_value());
}

TEST(EveTeleport, BalancedTapIsATie) {
  for (double r : {0.2, 1.0, 3.0}) {
    EveReport rep = compare_eve_bob(ProtocolConfig{r, 1.0, 0.5, 1.0});
    EXPECT_LE(std::abs(rep.eve_total() - rep.bob_total()), 1e-9);
    EXPECT_FALSE(rep.eve_wins);
  }
}

TEST(EveTeleport, SwappingPortsSwapsReports) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    const double r = 3 * unit(rng), eta_a = unit(rng), eta_b = unit(rng);
    EveReport rep = compare_eve_bob(ProtocolConfig{r, eta_a, eta_b, 1.0});
    EveReport swapped = compare_eve_bob(ProtocolConfig{r, eta_a, 1.0 - eta_b, 1.0});
    EXPECT_NEAR(rep.n_x_eve, swapped.n_x_bob, 1e-10);
    EXPECT_NEAR(rep.n_y_eve, swapped.n_y_bob, 1e-10);
    EXPECT_NEAR(rep.n_x_bob, swapped.n_x_eve, 1e-10);
  }
}

TEST(EveTeleport, MatchesDenseModel) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const double r = 0.05 + 2 * unit(rng), eta_a = 0.05 + 0.95 * unit(rng);
    const double eta_b = 0.05 + 0.9 * unit(rng);
    oracle::CovarianceOracle ref;
    const int in = ref.add_coherent(1, 1);
    const int e1 = ref.add_squeezed_y(r);
    const int e2 = ref.add_squeezed_x(r);
    ref.beamsplitter(e1, e2, 0.5);
    ref.loss(e1, eta_a);
    const int tap = ref.loss(e2, eta_b);
    // Reading noise: X_m - X_in = -X_A, Y_m - Y_in = +Y_A.
    const Vec mx = -ref.x(e1);
    const Vec my = ref.y(e1);
    auto best = [&](const Vec& held, const Vec& m) {
      const double c = ref.cov(held, m);
      return ref.var(m) - c * c / ref.var(held);
    };
    EveReport rep = compare_eve_bob(ProtocolConfig{r, eta_a, eta_b, 1.0});
    EXPECT_NEAR(rep.n_x_eve, best(ref.x(tap), mx), 1e-9);
    EXPECT_NEAR(rep.n_y_eve, best(ref.y(tap), my), 1e-9);
    EXPECT_NEAR(rep.n_x_bob, best(ref.x(e2), mx), 1e-9);
    (void)in;
  }
}

TEST(EveCrossover, HalfTransmissionForAllSqueezing) {
  for (double r : {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 20.0}) {
    EXPECT_NEAR(find_eve_crossover(r, 1e-7), 0.5, 1e-6) << "r = " << r;
  }
  // Symmetric arms shift nothing.
  EXPECT_NEAR(find_eve_crossover(1.0, 1e-7, 0.6), 0.5, 1e-6);
}

TEST(EveCrossover, BruteForceSweepAgrees) {
  for (double r : {0.3, 1.5}) {
    double last_win = -1, first_loss = 2;
    for (int k = 0; k <= 200; ++k) {
      const double eta = k / 200.0;
      const bool wins = compare_eve_bob(ProtocolConfig{r, 1.0, eta, 1.0}).eve_wins;
      if (wins) last_win = std::max(last_win, eta);
      if (!wins) first_loss = std::min(first_loss, eta);
    }
    EXPECT_LT(last_win, 0.5);
    EXPECT_EQ(first_loss, 0.5);
  }
}

TEST(EveCrossover, FailsLoudlyWithoutSignChange) {
  EXPECT_THROW(find_eve_crossover(1.0, 1e-6, 0.0), NoCrossoverError);
  EXPECT_THROW(find_eve_crossover(0.0, 1e-6), std::domain_error);
  EXPECT_THROW(find_eve_crossover(1.0, 0.0), std::domain_error);
}

TEST(Regime, Labels) {
  EXPECT_EQ(classify_regime(0.3), Regime::BelowClassical);
  EXPECT_EQ(classify_regime(0.5), Regime::ClassicalBoundary);
  EXPECT_EQ(classify_regime(0.6), Regime::Intermediate);
  EXPECT_EQ(classify_regime(2.0 / 3.0), Regime::Secure);
  EXPECT_EQ(classify_regime(1.0), Regime::Secure);
  EXPECT_THROW(classify_regime(-0.1), std::domain_error);
  EXPECT_THROW(classify_regime(1.1), std::domain_error);
  for (Regime r :
       {Regime::BelowClassical, Regime::ClassicalBoundary, Regime::Intermediate, Regime::Secure}) {
    EXPECT_EQ(parse_regime(to_string(r)), r);
  }
  EXPECT_THROW(parse_regime("Nope"), std::invalid_argument);
}

TEST(Regime, ConsistentWithNoiseBoundaries) {
  EXPECT_EQ(noise_for_fidelity(0.5), 2.0);
  EXPECT_EQ(classify_regime(fidelity_unity_gain(2, 2)), Regime::ClassicalBoundary);
  EXPECT_EQ(classify_regime(fidelity_unity_gain(2 + 1e-12, 2 + 1e-12)), Regime::BelowClassical);
  EXPECT_EQ(classify_regime(fidelity_unity_gain(2 - 1e-12, 2 - 1e-12)), Regime::Intermediate);
  EXPECT_EQ(classify_regime(fidelity_unity_gain(1, 1)), Regime::Secure);
  EXPECT_EQ(classify_regime(fidelity_unity_gain(1 + 1e-12, 1 + 1e-12)), Regime::Intermediate);
  EXPECT_EQ(classify_regime(fidelity_unity_gain(1 - 1e-12, 1 - 1e-12)), Regime::Secure);
}

TEST(FidelityBoundary, HalfToleratesLossWithoutConditionalSqueezing) {
  // Symmetric losses approaching total: Bob's unity-gain fidelity stays above
  // one half while no conditional squeezing survives.
  const double r = 2.0;
  for (double eta : {0.2, 0.05, 1e-3}) {
    Context ctx;
    TeleportReport rep =
        epr_teleport(ctx, ProtocolConfig{r, eta, eta, 1.0}, make_coherent(ctx, 1, 1));
    EXPECT_GT(*rep.fidelity_at_unity_gain, 0.5);
    EXPECT_GE(epr_conditional_variance(r, eta), 1.0);
  }
}

}  // namespace
}  // namespace cvtele
