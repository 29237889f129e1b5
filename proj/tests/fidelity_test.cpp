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

#include "cvtele/fidelity.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "gtest/gtest.h"

namespace cvtele {
namespace {

// Midpoint-rule integration of the defining integral over +-8 sigma, as a
// deterministic reference. Requires nonzero variances.
double fidelity_by_quadrature(const GaussianGuess& g, double x_a, double y_a) {
  const int n = 800;
  const double sx = std::sqrt(g.n_x), sy = std::sqrt(g.n_y);
  const double hx = 16 * sx / n, hy = 16 * sy / n;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g.mean_x - 8 * sx + (i + 0.5) * hx;
    const double px = std::exp(-(x - g.mean_x) * (x - g.mean_x) / (2 * g.n_x));
    for (int j = 0; j < n; ++j) {
      const double y = g.mean_y - 8 * sy + (j + 0.5) * hy;
      const double py = std::exp(-(y - g.mean_y) * (y - g.mean_y) / (2 * g.n_y));
      total += px * py * overlap(x, y, x_a, y_a);
    }
  }
  return total * hx * hy / (2 * std::numbers::pi * sx * sy);
}

TEST(Overlap, Basics) {
  EXPECT_EQ(overlap(1.5, -2, 1.5, -2), 1.0);
  EXPECT_NEAR(overlap(3.5, -2, 1.5, -2), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(overlap(3.5, -2, 1.5, -2), 0.36787944117144233, 1e-15);
  EXPECT_EQ(overlap(0.3, 0.9, -1.2, 2.0), overlap(-1.2, 2.0, 0.3, 0.9));
}

TEST(FidelityClosedForm, ReferenceValues) {
  EXPECT_EQ(fidelity_closed_form({1, 2, 0, 0}, 1, 2), 1.0);
  EXPECT_EQ(fidelity_closed_form({1, 2, 2, 2}, 1, 2), 0.5);
  EXPECT_NEAR(fidelity_closed_form({3, 2, 0, 0}, 1, 2), std::exp(-1.0), 1e-15);
  EXPECT_THROW(fidelity_closed_form({0, 0, -1, 0}, 0, 0), std::domain_error);
}

TEST(FidelityClosedForm, MatchesDeterministicQuadrature) {
  const GaussianGuess cases[] = {{0, 0, 1, 1}, {1, -2, 0.5, 3}, {-3, 4, 7, 0.2}, {2, 2, 9.5, 9.5}};
  for (const GaussianGuess& g : cases) {
    for (auto [x_a, y_a] : {std::pair{0.0, 0.0}, std::pair{1.0, -1.0}, std::pair{-2.5, 3.0}}) {
      EXPECT_NEAR(fidelity_closed_form(g, x_a, y_a), fidelity_by_quadrature(g, x_a, y_a), 1e-9);
    }
  }
}

TEST(FidelityClosedForm, RangeAndUnitPeak) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> noise(0.0, 10.0), off(-5.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const GaussianGuess g{off(rng), off(rng), noise(rng), noise(rng)};
    const double f = fidelity_closed_form(g, off(rng), off(rng));
    EXPECT_GT(f, 0.0);
    EXPECT_LE(f, 1.0);
    EXPECT_LT(f, 1.0);
  }
}

TEST(FidelityClosedForm, PeakedAtMatchedMeans) {
  for (double n : {0.0, 1.0, 4.0}) {
    const double peak = fidelity_closed_form({0.4, -0.7, n, n}, 0.4, -0.7);
    for (int i = -10; i <= 10; ++i) {
      for (int j = -10; j <= 10; ++j) {
        if (i == 0 && j == 0) continue;
        EXPECT_LT(fidelity_closed_form({0.4 + 0.3 * i, -0.7 + 0.3 * j, n, n}, 0.4, -0.7), peak);
      }
    }
  }
}

TEST(FidelityUnityGain, ReferenceValues) {
  EXPECT_EQ(fidelity_unity_gain(0, 0), 1.0);
  EXPECT_EQ(fidelity_unity_gain(2, 2), 0.5);
  EXPECT_EQ(fidelity_unity_gain(1, 1), 2.0 / 3.0);
  EXPECT_THROW(fidelity_unity_gain(-1e-3, 0), std::domain_error);
}

TEST(FidelityUnityGain, IndependentOfInputAmplitude) {
  for (double x_a : {-4.0, 0.0, 2.5}) {
    EXPECT_EQ(fidelity_closed_form({x_a, -x_a, 1.3, 0.4}, x_a, -x_a),
              fidelity_unity_gain(1.3, 0.4));
  }
}

TEST(FidelityUnityGain, StrictlyDecreasing) {
  double prev = fidelity_unity_gain(0, 0.5);
  for (double n = 0.05; n <= 20; n += 0.05) {
    const double f = fidelity_unity_gain(n, 0.5);
    EXPECT_LT(f, prev);
    EXPECT_LT(fidelity_unity_gain(0.5, n), fidelity_unity_gain(0.5, n - 0.05));
    prev = f;
  }
}

TEST(ClassicalFidelity, ReferenceValues) {
  EXPECT_EQ(classical_fidelity(2, 2), 0.5);
  EXPECT_EQ(classical_fidelity(0, 0), 1.0);
  EXPECT_NEAR(classical_fidelity(2, 0), 2 / std::sqrt(8.0), 1e-15);
  EXPECT_NEAR(classical_fidelity(2, 0), 0.7071067811865475, 1e-15);
  EXPECT_THROW(classical_fidelity(0, -2), std::domain_error);
}

TEST(FidelityOutputState, ReducesToClosedFormForPhysicalNoise) {
  EXPECT_NEAR(fidelity_output_state(1, 1, 3, 3, 1, 1), 0.5, 1e-15);
  EXPECT_NEAR(fidelity_output_state(0.5, 2, 1.7, 2.9, 1, 1),
              fidelity_closed_form({0.5, 2, 0.7, 1.9}, 1, 1), 1e-15);
  // Narrower than vacuum is still a valid state (below unity gain).
  const double f = fidelity_output_state(0.5, 0.5, 0.25, 0.25, 1, 1);
  EXPECT_GT(f, 0.0);
  EXPECT_LE(f, 1.0);
  EXPECT_THROW(fidelity_output_state(0, 0, 0, 1, 0, 0), std::domain_error);
}

TEST(FidelityMonteCarlo, ClassicalLimit) {
  const FidelityEstimate e = fidelity_monte_carlo({1, 1, 2, 2}, 1, 1, 1000000, 17);
  EXPECT_EQ(e.closed_form, 0.5);
  EXPECT_EQ(e.n_samples, 1000000u);
  EXPECT_GT(e.std_error, 0.0);
  EXPECT_LE(std::abs(e.monte_carlo - 0.5), 4 * e.std_error);
}

TEST(FidelityMonteCarlo, DegenerateGuessIsExact) {
  const FidelityEstimate e = fidelity_monte_carlo({-2, 3, 0, 0}, -2, 3, 1000, 1);
  EXPECT_EQ(e.monte_carlo, 1.0);
  EXPECT_EQ(e.std_error, 0.0);
  EXPECT_EQ(e.closed_form, 1.0);

  // Degenerate in X only.
  const FidelityEstimate half = fidelity_monte_carlo({0, 0, 0, 1.5}, 1, 0, 200000, 4);
  EXPECT_LE(std::abs(half.monte_carlo - half.closed_form), 4 * half.std_error);
}

TEST(FidelityMonteCarlo, RandomizedAgreement) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> noise(0.0, 10.0), off(-5.0, 5.0);
  int within = 0;
  for (int i = 0; i < 100; ++i) {
    const double x_a = off(rng), y_a = off(rng);
    const GaussianGuess g{x_a + off(rng), y_a + off(rng), noise(rng), noise(rng)};
    const FidelityEstimate e = fidelity_monte_carlo(g, x_a, y_a, 100000, 1000 + i);
    if (std::abs(e.monte_carlo - e.closed_form) <= 4 * e.std_error) ++within;
  }
  EXPECT_GE(within, 99);
}

TEST(FidelityMonteCarlo, DeterministicAndValidated) {
  const GaussianGuess g{0.3, 0.1, 1.2, 0.8};
  EXPECT_EQ(fidelity_monte_carlo(g, 0, 0, 5000, 9).monte_carlo,
            fidelity_monte_carlo(g, 0, 0, 5000, 9).monte_carlo);
  EXPECT_THROW(fidelity_monte_carlo(g, 0, 0, 999, 9), std::domain_error);
}

TEST(NoiseForFidelity, Inversion) {
  EXPECT_EQ(noise_for_fidelity(0.5), 2.0);
  EXPECT_NEAR(noise_for_fidelity(2.0 / 3.0), 1.0, 1e-15);
  EXPECT_EQ(noise_for_fidelity(1.0), 0.0);
  EXPECT_THROW(noise_for_fidelity(0.0), std::domain_error);
  EXPECT_THROW(noise_for_fidelity(1.0001), std::domain_error);
}

TEST(NoiseForFidelity, RoundTrip) {
  for (double n = 0.0; n <= 50.0; n += 0.125) {
    EXPECT_NEAR(noise_for_fidelity(fidelity_unity_gain(n, n)), n, 1e-12);
  }
}

}  // namespace
}  // namespace cvtele
