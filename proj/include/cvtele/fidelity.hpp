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

#pragma once

// Generalized fidelity between a known coherent input |alpha> and a Gaussian
// guess P(x, y) over coherent states |beta>:
//
//     F = integral dx dy P(x, y) |<beta|alpha>|^2.
//
// The guess is either the distribution of reconstructed states (quantum
// output) or of classical measurement outcomes; both readings share the same
// algebra. Closed forms and a direct Monte Carlo evaluation of the integral
// live side by side so each can check the other.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

#include "cvtele/gaussian_core.hpp"
#include "cvtele/stats.hpp"

namespace cvtele {

/// Gaussian over (x, y) with means (x_b, y_b) and variances (N_X, N_Y).
struct GaussianGuess {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double n_x = 0.0;
  double n_y = 0.0;

  void validate() const {
    detail::require(n_x >= 0.0 && n_y >= 0.0, "guess variances must be >= 0");
  }
};

struct FidelityEstimate {
  double closed_form = 0.0;
  double monte_carlo = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;

  double z_score() const { return Estimate{monte_carlo, std_error}.z_score(closed_form); }
};

/// |<beta|alpha>|^2 for beta = (x + iy)/2, alpha = (x_a + i y_a)/2.
inline double overlap(double x, double y, double x_a, double y_a) {
  const double dx = x - x_a;
  const double dy = y - y_a;
  return std::exp(-(dx * dx) / 4.0 - (dy * dy) / 4.0);
}

inline double fidelity_closed_form(const GaussianGuess& guess, double x_a, double y_a) {
  guess.validate();
  const double sx = 2.0 + guess.n_x;
  const double sy = 2.0 + guess.n_y;
  const double dx = x_a - guess.mean_x;
  const double dy = y_a - guess.mean_y;
  return 2.0 / std::sqrt(sx * sy) * std::exp(-(dx * dx) / (2.0 * sx) - (dy * dy) / (2.0 * sy));
}

/// Fidelity of a reconstruction with equivalent input noises (n_x, n_y) at
/// unity gain; independent of the input amplitude.
inline double fidelity_unity_gain(double n_x, double n_y) {
  detail::require(n_x >= 0.0 && n_y >= 0.0, "equivalent input noise must be >= 0");
  return 2.0 / std::sqrt((2.0 + n_x) * (2.0 + n_y));
}

/// Same expression as fidelity_unity_gain, but the arguments are the noises
/// of the measurement record itself (input noise included), i.e. the spread
/// of the classical guess rather than of a reconstructed state.
inline double classical_fidelity(double n_x_m, double n_y_m) {
  detail::require(n_x_m >= 0.0 && n_y_m >= 0.0, "measurement noise must be >= 0");
  return 2.0 / std::sqrt((2.0 + n_x_m) * (2.0 + n_y_m));
}

/// Fidelity of a Gaussian output state given its quadrature means and full
/// variances (vacuum = 1). This is the closed form above with N = var - 1,
/// which stays valid when the output is narrower than vacuum (N < 0), as
/// happens below unity gain.
inline double fidelity_output_state(double mean_x, double mean_y, double var_x, double var_y,
                                    double x_a, double y_a) {
  detail::require(var_x > 0.0 && var_y > 0.0, "output variances must be > 0");
  const double sx = 1.0 + var_x;
  const double sy = 1.0 + var_y;
  const double dx = x_a - mean_x;
  const double dy = y_a - mean_y;
  const double f =
      2.0 / std::sqrt(sx * sy) * std::exp(-(dx * dx) / (2.0 * sx) - (dy * dy) / (2.0 * sy));
  return std::min(f, 1.0);
}

/// Averages overlap() over draws from the guess. A zero variance draws the
/// mean exactly.
inline FidelityEstimate fidelity_monte_carlo(const GaussianGuess& guess, double x_a, double y_a,
                                             std::size_t n, std::uint64_t seed) {
  guess.validate();
  detail::require(n >= 1000, "fidelity_monte_carlo needs at least 1000 samples");
  const double sx = std::sqrt(guess.n_x);
  const double sy = std::sqrt(guess.n_y);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RunningMoments acc;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = sx > 0.0 ? guess.mean_x + sx * normal(rng) : guess.mean_x;
    const double y = sy > 0.0 ? guess.mean_y + sy * normal(rng) : guess.mean_y;
    acc.push(overlap(x, y, x_a, y_a));
  }
  const Estimate e = acc.mean_estimate();
  return FidelityEstimate{fidelity_closed_form(guess, x_a, y_a), e.value, e.std_error, n};
}

/// Symmetric equivalent input noise N with fidelity_unity_gain(N, N) == f.
inline double noise_for_fidelity(double f) {
  detail::require(f > 0.0 && f <= 1.0, "fidelity must lie in (0, 1]");
  return 2.0 * (1.0 - f) / f;
}

}  // namespace cvtele
