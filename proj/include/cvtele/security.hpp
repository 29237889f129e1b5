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

// Security side of EPR teleportation through lossy arms.
//
// Two questions are answered on the same Gaussian network that epr_teleport
// builds:
//   * conditional squeezing: after optimally correcting one EPR beam with a
//     measurement of the other, is the residual noise below shot noise?
//   * a rival copy: an eavesdropper who reads the classical channel and holds
//     the loss port of Bob's arm builds her own reconstruction. Who ends up
//     with less equivalent input noise?
//
// Residual variances are computed by forming the corrected observable
// symbolically and taking its variance, rather than as var - cov^2 / var.
// Both are equal in exact arithmetic, but the latter loses everything to
// cancellation once e^{2r} is large.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cvtele/fidelity.hpp"
#include "cvtele/format.hpp"
#include "cvtele/gaussian_core.hpp"
#include "cvtele/protocols.hpp"
#include "cvtele/stats.hpp"

namespace cvtele {

/// Residual variance of `target` after the best linear correction from
/// `meas`: variance(target) - covariance(meas, target)^2 / variance(meas).
inline double conditional_variance(const QuadratureForm& meas, const QuadratureForm& target) {
  const double vm = variance(meas);
  detail::require(vm > 0.0, "conditional_variance needs a measurement with nonzero variance");
  QuadratureForm residual = target;
  residual.axpy(-covariance(meas, target) / vm, meas);
  return variance(residual);
}

/// Conditional X variance of EPR beam 2 given EPR beam 1, the beams passed
/// through transmissions eta_1 and eta_2. Sub-unity values mean conditional
/// squeezing.
inline double epr_conditional_variance(double r, double eta_1, double eta_2) {
  Context ctx;
  auto [beam1, beam2] = epr_source(ctx, r);
  LossPorts a = loss(beam1, eta_1, ctx);
  LossPorts b = loss(beam2, eta_2, ctx);
  return conditional_variance(a.transmitted.x, b.transmitted.x);
}

inline double epr_conditional_variance(double r, double eta) {
  return epr_conditional_variance(r, eta, eta);
}

/// Thrown when a threshold search finds no sign change on its bracket.
class NoCrossoverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symmetric per-arm transmission at which epr_conditional_variance(r, .)
/// crosses shot noise. eta = 0 leaves two vacua, which sit at shot noise
/// exactly, so the bracket starts at tol.
inline double find_conditional_threshold(double r, double tol) {
  detail::require(r > 0.0 && std::isfinite(r), "r must be finite and > 0");
  detail::require(tol > 0.0 && tol < 0.5, "tolerance must lie in (0, 0.5)");
  auto root =
      bisect([r](double eta) { return epr_conditional_variance(r, eta) - 1.0; }, tol, 1.0, tol);
  if (!root) throw NoCrossoverError("conditional variance never crosses shot noise on [0, 1]");
  return *root;
}

/// Best reconstruction a party can make from a held mode plus the classical
/// channel, one quadrature at a time.
struct OptimalCopy {
  double noise = 0.0;  // input-referred
  double gain = 0.0;   // +inf when amplification without bound is optimal
};

/// Minimizes variance(held + g * reading_noise) / g^2 over g > 0, where
/// reading_noise = reading - input is the noise the classical channel
/// carries. With u = 1/g this is the quadratic
///   u^2 var(held) + 2u cov(held, noise) + var(noise),
/// minimized at u* = -cov / var(held). When u* <= 0 the infimum is var(noise),
/// approached as g -> infinity.
inline OptimalCopy optimal_copy(const QuadratureForm& held, const QuadratureForm& reading_noise) {
  const double vh = variance(held);
  const double c = covariance(held, reading_noise);
  const double u = vh > 0.0 ? -c / vh : 0.0;
  if (!(u > 0.0)) {
    return OptimalCopy{variance(reading_noise), std::numeric_limits<double>::infinity()};
  }
  QuadratureForm residual = reading_noise;
  residual.axpy(u, held);
  return OptimalCopy{variance(residual), 1.0 / u};
}

namespace detail {

inline double scaled_mean(double gain, double mean_in) {
  return mean_in == 0.0 ? 0.0 : gain * mean_in;
}

inline TeleportReport best_copy_report(const EprNetwork& net, const Mode& held) {
  const OptimalCopy cx = optimal_copy(held.x, net.x_m - net.input.x);
  const OptimalCopy cy = optimal_copy(held.y, net.y_m - net.input.y);
  TeleportReport report{cx.noise,
                        cy.noise,
                        cx.gain,
                        scaled_mean(cx.gain, mean(net.input.x)),
                        scaled_mean(cy.gain, mean(net.input.y)),
                        std::nullopt};
  if (cx.gain == 1.0 && cy.gain == 1.0) {
    report.fidelity_at_unity_gain = fidelity_unity_gain(cx.noise, cy.noise);
  }
  return report;
}

}  // namespace detail

/// Eve's copy: the loss port of Bob's arm displaced by her own optimal gain
/// times the intercepted readings. The gain field reports the X gain; the Y
/// gain coincides with it for every network epr_source produces.
inline TeleportReport eve_teleport(Context& ctx, const ProtocolConfig& config, const Mode& input) {
  EprNetwork net = build_epr_network(ctx, config, input);
  return detail::best_copy_report(net, net.bob_tap);
}

/// Bob's copy when he too picks his optimal gain instead of config.gain.
inline TeleportReport bob_optimal_teleport(Context& ctx, const ProtocolConfig& config,
                                           const Mode& input) {
  EprNetwork net = build_epr_network(ctx, config, input);
  return detail::best_copy_report(net, net.bob_beam);
}

struct EveReport {
  double n_x_eve = 0.0;
  double n_y_eve = 0.0;
  double n_x_bob = 0.0;
  double n_y_bob = 0.0;
  double gain_eve = 0.0;
  double gain_bob = 0.0;
  bool eve_wins = false;

  double eve_total() const { return n_x_eve + n_y_eve; }
  double bob_total() const { return n_x_bob + n_y_bob; }
};

/// Eve against Bob on one network, each at their own optimal gain.
inline EveReport compare_eve_bob(const ProtocolConfig& config, double x_a = 1.0, double y_a = 1.0) {
  Context ctx;
  const Mode input = make_coherent(ctx, x_a, y_a);
  EprNetwork net = build_epr_network(ctx, config, input);
  const TeleportReport eve = detail::best_copy_report(net, net.bob_tap);
  const TeleportReport bob = detail::best_copy_report(net, net.bob_beam);
  EveReport report{eve.n_x_out, eve.n_y_out, bob.n_x_out, bob.n_y_out, eve.gain, bob.gain, false};
  report.eve_wins = report.eve_total() < report.bob_total();
  return report;
}

/// Bob's arm transmission at which Eve's and Bob's total noises cross.
inline double find_eve_crossover(double r, double tol, double eta_alice = 1.0) {
  detail::require(r > 0.0 && std::isfinite(r), "r must be finite and > 0");
  detail::require(tol > 0.0, "tolerance must be > 0");
  auto gap = [&](double eta_bob) {
    const EveReport rep = compare_eve_bob(ProtocolConfig{r, eta_alice, eta_bob, 1.0});
    return rep.eve_total() - rep.bob_total();
  };
  auto root = bisect(gap, 0.0, 1.0, tol);
  if (!root) throw NoCrossoverError("Eve and Bob noises never cross on eta_bob in [0, 1]");
  return *root;
}

enum class Regime { BelowClassical, ClassicalBoundary, Intermediate, Secure };

/// F < 1/2, F == 1/2, 1/2 < F < 2/3, F >= 2/3.
inline Regime classify_regime(double f) {
  detail::require(f >= 0.0 && f <= 1.0, "fidelity must lie in [0, 1]");
  if (f < 0.5) return Regime::BelowClassical;
  if (f == 0.5) return Regime::ClassicalBoundary;
  if (f < 2.0 / 3.0) return Regime::Intermediate;
  return Regime::Secure;
}

/// Regime of a fidelity as printed. Classifying the 12-digit value keeps the
/// label consistent with the number next to it; 0.49999999999999994 prints
/// as 0.5 and is labelled ClassicalBoundary.
inline Regime reported_regime(double fidelity) {
  return classify_regime(round_significant(fidelity));
}

inline std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::BelowClassical:
      return "BelowClassical";
    case Regime::ClassicalBoundary:
      return "ClassicalBoundary";
    case Regime::Intermediate:
      return "Intermediate";
    case Regime::Secure:
      return "Secure";
  }
  return "Unknown";
}

inline Regime parse_regime(std::string_view label) {
  for (Regime r :
       {Regime::BelowClassical, Regime::ClassicalBoundary, Regime::Intermediate, Regime::Secure}) {
    if (to_string(r) == label) return r;
  }
  throw std::invalid_argument("unknown regime label: " + std::string(label));
}

}  // namespace cvtele
