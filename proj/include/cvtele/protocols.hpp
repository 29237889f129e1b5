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

// The two teleportation schemes: classical measure-and-reconstruct, and
// EPR-assisted teleportation with finite squeezing, per-arm losses and an
// adjustable feedforward gain.
//
// Both share the same measurement station. The input is mixed 50:50 with a
// "meter" mode (fresh vacuum classically, Alice's EPR beam otherwise), X is
// read on one output port and Y on the other, and the readings are rescaled
// so the input enters each with unit coefficient.

#include <cmath>
#include <optional>

#include "cvtele/fidelity.hpp"
#include "cvtele/gaussian_core.hpp"

namespace cvtele {

struct ProtocolConfig {
  double r = 0.0;          // squeezing parameter of the EPR source
  double eta_alice = 1.0;  // transmission of Alice's EPR arm
  double eta_bob = 1.0;    // transmission of Bob's EPR arm
  double gain = 1.0;       // end-to-end gain g_T: mean_out = gain * mean_in

  void validate() const {
    detail::require(r >= 0.0 && std::isfinite(r), "squeezing parameter must be finite and >= 0");
    detail::require(eta_alice >= 0.0 && eta_alice <= 1.0, "eta_alice must lie in [0, 1]");
    detail::require(eta_bob >= 0.0 && eta_bob <= 1.0, "eta_bob must lie in [0, 1]");
    detail::require(gain >= 0.0 && std::isfinite(gain), "gain must be finite and >= 0");
  }
};

/// Input-referred added noise of a teleportation channel, plus output means.
struct TeleportReport {
  double n_x_out = 0.0;
  double n_y_out = 0.0;
  double gain = 1.0;
  double mean_x_out = 0.0;
  double mean_y_out = 0.0;
  std::optional<double> fidelity_at_unity_gain;  // set iff gain == 1
};

struct MeasurementReport {
  double n_x_m = 0.0;
  double n_y_m = 0.0;
  double measured_mean_x = 0.0;
  double measured_mean_y = 0.0;
};

struct NoisePair {
  double n_x = 0.0;
  double n_y = 0.0;
};

/// variance(out - gain * input) / gain^2 for each quadrature. The subtraction
/// is symbolic, so every term the output shares with the input cancels.
inline NoisePair equivalent_input_noise(const QuadratureForm& out_x, const QuadratureForm& out_y,
                                        const Mode& input, double gain) {
  detail::require(gain != 0.0 && std::isfinite(gain),
                  "equivalent input noise needs a finite nonzero gain");
  QuadratureForm dx = out_x;
  dx.axpy(-gain, input.x);
  QuadratureForm dy = out_y;
  dy.axpy(-gain, input.y);
  const double g2 = gain * gain;
  return NoisePair{variance(dx) / g2, variance(dy) / g2};
}

/// Output of the dual-homodyne station.
struct DualHomodyne {
  QuadratureForm x_m;
  QuadratureForm y_m;
};

/// Which beamsplitter output port the X homodyne reads; Y reads the other.
enum class XPort { First, Second };

/// Mixes input with meter on a 50:50 splitter and reads X and Y on opposite
/// ports. Each reading is divided by the port's input coefficient, giving
///   XPort::First:  X_m = X_in + X_meter,  Y_m = Y_in - Y_meter
///   XPort::Second: X_m = X_in - X_meter,  Y_m = Y_in + Y_meter
inline DualHomodyne dual_homodyne(const Mode& input, const Mode& meter, XPort x_port) {
  constexpr double kSplit = 0.5;
  auto [first, second] = beamsplitter(input, meter, kSplit);
  // Input coefficient is sqrt(t) on the first port and sqrt(1 - t) on the second.
  const double c_first = std::sqrt(kSplit);
  const double c_second = std::sqrt(1.0 - kSplit);
  if (x_port == XPort::First) {
    return DualHomodyne{first.x / c_first, second.y / c_second};
  }
  return DualHomodyne{second.x / c_second, first.y / c_first};
}

struct ClassicalMeasurement {
  MeasurementReport report;
  QuadratureForm x_m;
  QuadratureForm y_m;
};

/// Splits the input against vacuum and measures X and Y. The reported noises
/// are the full spread of the readings, so input-mode noise counts together
/// with the splitting noise.
inline ClassicalMeasurement classical_measurement(Context& ctx, const Mode& input) {
  DualHomodyne readout = dual_homodyne(input, make_vacuum(ctx), XPort::First);
  MeasurementReport report{variance(readout.x_m), variance(readout.y_m), mean(readout.x_m),
                           mean(readout.y_m)};
  return ClassicalMeasurement{report, std::move(readout.x_m), std::move(readout.y_m)};
}

namespace detail {

inline TeleportReport make_report(const Mode& output, const Mode& input, double gain) {
  const NoisePair n = equivalent_input_noise(output.x, output.y, input, gain);
  TeleportReport report{n.n_x, n.n_y, gain, mean(output.x), mean(output.y), std::nullopt};
  if (gain == 1.0) report.fidelity_at_unity_gain = fidelity_unity_gain(n.n_x, n.n_y);
  return report;
}

}  // namespace detail

/// Measure, then displace a fresh vacuum by gain times the readings:
///   X_out = X_v2 + g (X_in + X_v1),  Y_out = Y_v2 + g (Y_in - Y_v1).
inline TeleportReport classical_teleport(Context& ctx, const Mode& input, double gain = 1.0) {
  detail::require(gain > 0.0 && std::isfinite(gain), "gain must be finite and > 0");
  ClassicalMeasurement m = classical_measurement(ctx, input);
  Mode output = feedforward(make_vacuum(ctx), m.x_m, m.y_m, gain);
  return detail::make_report(output, input, gain);
}

/// EPR pair from an X-squeezed and a Y-squeezed vacuum on a 50:50 splitter.
/// X1 - X2 and Y1 + Y2 both have variance 2 e^{-2r}.
inline std::pair<Mode, Mode> epr_source(Context& ctx, double r) {
  detail::require(r >= 0.0 && std::isfinite(r), "squeezing parameter must be finite and >= 0");
  Mode y_squeezed = make_squeezed(ctx, r, Axis::Y);
  Mode x_squeezed = make_squeezed(ctx, r, Axis::X);
  return beamsplitter(y_squeezed, x_squeezed, 0.5);
}

/// Every mode and reading of one EPR teleportation run, kept so the security
/// analysis can evaluate rival reconstructions on the same noise sources.
struct EprNetwork {
  Mode input;
  Mode alice_beam;  // Alice's EPR beam after her arm loss
  Mode bob_beam;    // Bob's EPR beam after his arm loss
  Mode alice_tap;   // loss port of Alice's arm
  Mode bob_tap;     // loss port of Bob's arm
  QuadratureForm x_m;
  QuadratureForm y_m;
  Mode output;  // Bob's reconstruction
  double gain = 1.0;
};

inline EprNetwork build_epr_network(Context& ctx, const ProtocolConfig& config, const Mode& input) {
  config.validate();
  detail::require(config.gain > 0.0, "gain must be > 0 to define the equivalent input noise");
  auto [beam1, beam2] = epr_source(ctx, config.r);
  LossPorts alice = loss(beam1, config.eta_alice, ctx);
  LossPorts bob = loss(beam2, config.eta_bob, ctx);
  // The EPR beams carry correlated X and anticorrelated Y, so reading X on the
  // second port makes the meter enter as -X_A and +Y_A, cancelling against
  // Bob's +X_B and +Y_B at unit gain.
  DualHomodyne readout = dual_homodyne(input, alice.transmitted, XPort::Second);
  Mode output = feedforward(bob.transmitted, readout.x_m, readout.y_m, config.gain);
  return EprNetwork{input,
                    std::move(alice.transmitted),
                    std::move(bob.transmitted),
                    std::move(alice.tapped),
                    std::move(bob.tapped),
                    std::move(readout.x_m),
                    std::move(readout.y_m),
                    std::move(output),
                    config.gain};
}

/// EPR teleportation; Bob's output is X_out = X_B + g (X_in - X_A),
/// Y_out = Y_B + g (Y_in + Y_A). The beams are zero-mean, so the end-to-end
/// gain equals the feedforward gain for every loss setting.
inline TeleportReport epr_teleport(Context& ctx, const ProtocolConfig& config, const Mode& input) {
  EprNetwork net = build_epr_network(ctx, config, input);
  return detail::make_report(net.output, net.input, net.gain);
}

/// First and second moments of the teleported state for a coherent input.
struct OutputMoments {
  double mean_x = 0.0;
  double mean_y = 0.0;
  double var_x = 1.0;
  double var_y = 1.0;
};

/// The output noise is uncorrelated with the input, so for a vacuum-variance
/// input var(out) = gain^2 (1 + N).
inline OutputMoments coherent_output_moments(const TeleportReport& report) {
  const double g2 = report.gain * report.gain;
  return OutputMoments{report.mean_x_out, report.mean_y_out, g2 * (1.0 + report.n_x_out),
                       g2 * (1.0 + report.n_y_out)};
}

/// Fidelity of the teleported state with the coherent input (x_a, y_a), valid
/// at any gain.
inline double coherent_output_fidelity(const TeleportReport& report, double x_a, double y_a) {
  if (report.fidelity_at_unity_gain) return *report.fidelity_at_unity_gain;
  const OutputMoments m = coherent_output_moments(report);
  return fidelity_output_state(m.mean_x, m.mean_y, m.var_x, m.var_y, x_a, y_a);
}

}  // namespace cvtele
