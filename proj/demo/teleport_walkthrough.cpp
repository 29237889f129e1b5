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

// A tour of the library on a handful of channels. The last block samples
// the added noise to check one closed-form fidelity.

#include <cstddef>
#include <cstdio>
#include <string>

#include "cvtele/fidelity.hpp"
#include "cvtele/format.hpp"
#include "cvtele/gaussian_core.hpp"
#include "cvtele/protocols.hpp"
#include "cvtele/security.hpp"

using namespace cvtele;

int main() {
  const double x_a = 1.0, y_a = -0.5;

  {
    Context ctx;
    const TeleportReport rep = classical_teleport(ctx, make_coherent(ctx, x_a, y_a));
    std::printf("classical: N = %s, %s  F = %s\n", format_number(rep.n_x_out).c_str(),
                format_number(rep.n_y_out).c_str(),
                format_number(*rep.fidelity_at_unity_gain).c_str());
  }

  std::printf("\nlossless EPR channel at unity gain\n");
  for (double r : {0.0, 0.35, 1.0, 2.0}) {
    Context ctx;
    const TeleportReport rep =
        epr_teleport(ctx, ProtocolConfig{r, 1.0, 1.0, 1.0}, make_coherent(ctx, x_a, y_a));
    const double f = *rep.fidelity_at_unity_gain;
    std::printf("  r = %-5s N = %-16s F = %-16s %s\n", format_number(r).c_str(),
                format_number(rep.n_x_out).c_str(), format_number(f).c_str(),
                std::string(to_string(reported_regime(f))).c_str());
  }

  std::printf("\nr = 1, Bob's arm loses light to Eve\n");
  for (double eta : {0.3, 0.5, 0.7}) {
    const EveReport rep = compare_eve_bob(ProtocolConfig{1.0, 1.0, eta, 1.0}, x_a, y_a);
    std::printf("  eta_bob = %-4s Eve %-16s Bob %-16s %s\n", format_number(eta).c_str(),
                format_number(rep.eve_total()).c_str(), format_number(rep.bob_total()).c_str(),
                rep.eve_wins                         ? "Eve has the better copy"
                : rep.eve_total() == rep.bob_total() ? "tie"
                                                     : "Bob has the better copy");
  }
  std::printf("  crossover at eta_bob = %s\n",
              format_number(find_eve_crossover(1.0, 1e-9)).c_str());

  // The fidelity averages the overlap over the noise the channel adds, so
  // sample out - in and shift it back to the input amplitude.
  const ProtocolConfig lossy{0.8, 0.9, 0.9, 1.0};
  Context ctx;
  const Mode input = make_coherent(ctx, x_a, y_a);
  const EprNetwork net = build_epr_network(ctx, lossy, input);
  const SampleMatrix noise = sample({net.output.x - input.x, net.output.y - input.y}, 200000, 11);
  double total = 0.0;
  for (std::size_t i = 0; i < noise.rows(); ++i) {
    total += overlap(x_a + noise(i, 0), y_a + noise(i, 1), x_a, y_a);
  }
  Context ref_ctx;
  const TeleportReport rep = epr_teleport(ref_ctx, lossy, make_coherent(ref_ctx, x_a, y_a));
  std::printf("\nr = 0.8, eta = 0.9: sampled fidelity %s, closed form %s\n",
              format_number(total / static_cast<double>(noise.rows())).c_str(),
              format_number(*rep.fidelity_at_unity_gain).c_str());
  return 0;
}
