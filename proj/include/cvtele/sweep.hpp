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

// Grid evaluation of the EPR channel and its CSV form.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "cvtele/fidelity.hpp"
#include "cvtele/format.hpp"
#include "cvtele/protocols.hpp"
#include "cvtele/security.hpp"

namespace cvtele {

struct SweepSpec {
  std::vector<double> r_values{1.0};
  std::vector<double> eta_values{1.0};
  std::vector<double> gain_values{1.0};
  double x_a = 1.0;
  double y_a = 1.0;
  // Pin one arm; the eta list then drives the other one only.
  std::optional<double> eta_alice;
  std::optional<double> eta_bob;
  std::size_t mc_samples = 0;  // 0 skips the Monte Carlo cross-check
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0 picks the hardware concurrency

  std::size_t size() const { return r_values.size() * eta_values.size() * gain_values.size(); }

  /// Grid point i in r-outer, eta-middle, gain-inner order.
  ProtocolConfig config_at(std::size_t i) const {
    const std::size_t ng = gain_values.size();
    const std::size_t ne = eta_values.size();
    const double eta = eta_values[(i / ng) % ne];
    return ProtocolConfig{r_values[i / (ng * ne)], eta_alice.value_or(eta), eta_bob.value_or(eta),
                          gain_values[i % ng]};
  }

  void validate() const {
    detail::require(!r_values.empty() && !eta_values.empty() && !gain_values.empty(),
                    "sweep lists must be non-empty");
    detail::require(std::isfinite(x_a) && std::isfinite(y_a), "input amplitude must be finite");
    detail::require(mc_samples == 0 || mc_samples >= 1000, "mc_samples must be 0 or >= 1000");
    for (std::size_t i = 0; i < size(); ++i) {
      const ProtocolConfig c = config_at(i);
      c.validate();
      detail::require(c.gain > 0.0, "gain must be > 0");
    }
  }
};

struct SweepRow {
  double r = 0.0;
  double eta_alice = 1.0;
  double eta_bob = 1.0;
  double gain = 1.0;
  double n_x_out = 0.0;
  double n_y_out = 0.0;
  double fidelity = 0.0;
  double n_eve_total = 0.0;
  double n_bob_total = 0.0;
  bool eve_wins = false;
  Regime regime = Regime::BelowClassical;

  bool operator==(const SweepRow&) const = default;
};

inline constexpr std::string_view kSweepHeader =
    "r,eta_alice,eta_bob,gain,n_x_out,n_y_out,fidelity,n_eve_total,n_bob_total,eve_wins,regime";

inline SweepRow evaluate_row(const ProtocolConfig& config, double x_a, double y_a) {
  Context ctx;
  const Mode input = make_coherent(ctx, x_a, y_a);
  const TeleportReport bob = epr_teleport(ctx, config, input);
  const EveReport eve = compare_eve_bob(config, x_a, y_a);
  const double f = coherent_output_fidelity(bob, x_a, y_a);
  return SweepRow{
      config.r, config.eta_alice, config.eta_bob,  config.gain,  bob.n_x_out,       bob.n_y_out,
      f,        eve.eve_total(),  eve.bob_total(), eve.eve_wins, reported_regime(f)};
}

/// Per-row agreement between sampled and closed-form fidelity. Rows whose
/// output is narrower than vacuum have no sampling representation and are
/// skipped.
struct SweepMonteCarlo {
  std::size_t rows_checked = 0;
  double worst_z = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<SweepMonteCarlo> monte_carlo;
};

inline SweepResult run_sweep(const SweepSpec& spec) {
  spec.validate();
  const std::size_t n = spec.size();
  std::vector<SweepRow> rows(n);
  std::vector<double> z(n, -1.0);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const ProtocolConfig config = spec.config_at(i);
        rows[i] = evaluate_row(config, spec.x_a, spec.y_a);
        if (spec.mc_samples == 0) continue;
        Context ctx;
        const Mode input = make_coherent(ctx, spec.x_a, spec.y_a);
        const OutputMoments m = coherent_output_moments(epr_teleport(ctx, config, input));
        if (m.var_x < 1.0 || m.var_y < 1.0) continue;
        const FidelityEstimate e =
            fidelity_monte_carlo({m.mean_x, m.mean_y, m.var_x - 1.0, m.var_y - 1.0}, spec.x_a,
                                 spec.y_a, spec.mc_samples, spec.seed + i);
        z[i] = Estimate{e.monte_carlo, e.std_error}.z_score(e.closed_form);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  unsigned threads =
      spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  SweepResult result{std::move(rows), std::nullopt};
  if (spec.mc_samples > 0) {
    SweepMonteCarlo mc;
    for (double zi : z) {
      if (zi < 0.0) continue;
      ++mc.rows_checked;
      mc.worst_z = std::max(mc.worst_z, zi);
    }
    result.monte_carlo = mc;
  }
  return result;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const SweepRow& row : rows) {
    os << format_number(row.r) << ',' << format_number(row.eta_alice) << ','
       << format_number(row.eta_bob) << ',' << format_number(row.gain) << ','
       << format_number(row.n_x_out) << ',' << format_number(row.n_y_out) << ','
       << format_number(row.fidelity) << ',' << format_number(row.n_eve_total) << ','
       << format_number(row.n_bob_total) << ',' << (row.eve_wins ? "true" : "false") << ','
       << to_string(row.regime) << '\n';
  }
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  write_sweep_csv(os, rows);
  return os.str();
}

/// Inverse of write_sweep_csv. Throws std::runtime_error on a wrong header or
/// a malformed row.
inline std::vector<SweepRow> read_sweep_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kSweepHeader) {
    throw std::runtime_error("sweep csv: missing or unexpected header");
  }
  std::vector<SweepRow> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    auto fail = [&](const std::string& what) {
      return std::runtime_error("sweep csv line " + std::to_string(line_no) + ": " + what);
    };
    if (cells.size() != 11) throw fail("expected 11 fields");
    double v[9];
    for (int k = 0; k < 9; ++k) {
      auto parsed = parse_number(cells[k]);
      if (!parsed) throw fail("not a number: " + cells[k]);
      v[k] = *parsed;
    }
    if (cells[9] != "true" && cells[9] != "false") throw fail("eve_wins must be true or false");
    SweepRow row{v[0],
                 v[1],
                 v[2],
                 v[3],
                 v[4],
                 v[5],
                 v[6],
                 v[7],
                 v[8],
                 cells[9] == "true",
                 Regime::BelowClassical};
    try {
      row.regime = parse_regime(cells[10]);
    } catch (const std::invalid_argument& e) {
      throw fail(e.what());
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cvtele
