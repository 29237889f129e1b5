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

// The `cvtele` command line.
//
// Every command builds a document and renders it as aligned text, CSV or
// JSON ("structured"). Standard output gets text unless --format is given
// without --out; --out receives the chosen format, defaulting to CSV for
// sweeps and JSON otherwise.
//
// Exit codes: 0 success, 1 failed verification, 2 invalid flags or values,
// 3 output path not writable.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <variant>
#include <vector>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <nlohmann/json.hpp>

#include "cvtele/fidelity.hpp"
#include "cvtele/format.hpp"
#include "cvtele/protocols.hpp"
#include "cvtele/security.hpp"
#include "cvtele/sweep.hpp"
#include "cvtele/verify.hpp"

namespace cvtele::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitOutput = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { Text, Csv, Structured };
enum class Scheme { Classical, Epr };

// ---------------------------------------------------------------- values

inline double parse_real(std::string_view text, std::string_view flag) {
  const auto v = parse_number(text);
  if (!v || !std::isfinite(*v)) {
    throw UsageError(std::string(flag) + ": not a finite number: '" + std::string(text) + "'");
  }
  return *v;
}

inline std::uint64_t parse_count(std::string_view text, std::string_view flag) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw UsageError(std::string(flag) + ": not a non-negative integer: '" + std::string(text) +
                     "'");
  }
  return v;
}

inline std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

/// Comma-separated values, each either a number or an inclusive range
/// start:stop:step, e.g. "0,0.5:2:0.5".
inline std::vector<double> parse_list(std::string_view text, std::string_view flag) {
  std::vector<double> values;
  for (const std::string& item : split(text, ',')) {
    const std::vector<std::string> range = split(item, ':');
    if (range.size() == 1) {
      values.push_back(parse_real(item, flag));
      continue;
    }
    if (range.size() != 3) {
      throw UsageError(std::string(flag) + ": ranges are start:stop:step, got '" + item + "'");
    }
    const double start = parse_real(range[0], flag);
    const double stop = parse_real(range[1], flag);
    const double step = parse_real(range[2], flag);
    if (!(step > 0.0) || stop < start) {
      throw UsageError(std::string(flag) + ": range needs step > 0 and stop >= start");
    }
    const double span = (stop - start) / step;
    if (span > 1e6) throw UsageError(std::string(flag) + ": range has too many points");
    // Tolerate the rounding in e.g. (0.9 - 0.1) / 0.1.
    const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    // Snap each point to its printed value so 0.1 + 2 * 0.1 runs as 0.3.
    for (std::size_t i = 0; i < count; ++i) {
      values.push_back(round_significant(start + static_cast<double>(i) * step));
    }
  }
  return values;
}

inline std::pair<double, double> parse_alpha(std::string_view text) {
  const std::vector<std::string> parts = split(text, ',');
  if (parts.size() != 2) throw UsageError("--alpha: expected x,y, got '" + std::string(text) + "'");
  return {parse_real(parts[0], "--alpha"), parse_real(parts[1], "--alpha")};
}

inline Format parse_format(std::string_view text) {
  if (text == "text") return Format::Text;
  if (text == "csv") return Format::Csv;
  if (text == "structured") return Format::Structured;
  throw UsageError("--format: expected text, csv or structured, got '" + std::string(text) + "'");
}

inline Scheme parse_scheme(std::string_view text) {
  if (text == "classical") return Scheme::Classical;
  if (text == "epr") return Scheme::Epr;
  throw UsageError("--scheme: expected classical or epr, got '" + std::string(text) + "'");
}

// ------------------------------------------------------------- documents

using Value = std::variant<std::nullptr_t, bool, double, std::string>;

/// Flat ordered key/value report for single runs.
class Document {
 public:
  Document& add(std::string key, Value value) {
    fields_.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  const std::vector<std::pair<std::string, Value>>& fields() const { return fields_; }

 private:
  std::vector<std::pair<std::string, Value>> fields_;
};

inline std::string to_text(const Value& v) {
  struct Visitor {
    std::string operator()(std::nullptr_t) const { return "none"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

inline nlohmann::ordered_json json_number(double d) {
  if (!std::isfinite(d)) return format_number(d);
  return round_significant(d);
}

inline nlohmann::ordered_json to_json(const Value& v) {
  struct Visitor {
    nlohmann::ordered_json operator()(std::nullptr_t) const { return nullptr; }
    nlohmann::ordered_json operator()(bool b) const { return b; }
    nlohmann::ordered_json operator()(double d) const { return json_number(d); }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

inline void render(const Document& doc, Format format, std::ostream& os) {
  switch (format) {
    case Format::Text: {
      std::size_t width = 0;
      for (const auto& [key, value] : doc.fields()) width = std::max(width, key.size());
      for (const auto& [key, value] : doc.fields()) {
        os << key << std::string(width + 2 - key.size(), ' ') << to_text(value) << '\n';
      }
      break;
    }
    case Format::Csv:
      os << "field,value\n";
      for (const auto& [key, value] : doc.fields()) {
        os << csv_cell(key) << ','
           << (std::holds_alternative<std::nullptr_t>(value) ? std::string()
                                                             : csv_cell(to_text(value)))
           << '\n';
      }
      break;
    case Format::Structured: {
      nlohmann::ordered_json j = nlohmann::ordered_json::object();
      for (const auto& [key, value] : doc.fields()) j[key] = to_json(value);
      os << j.dump(2) << '\n';
      break;
    }
  }
}

// ---------------------------------------------------------------- flags

struct Flags {
  std::optional<std::string> scheme, r, eta, eta_alice, eta_bob, gain, alpha, mc_samples, seed, out,
      format, tolerance;
  bool crossover = false;
  bool conditional = false;
};

/// Where a command's document goes.
struct OutputPlan {
  Format stdout_format = Format::Text;
  std::optional<Format> file_format;
  std::optional<std::string> path;
};

inline OutputPlan plan_output(const Flags& f, Format file_default) {
  OutputPlan plan;
  const std::optional<Format> chosen =
      f.format ? std::optional<Format>(parse_format(*f.format)) : std::nullopt;
  if (f.out) {
    if (f.out->empty()) throw UsageError("--out: empty path");
    plan.path = *f.out;
    plan.file_format = chosen.value_or(file_default);
  } else if (chosen) {
    plan.stdout_format = *chosen;
  }
  return plan;
}

/// Opens the output file before any work is done so a bad path fails fast.
inline std::optional<std::ofstream> open_output(const OutputPlan& plan) {
  if (!plan.path) return std::nullopt;
  std::ofstream file(*plan.path, std::ios::binary | std::ios::trunc);
  if (!file) throw OutputError("cannot write to '" + *plan.path + "'");
  return file;
}

inline void finish_output(std::optional<std::ofstream>& file, const OutputPlan& plan) {
  if (!file) return;
  file->flush();
  if (!*file) throw OutputError("write to '" + *plan.path + "' failed");
}

/// Writes the document to stdout and, when planned, to the output file.
template <typename Renderer>
void emit(const OutputPlan& plan, std::ostream& out, Renderer&& renderer) {
  std::optional<std::ofstream> file = open_output(plan);
  renderer(plan.stdout_format, out);
  if (file) {
    renderer(*plan.file_format, *file);
    finish_output(file, plan);
  }
}

struct ArmFlags {
  double eta_alice = 1.0;
  double eta_bob = 1.0;
};

inline double parse_transmission(std::string_view text, std::string_view flag) {
  const double eta = parse_real(text, flag);
  if (eta < 0.0 || eta > 1.0) throw UsageError(std::string(flag) + " must lie in [0, 1]");
  return eta;
}

inline ArmFlags arms(const Flags& f) {
  const double eta = f.eta ? parse_transmission(*f.eta, "--eta") : 1.0;
  return ArmFlags{f.eta_alice ? parse_transmission(*f.eta_alice, "--eta-alice") : eta,
                  f.eta_bob ? parse_transmission(*f.eta_bob, "--eta-bob") : eta};
}

inline double tolerance_flag(const Flags& f, double fallback) {
  if (!f.tolerance) return fallback;
  const double t = parse_real(*f.tolerance, "--tolerance");
  if (t < 0.0) throw UsageError("--tolerance must be >= 0");
  return t;
}

inline std::size_t mc_flag(const Flags& f, std::size_t fallback, bool allow_zero) {
  const std::size_t n = f.mc_samples ? parse_count(*f.mc_samples, "--mc-samples") : fallback;
  if ((n != 0 || !allow_zero) && n < 1000) {
    throw UsageError(allow_zero ? "--mc-samples must be 0 or >= 1000"
                                : "--mc-samples must be >= 1000");
  }
  return n;
}

inline constexpr std::uint64_t kDefaultSeed = 20260415;

// ------------------------------------------------------------- commands

inline int cmd_teleport(const Flags& f, std::ostream& out) {
  const Scheme scheme = parse_scheme(f.scheme.value_or("epr"));
  if (scheme == Scheme::Classical && (f.r || f.eta || f.eta_alice || f.eta_bob)) {
    throw UsageError("--r and --eta* apply only to --scheme epr");
  }
  const auto [x_a, y_a] = parse_alpha(f.alpha.value_or("1,1"));
  const double gain = f.gain ? parse_real(*f.gain, "--gain") : 1.0;
  const std::size_t mc = mc_flag(f, 0, true);
  const std::uint64_t seed = f.seed ? parse_count(*f.seed, "--seed") : kDefaultSeed;
  const double sigmas = tolerance_flag(f, 4.0);
  const OutputPlan plan = plan_output(f, Format::Structured);

  Document doc;
  Context ctx;
  const Mode input = make_coherent(ctx, x_a, y_a);
  TeleportReport report;
  if (scheme == Scheme::Classical) {
    if (!(gain > 0.0)) throw UsageError("--gain must be > 0");
    doc.add("scheme", std::string("classical"));
    doc.add("alpha_x", x_a).add("alpha_y", y_a).add("gain", gain);
    Context mctx;
    const MeasurementReport m = classical_measurement(mctx, make_coherent(mctx, x_a, y_a)).report;
    doc.add("n_x_m", m.n_x_m).add("n_y_m", m.n_y_m);
    doc.add("measured_mean_x", m.measured_mean_x).add("measured_mean_y", m.measured_mean_y);
    doc.add("classical_fidelity", classical_fidelity(m.n_x_m, m.n_y_m));
    report = classical_teleport(ctx, input, gain);
  } else {
    const ArmFlags a = arms(f);
    const ProtocolConfig config{f.r ? parse_real(*f.r, "--r") : 1.0, a.eta_alice, a.eta_bob, gain};
    config.validate();
    if (!(gain > 0.0)) throw UsageError("--gain must be > 0");
    doc.add("scheme", std::string("epr"));
    doc.add("alpha_x", x_a).add("alpha_y", y_a);
    doc.add("r", config.r).add("eta_alice", config.eta_alice).add("eta_bob", config.eta_bob);
    doc.add("gain", gain);
    report = epr_teleport(ctx, config, input);
  }
  const double fidelity = coherent_output_fidelity(report, x_a, y_a);
  doc.add("n_x_out", report.n_x_out).add("n_y_out", report.n_y_out);
  doc.add("mean_x_out", report.mean_x_out).add("mean_y_out", report.mean_y_out);
  doc.add("fidelity_at_unity_gain",
          report.fidelity_at_unity_gain ? Value(*report.fidelity_at_unity_gain) : Value(nullptr));
  doc.add("fidelity", fidelity);
  doc.add("regime", std::string(to_string(reported_regime(fidelity))));

  if (mc > 0) {
    const OutputMoments m = coherent_output_moments(report);
    doc.add("mc_samples", static_cast<double>(mc)).add("seed", static_cast<double>(seed));
    if (m.var_x >= 1.0 && m.var_y >= 1.0) {
      const FidelityEstimate e = fidelity_monte_carlo(
          {m.mean_x, m.mean_y, m.var_x - 1.0, m.var_y - 1.0}, x_a, y_a, mc, seed);
      doc.add("fidelity_mc", e.monte_carlo).add("fidelity_mc_std_error", e.std_error);
      doc.add("fidelity_mc_z", e.z_score())
          .add("fidelity_mc_within_tolerance", e.z_score() <= sigmas);
    } else {
      // Narrower than vacuum: not a mixture of coherent states, nothing to sample.
      doc.add("fidelity_mc", nullptr);
    }
  }

  emit(plan, out, [&](Format fmt, std::ostream& os) { render(doc, fmt, os); });
  return kExitOk;
}

inline SweepSpec sweep_spec(const Flags& f) {
  if (f.scheme && parse_scheme(*f.scheme) != Scheme::Epr) {
    throw UsageError("sweep covers the epr scheme only");
  }
  SweepSpec spec;
  spec.r_values = parse_list(f.r.value_or("0,0.25,0.5,1,2"), "--r");
  spec.eta_values = parse_list(f.eta.value_or("1"), "--eta");
  spec.gain_values = parse_list(f.gain.value_or("1"), "--gain");
  if (f.eta_alice) spec.eta_alice = parse_transmission(*f.eta_alice, "--eta-alice");
  if (f.eta_bob) spec.eta_bob = parse_transmission(*f.eta_bob, "--eta-bob");
  std::tie(spec.x_a, spec.y_a) = parse_alpha(f.alpha.value_or("1,1"));
  spec.mc_samples = mc_flag(f, 0, true);
  spec.seed = f.seed ? parse_count(*f.seed, "--seed") : kDefaultSeed;
  spec.validate();
  return spec;
}

inline void render_sweep(const SweepResult& result, double sigmas, Format format,
                         std::ostream& os) {
  static constexpr std::string_view kColumns[] = {
      "r",        "eta_alice",   "eta_bob",     "gain",     "n_x_out", "n_y_out",
      "fidelity", "n_eve_total", "n_bob_total", "eve_wins", "regime"};
  switch (format) {
    case Format::Csv:
      write_sweep_csv(os, result.rows);
      return;
    case Format::Structured: {
      nlohmann::ordered_json j;
      j["rows"] = nlohmann::ordered_json::array();
      for (const SweepRow& row : result.rows) {
        nlohmann::ordered_json o;
        o["r"] = json_number(row.r);
        o["eta_alice"] = json_number(row.eta_alice);
        o["eta_bob"] = json_number(row.eta_bob);
        o["gain"] = json_number(row.gain);
        o["n_x_out"] = json_number(row.n_x_out);
        o["n_y_out"] = json_number(row.n_y_out);
        o["fidelity"] = json_number(row.fidelity);
        o["n_eve_total"] = json_number(row.n_eve_total);
        o["n_bob_total"] = json_number(row.n_bob_total);
        o["eve_wins"] = row.eve_wins;
        o["regime"] = to_string(row.regime);
        j["rows"].push_back(std::move(o));
      }
      if (result.monte_carlo) {
        j["monte_carlo"] = {{"rows_checked", result.monte_carlo->rows_checked},
                            {"worst_z", json_number(result.monte_carlo->worst_z)},
                            {"within_tolerance", result.monte_carlo->worst_z <= sigmas}};
      }
      os << j.dump(2) << '\n';
      return;
    }
    case Format::Text: {
      std::vector<std::vector<std::string>> cells;
      cells.emplace_back(std::begin(kColumns), std::end(kColumns));
      for (const SweepRow& row : result.rows) {
        cells.push_back({format_number(row.r), format_number(row.eta_alice),
                         format_number(row.eta_bob), format_number(row.gain),
                         format_number(row.n_x_out), format_number(row.n_y_out),
                         format_number(row.fidelity), format_number(row.n_eve_total),
                         format_number(row.n_bob_total), row.eve_wins ? "true" : "false",
                         std::string(to_string(row.regime))});
      }
      std::vector<std::size_t> width(std::size(kColumns), 0);
      for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
      }
      for (const auto& line : cells) {
        for (std::size_t c = 0; c < line.size(); ++c) {
          os << line[c];
          if (c + 1 < line.size()) os << std::string(width[c] + 2 - line[c].size(), ' ');
        }
        os << '\n';
      }
      if (result.monte_carlo) {
        os << "monte carlo: " << result.monte_carlo->rows_checked << " rows checked, worst "
           << format_number(result.monte_carlo->worst_z) << " SE (tolerance "
           << format_number(sigmas) << " SE)\n";
      }
      return;
    }
  }
}

inline int cmd_sweep(const Flags& f, std::ostream& out) {
  const SweepSpec spec = sweep_spec(f);
  const double sigmas = tolerance_flag(f, 4.0);
  const OutputPlan plan = plan_output(f, Format::Csv);
  std::optional<std::ofstream> file = open_output(plan);
  const SweepResult result = run_sweep(spec);
  render_sweep(result, sigmas, plan.stdout_format, out);
  if (file) {
    render_sweep(result, sigmas, *plan.file_format, *file);
    finish_output(file, plan);
  }
  return kExitOk;
}

inline void render_verify(const std::vector<CheckResult>& results, const VerifyOptions& options,
                          Format format, std::ostream& os) {
  std::size_t passed = 0;
  for (const CheckResult& r : results) passed += r.passed ? 1 : 0;
  switch (format) {
    case Format::Text: {
      std::size_t width = 0;
      for (const CheckResult& r : results) width = std::max(width, r.name.size());
      for (const CheckResult& r : results) {
        os << (r.passed ? "[PASS] " : "[FAIL] ") << (r.id < 10 ? " " : "") << r.id << ' ' << r.name
           << std::string(width + 2 - r.name.size(), ' ') << "worst "
           << format_number(r.worst_deviation) << ' ' << r.unit << " (bound "
           << format_number(r.bound) << ")  " << format_number(r.seconds) << " s (limit "
           << format_number(r.time_limit) << " s)  " << r.detail << '\n';
      }
      os << passed << '/' << results.size() << " checks passed\n";
      return;
    }
    case Format::Csv:
      os << "id,name,status,worst_deviation,bound,unit,seconds,time_limit,detail\n";
      for (const CheckResult& r : results) {
        os << r.id << ',' << csv_cell(r.name) << ',' << (r.passed ? "pass" : "fail") << ','
           << format_number(r.worst_deviation) << ',' << format_number(r.bound) << ',' << r.unit
           << ',' << format_number(r.seconds) << ',' << format_number(r.time_limit) << ','
           << csv_cell(r.detail) << '\n';
      }
      return;
    case Format::Structured: {
      nlohmann::ordered_json j;
      j["passed"] = passed == results.size();
      j["mc_samples"] = options.mc_samples;
      j["seed"] = options.seed;
      j["tolerance"] = json_number(options.sigmas);
      j["checks"] = nlohmann::ordered_json::array();
      for (const CheckResult& r : results) {
        j["checks"].push_back({{"id", r.id},
                               {"name", r.name},
                               {"passed", r.passed},
                               {"worst_deviation", json_number(r.worst_deviation)},
                               {"bound", json_number(r.bound)},
                               {"unit", r.unit},
                               {"seconds", json_number(r.seconds)},
                               {"time_limit", json_number(r.time_limit)},
                               {"detail", r.detail}});
      }
      os << j.dump(2) << '\n';
      return;
    }
  }
}

inline int cmd_verify(const Flags& f, std::ostream& out) {
  VerifyOptions options;
  options.mc_samples = mc_flag(f, options.mc_samples, false);
  options.seed = f.seed ? parse_count(*f.seed, "--seed") : options.seed;
  options.sigmas = tolerance_flag(f, options.sigmas);
  const OutputPlan plan = plan_output(f, Format::Structured);
  std::optional<std::ofstream> file = open_output(plan);
  const std::vector<CheckResult> results = run_verification(options);
  render_verify(results, options, plan.stdout_format, out);
  if (file) {
    render_verify(results, options, *plan.file_format, *file);
    finish_output(file, plan);
  }
  return all_passed(results) ? kExitOk : kExitCheckFailed;
}

inline int cmd_security(const Flags& f, std::ostream& out) {
  const ArmFlags a = arms(f);
  const ProtocolConfig config{f.r ? parse_real(*f.r, "--r") : 1.0, a.eta_alice, a.eta_bob,
                              f.gain ? parse_real(*f.gain, "--gain") : 1.0};
  config.validate();
  if (!(config.gain > 0.0)) throw UsageError("--gain must be > 0");
  const auto [x_a, y_a] = parse_alpha(f.alpha.value_or("1,1"));
  const double tol = tolerance_flag(f, 1e-8);
  if (!(tol > 0.0) || tol >= 0.5) throw UsageError("--tolerance must lie in (0, 0.5) here");
  const OutputPlan plan = plan_output(f, Format::Structured);
  const bool all = !f.crossover && !f.conditional;

  Document doc;
  doc.add("r", config.r).add("eta_alice", config.eta_alice).add("eta_bob", config.eta_bob);
  if (all) {
    doc.add("gain", config.gain).add("alpha_x", x_a).add("alpha_y", y_a);
    const EveReport eve = compare_eve_bob(config, x_a, y_a);
    doc.add("n_x_eve", eve.n_x_eve).add("n_y_eve", eve.n_y_eve).add("gain_eve", eve.gain_eve);
    doc.add("n_x_bob", eve.n_x_bob).add("n_y_bob", eve.n_y_bob).add("gain_bob", eve.gain_bob);
    doc.add("n_eve_total", eve.eve_total()).add("n_bob_total", eve.bob_total());
    doc.add("eve_wins", eve.eve_wins);
    Context ctx;
    const TeleportReport bob = epr_teleport(ctx, config, make_coherent(ctx, x_a, y_a));
    const double fidelity = coherent_output_fidelity(bob, x_a, y_a);
    doc.add("bob_fidelity", fidelity);
    doc.add("regime", std::string(to_string(reported_regime(fidelity))));
  }
  if (all || f.crossover) {
    doc.add("crossover_tolerance", tol);
    Value eta_star = nullptr;
    if (config.r > 0.0) {
      try {
        eta_star = find_eve_crossover(config.r, tol, config.eta_alice);
      } catch (const NoCrossoverError&) {
      }
    }
    doc.add("crossover_eta_bob", eta_star);
  }
  if (all || f.conditional) {
    const double cv = epr_conditional_variance(config.r, config.eta_alice, config.eta_bob);
    doc.add("conditional_variance", cv).add("conditional_below_shot_noise", cv < 1.0);
    Value threshold = nullptr;
    if (config.r > 0.0) {
      try {
        threshold = find_conditional_threshold(config.r, tol);
      } catch (const NoCrossoverError&) {
      }
    }
    doc.add("conditional_threshold_eta", threshold);
  }

  emit(plan, out, [&](Format fmt, std::ostream& os) { render(doc, fmt, os); });
  return kExitOk;
}

// ---------------------------------------------------------------- entry

inline void add_output_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--out", f.out, "Write the document to PATH");
  cmd->add_option("--format", f.format, "text, csv or structured");
}

inline void add_config_flags(CLI::App* cmd, Flags& f, bool lists) {
  const char* hint = lists ? " (list: a,b or start:stop:step)" : "";
  cmd->add_option("--r", f.r, std::string("Squeezing parameter") + hint);
  cmd->add_option("--eta", f.eta, std::string("Transmission of both arms") + hint);
  cmd->add_option("--eta-alice", f.eta_alice, "Transmission of Alice's arm");
  cmd->add_option("--eta-bob", f.eta_bob, "Transmission of Bob's arm");
  cmd->add_option("--gain", f.gain, std::string("Feedforward gain") + hint);
  cmd->add_option("--alpha", f.alpha, "Coherent input quadratures x,y");
}

/// Runs one command line (without the program name). Output and diagnostics
/// go to the given streams; the return value is the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Continuous-variable quantum teleportation through lossy channels", "cvtele"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* teleport = app.add_subcommand("teleport", "Teleport one coherent state");
  teleport->add_option("--scheme", f.scheme, "classical or epr (default epr)");
  add_config_flags(teleport, f, false);
  teleport->add_option("--mc-samples", f.mc_samples, "Monte Carlo fidelity samples (0 = off)");
  teleport->add_option("--seed", f.seed, "Monte Carlo seed");
  teleport->add_option("--tolerance", f.tolerance, "Monte Carlo agreement bound in SE");
  add_output_flags(teleport, f);

  CLI::App* sweep = app.add_subcommand("sweep", "Evaluate the EPR channel on a grid");
  sweep->add_option("--scheme", f.scheme, "epr (the only swept scheme)");
  add_config_flags(sweep, f, true);
  sweep->add_option("--mc-samples", f.mc_samples, "Per-row Monte Carlo samples (0 = off)");
  sweep->add_option("--seed", f.seed, "Monte Carlo seed");
  sweep->add_option("--tolerance", f.tolerance, "Monte Carlo agreement bound in SE");
  add_output_flags(sweep, f);

  CLI::App* verify = app.add_subcommand("verify", "Run the self-check suite");
  verify->add_option("--mc-samples", f.mc_samples, "Samples per Monte Carlo case (>= 1000)");
  verify->add_option("--seed", f.seed, "Monte Carlo seed");
  verify->add_option("--tolerance", f.tolerance, "Monte Carlo agreement bound in SE");
  add_output_flags(verify, f);

  CLI::App* security = app.add_subcommand("security", "Eavesdropper and conditioning analysis");
  add_config_flags(security, f, false);
  security->add_flag("--crossover", f.crossover, "Only the Eve/Bob crossover in eta_bob");
  security->add_flag("--conditional", f.conditional, "Only the conditional-variance check");
  security->add_option("--tolerance", f.tolerance, "Bisection tolerance");
  add_output_flags(security, f);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (teleport->parsed()) return cmd_teleport(f, out);
    if (sweep->parsed()) return cmd_sweep(f, out);
    if (verify->parsed()) return cmd_verify(f, out);
    return cmd_security(f, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const OutputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitOutput;
  }
}

}  // namespace cvtele::cli
