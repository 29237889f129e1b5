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

// Exact linear-Gaussian algebra over quadrature observables.
//
// Every quadrature is carried as an affine form
//
//     offset + sum_i c_i * s_i
//
// over mutually independent, zero-mean Gaussian noise sources s_i owned by a
// Context. First and second moments then follow exactly from the
// coefficients; optical elements act linearly on the forms, so correlations
// (e.g. between an EPR beam and the classical measurement that is fed forward
// onto its partner) are tracked symbolically with no sampling involved.
//
// Units: vacuum quadrature variance is 1, and a coherent state |alpha> with
// alpha = (x_a + i y_a) / 2 has quadrature means (x_a, y_a).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cvtele {

namespace detail {

inline void require(bool condition, const char* message) {
  if (!condition) throw std::domain_error(message);
}

// Variances of the sources registered in one context, indexed by id.
struct SourceRegistry {
  std::vector<double> variances;
};

}  // namespace detail

/// Identifier of a noise source, unique within its Context.
struct SourceId {
  std::uint32_t value = 0;

  friend constexpr auto operator<=>(SourceId, SourceId) = default;
};

/// A zero-mean Gaussian random variable; variance 1 is one unit of shot noise.
struct NoiseSource {
  SourceId id;
  double variance = 0.0;
};

/// Owns the noise sources that forms refer to.
///
/// Context is a cheap handle: copies share the same registry, so forms built
/// through any copy are mutually compatible. Sources are only ever appended.
class Context {
 public:
  Context() : registry_(std::make_shared<detail::SourceRegistry>()) {}

  SourceId add_source(double variance) {
    detail::require(variance >= 0.0 && std::isfinite(variance),
                    "noise source variance must be finite and >= 0");
    registry_->variances.push_back(variance);
    return SourceId{static_cast<std::uint32_t>(registry_->variances.size() - 1)};
  }

  NoiseSource source(SourceId id) const {
    detail::require(id.value < registry_->variances.size(), "unknown noise source");
    return NoiseSource{id, registry_->variances[id.value]};
  }

  std::size_t num_sources() const { return registry_->variances.size(); }

  const std::shared_ptr<detail::SourceRegistry>& registry() const { return registry_; }

  friend bool operator==(const Context& a, const Context& b) { return a.registry_ == b.registry_; }

 private:
  std::shared_ptr<detail::SourceRegistry> registry_;
};

/// One term `coefficient * source` of a QuadratureForm.
struct Term {
  SourceId source;
  double coefficient = 0.0;

  friend bool operator==(const Term&, const Term&) = default;
};

/// A real affine combination of independent Gaussian noise sources.
///
/// Terms are kept sorted by source id with exact zeros dropped. A form with no
/// terms is a deterministic constant and is compatible with every context.
class QuadratureForm {
 public:
  QuadratureForm() = default;
  explicit QuadratureForm(double offset) : offset_(offset) {}

  /// The bare source `id` of `ctx`, with unit coefficient.
  static QuadratureForm source(const Context& ctx, SourceId id) {
    detail::require(id.value < ctx.num_sources(), "unknown noise source");
    QuadratureForm f;
    f.registry_ = ctx.registry();
    f.terms_.push_back(Term{id, 1.0});
    return f;
  }

  double offset() const { return offset_; }
  std::span<const Term> terms() const { return terms_; }
  bool is_constant() const { return terms_.empty(); }

  double coefficient(SourceId id) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), id,
                               [](const Term& t, SourceId s) { return t.source < s; });
    return (it != terms_.end() && it->source == id) ? it->coefficient : 0.0;
  }

  const detail::SourceRegistry* registry() const { return registry_.get(); }

  QuadratureForm& operator+=(const QuadratureForm& other) { return axpy(1.0, other); }
  QuadratureForm& operator-=(const QuadratureForm& other) { return axpy(-1.0, other); }

  QuadratureForm& operator*=(double scale) {
    offset_ *= scale;
    for (Term& t : terms_) t.coefficient *= scale;
    drop_zeros();
    return *this;
  }

  QuadratureForm& operator/=(double divisor) {
    detail::require(divisor != 0.0, "division of a quadrature form by zero");
    offset_ /= divisor;
    for (Term& t : terms_) t.coefficient /= divisor;
    drop_zeros();
    return *this;
  }

  QuadratureForm& operator+=(double shift) {
    offset_ += shift;
    return *this;
  }

  QuadratureForm& operator-=(double shift) {
    offset_ -= shift;
    return *this;
  }

  /// this += scale * other, merging terms source by source.
  QuadratureForm& axpy(double scale, const QuadratureForm& other) {
    adopt_registry(other);
    offset_ += scale * other.offset_;
    std::vector<Term> merged;
    merged.reserve(terms_.size() + other.terms_.size());
    auto a = terms_.begin();
    auto b = other.terms_.begin();
    while (a != terms_.end() || b != other.terms_.end()) {
      if (b == other.terms_.end() || (a != terms_.end() && a->source < b->source)) {
        merged.push_back(*a++);
      } else if (a == terms_.end() || b->source < a->source) {
        merged.push_back(Term{b->source, scale * b->coefficient});
        ++b;
      } else {
        merged.push_back(Term{a->source, a->coefficient + scale * b->coefficient});
        ++a;
        ++b;
      }
    }
    terms_ = std::move(merged);
    drop_zeros();
    return *this;
  }

  friend QuadratureForm operator+(QuadratureForm a, const QuadratureForm& b) { return a += b; }
  friend QuadratureForm operator-(QuadratureForm a, const QuadratureForm& b) { return a -= b; }
  friend QuadratureForm operator*(double s, QuadratureForm f) { return f *= s; }
  friend QuadratureForm operator*(QuadratureForm f, double s) { return f *= s; }
  friend QuadratureForm operator/(QuadratureForm f, double s) { return f /= s; }
  friend QuadratureForm operator+(QuadratureForm f, double s) { return f += s; }
  friend QuadratureForm operator-(QuadratureForm f, double s) { return f -= s; }
  friend QuadratureForm operator-(QuadratureForm f) { return f *= -1.0; }

  friend bool operator==(const QuadratureForm& a, const QuadratureForm& b) {
    return a.offset_ == b.offset_ && a.terms_ == b.terms_ &&
           (a.is_constant() || a.registry_ == b.registry_);
  }

 private:
  void adopt_registry(const QuadratureForm& other) {
    if (other.terms_.empty()) return;
    if (terms_.empty()) {
      registry_ = other.registry_;
      return;
    }
    detail::require(registry_ == other.registry_, "quadrature forms belong to different contexts");
  }

  void drop_zeros() {
    std::erase_if(terms_, [](const Term& t) { return t.coefficient == 0.0; });
    if (terms_.empty()) registry_.reset();
  }

  double offset_ = 0.0;
  std::vector<Term> terms_;
  std::shared_ptr<const detail::SourceRegistry> registry_;
};

inline double mean(const QuadratureForm& f) { return f.offset(); }

/// Exact covariance from the coefficients; throws std::domain_error if the
/// forms come from different contexts.
inline double covariance(const QuadratureForm& f1, const QuadratureForm& f2) {
  if (f1.is_constant() || f2.is_constant()) return 0.0;
  detail::require(f1.registry() == f2.registry(), "quadrature forms belong to different contexts");
  const std::vector<double>& var = f1.registry()->variances;
  const std::span<const Term> t1 = f1.terms();
  const std::span<const Term> t2 = f2.terms();
  double sum = 0.0;
  auto a = t1.begin();
  auto b = t2.begin();
  while (a != t1.end() && b != t2.end()) {
    if (a->source < b->source) {
      ++a;
    } else if (b->source < a->source) {
      ++b;
    } else {
      sum += a->coefficient * b->coefficient * var[a->source.value];
      ++a;
      ++b;
    }
  }
  return sum;
}

inline double variance(const QuadratureForm& f) { return covariance(f, f); }

// ---------------------------------------------------------------------------
// Modes and optical elements.

enum class Axis { X, Y };

/// One optical mode: its two quadrature observables.
struct Mode {
  QuadratureForm x;
  QuadratureForm y;
};

/// a * m1 + b * m2, quadrature by quadrature.
inline Mode combine(double a, const Mode& m1, double b, const Mode& m2) {
  Mode out{a * m1.x, a * m1.y};
  out.x.axpy(b, m2.x);
  out.y.axpy(b, m2.y);
  return out;
}

/// Vacuum: two fresh unit-variance sources, zero mean.
inline Mode make_vacuum(Context& ctx) {
  SourceId sx = ctx.add_source(1.0);
  SourceId sy = ctx.add_source(1.0);
  return Mode{QuadratureForm::source(ctx, sx), QuadratureForm::source(ctx, sy)};
}

inline Mode displace(const Mode& m, double dx, double dy) { return Mode{m.x + dx, m.y + dy}; }

/// Coherent state with quadrature means (x_a, y_a).
inline Mode make_coherent(Context& ctx, double x_a, double y_a) {
  return displace(make_vacuum(ctx), x_a, y_a);
}

/// Squeezed vacuum: variance e^{-2r} on `squeezed_axis`, e^{+2r} on the other.
inline Mode make_squeezed(Context& ctx, double r, Axis squeezed_axis) {
  detail::require(r >= 0.0 && std::isfinite(r), "squeezing parameter must be finite and >= 0");
  const double squeezed = std::exp(-2.0 * r);
  const double anti = std::exp(2.0 * r);
  SourceId sx = ctx.add_source(squeezed_axis == Axis::X ? squeezed : anti);
  SourceId sy = ctx.add_source(squeezed_axis == Axis::X ? anti : squeezed);
  return Mode{QuadratureForm::source(ctx, sx), QuadratureForm::source(ctx, sy)};
}

/// Lossless beamsplitter with intensity transmission t:
///   out1 = sqrt(t) m1 + sqrt(1-t) m2
///   out2 = sqrt(1-t) m1 - sqrt(t) m2
inline std::pair<Mode, Mode> beamsplitter(const Mode& m1, const Mode& m2, double t) {
  detail::require(t >= 0.0 && t <= 1.0, "beamsplitter transmission must lie in [0, 1]");
  const double tr = std::sqrt(t);
  const double rf = std::sqrt(1.0 - t);
  return {combine(tr, m1, rf, m2), combine(rf, m1, -tr, m2)};
}

struct LossPorts {
  Mode transmitted;
  Mode tapped;
};

/// Transmission eta against a fresh vacuum. The tapped port is what an
/// eavesdropper holding the loss channel receives.
inline LossPorts loss(const Mode& m, double eta, Context& ctx) {
  detail::require(eta >= 0.0 && eta <= 1.0, "transmission efficiency must lie in [0, 1]");
  auto [transmitted, tapped] = beamsplitter(m, make_vacuum(ctx), eta);
  return LossPorts{std::move(transmitted), std::move(tapped)};
}

/// m displaced by g times the measured forms. Symbolic, so any correlation
/// between m and the measurement survives exactly.
inline Mode feedforward(const Mode& m, const QuadratureForm& measured_x,
                        const QuadratureForm& measured_y, double g) {
  Mode out = m;
  out.x.axpy(g, measured_x);
  out.y.axpy(g, measured_y);
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo sampling backend.

/// n joint draws of k forms, stored column by column.
class SampleMatrix {
 public:
  SampleMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t row, std::size_t col) const { return data_[col * rows_ + row]; }
  double& operator()(std::size_t row, std::size_t col) { return data_[col * rows_ + row]; }

  std::span<const double> column(std::size_t col) const {
    return std::span<const double>(data_).subspan(col * rows_, rows_);
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

/// Draws every source the forms depend on once per row and evaluates each
/// form on that draw. Deterministic for a fixed seed.
inline SampleMatrix sample(std::span<const QuadratureForm> forms, std::size_t n,
                           std::uint64_t seed) {
  detail::require(n >= 1, "sample count must be >= 1");

  const detail::SourceRegistry* registry = nullptr;
  std::vector<SourceId> used;
  for (const QuadratureForm& f : forms) {
    if (f.is_constant()) continue;
    detail::require(registry == nullptr || registry == f.registry(),
                    "quadrature forms belong to different contexts");
    registry = f.registry();
    for (const Term& t : f.terms()) used.push_back(t.source);
  }
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());

  std::vector<double> stddev(used.size());
  for (std::size_t i = 0; i < used.size(); ++i) {
    stddev[i] = std::sqrt(registry->variances[used[i].value]);
  }

  // Map each form's terms onto positions in `used`.
  std::vector<std::vector<std::pair<std::size_t, double>>> plan(forms.size());
  for (std::size_t k = 0; k < forms.size(); ++k) {
    for (const Term& t : forms[k].terms()) {
      auto pos = std::lower_bound(used.begin(), used.end(), t.source) - used.begin();
      plan[k].emplace_back(static_cast<std::size_t>(pos), t.coefficient);
    }
  }

  SampleMatrix out(n, forms.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> draw(used.size());
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t i = 0; i < used.size(); ++i) draw[i] = stddev[i] * normal(rng);
    for (std::size_t k = 0; k < forms.size(); ++k) {
      double value = forms[k].offset();
      for (auto [pos, c] : plan[k]) value += c * draw[pos];
      out(row, k) = value;
    }
  }
  return out;
}

inline SampleMatrix sample(std::initializer_list<QuadratureForm> forms, std::size_t n,
                           std::uint64_t seed) {
  return sample(std::span<const QuadratureForm>(forms.begin(), forms.size()), n, seed);
}

}  // namespace cvtele
