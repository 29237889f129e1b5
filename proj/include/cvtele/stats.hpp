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

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>

namespace cvtele {

/// A Monte Carlo estimate and its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;

  /// |value - reference| in units of the standard error (0 when both vanish).
  double z_score(double reference) const {
    const double dev = std::abs(value - reference);
    if (dev == 0.0) return 0.0;
    return std_error > 0.0 ? dev / std_error : INFINITY;
  }
};

/// Welford accumulator for mean and sample variance.
class RunningMoments {
 public:
  void push(double v) {
    ++n_;
    const double delta = v - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (v - mean_);
  }

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double sample_variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }

  Estimate mean_estimate() const {
    return Estimate{mean_, std::sqrt(sample_variance() / static_cast<double>(n_))};
  }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline Estimate estimate_mean(std::span<const double> xs) {
  RunningMoments m;
  for (double x : xs) m.push(x);
  return m.mean_estimate();
}

/// Sample covariance of paired draws, with the standard error taken from the
/// spread of the centered products (valid for any finite fourth moment).
inline Estimate estimate_covariance(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("estimate_covariance needs two equal-length samples of size >= 2");
  }
  const double mx = estimate_mean(xs).value;
  const double my = estimate_mean(ys).value;
  RunningMoments products;
  for (std::size_t i = 0; i < xs.size(); ++i) products.push((xs[i] - mx) * (ys[i] - my));
  const double n = static_cast<double>(xs.size());
  Estimate e = products.mean_estimate();
  e.value *= n / (n - 1.0);
  return e;
}

inline Estimate estimate_variance(std::span<const double> xs) {
  return estimate_covariance(xs, xs);
}

/// Bisection for a sign change of f on [lo, hi]. Returns nullopt unless f(lo)
/// and f(hi) are nonzero with opposite signs.
inline std::optional<double> bisect(const std::function<double(double)>& f, double lo, double hi,
                                    double tol) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0 || fhi == 0.0 || (flo < 0.0) == (fhi < 0.0)) return std::nullopt;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace cvtele
