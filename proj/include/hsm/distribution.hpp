#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The hsm authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "hsm/rng.hpp"

namespace hsm {

enum class DistributionKind { uniform, custom };

/// Type distribution on the open-below support (0, upper]. Supplies the cdf F,
/// density f and the hazard ratio (1-F)/f used by bidder contributions.
class TypeDistribution {
 public:
  static TypeDistribution uniform(double upper) {
    if (!(upper > 0.0) || !std::isfinite(upper))
      throw std::invalid_argument("uniform distribution needs finite upper > 0");
    TypeDistribution d;
    d.kind_ = DistributionKind::uniform;
    d.upper_ = upper;
    d.mean_ = 0.5 * upper;
    return d;
  }

  static TypeDistribution custom(double upper, std::function<double(double)> cdf,
                                 std::function<double(double)> pdf, double mean) {
    if (!(upper > 0.0) || !std::isfinite(upper))
      throw std::invalid_argument("custom distribution needs finite upper > 0");
    TypeDistribution d;
    d.kind_ = DistributionKind::custom;
    d.upper_ = upper;
    d.mean_ = mean;
    d.cdf_ = std::move(cdf);
    d.pdf_ = std::move(pdf);
    return d;
  }

  DistributionKind kind() const { return kind_; }
  double upper() const { return upper_; }
  double mean() const { return mean_; }
  double median() const { return quantile(0.5); }

  bool contains(double x) const { return x > 0.0 && x <= upper_; }

  double cdf(double x) const {
    if (kind_ == DistributionKind::uniform) return x <= 0.0 ? 0.0 : (x >= upper_ ? 1.0 : x / upper_);
    return cdf_(x);
  }

  double pdf(double x) const {
    if (kind_ == DistributionKind::uniform) return 1.0 / upper_;
    return pdf_(x);
  }

  /// (1 - F(x)) / f(x); throws when the density vanishes.
  double hazard_ratio(double x) const {
    const double f = pdf(x);
    if (!(f > 0.0)) throw std::domain_error("density is zero: contribution singular");
    return (1.0 - cdf(x)) / f;
  }

  /// Inverse cdf by bisection (exact for the uniform family).
  double quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile needs q in [0,1]");
    if (kind_ == DistributionKind::uniform) return q * upper_;
    double lo = 0.0, hi = upper_;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * upper_; ++it) {
      const double mid = 0.5 * (lo + hi);
      (cdf(mid) >= q ? hi : lo) = mid;
    }
    return hi;
  }

  double sample(Rng& rng) const {
    if (kind_ == DistributionKind::uniform) return draw_open_below(rng, upper_);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double q = 1.0 - u01(rng);  // in (0, 1]
    return quantile(q);
  }

 private:
  TypeDistribution() = default;

  DistributionKind kind_ = DistributionKind::uniform;
  double upper_ = 1.0;
  double mean_ = 0.5;
  std::function<double(double)> cdf_;
  std::function<double(double)> pdf_;
};

}  // namespace hsm
