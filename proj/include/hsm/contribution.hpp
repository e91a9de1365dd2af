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

#include <optional>
#include <stdexcept>
#include <string>

#include "hsm/distribution.hpp"
#include "hsm/valuation.hpp"

namespace hsm {

/// Contribution (virtual valuation) of a bidder for the k-th channel:
/// the marginal expected revenue of awarding it.
///
///   pi_k(b) = U_k(b) - U_k'(b) * (1 - F(b)) / f(b)
inline double contribution(const ValuationProfile& so_profile, const TypeDistribution& so_dist,
                           int k, double bid) {
  if (!so_dist.contains(bid)) throw std::domain_error("bid outside the type support");
  return so_profile.value(bid, k) - so_profile.derivative(bid, k) * so_dist.hazard_ratio(bid);
}

/// Balanced contribution used by the revenue/welfare-balanced auction:
///
///   pi_k^beta(b) = (1 + beta) U_k(b) - U_k'(b) * (1 - F(b)) / f(b)
///                = pi_k(b) + beta * U_k(b)
inline double beta_contribution(const ValuationProfile& so_profile, const TypeDistribution& so_dist,
                                int k, double bid, double beta) {
  if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
  if (!so_dist.contains(bid)) throw std::domain_error("bid outside the type support");
  return (1.0 + beta) * so_profile.value(bid, k) -
         so_profile.derivative(bid, k) * so_dist.hazard_ratio(bid);
}

struct RegularityReport {
  bool regular = true;
  // First violation, when not regular.
  std::string what;
  int k = 0;
  double type_at = 0.0;

  explicit operator bool() const { return regular; }
};

/// Grid check of the regularity conditions for the beta-contributions:
/// strictly increasing in the type for every k <= k_max, and nonincreasing in
/// k wherever the contribution is positive (negative scores never win, so
/// monotonicity in k is only required where it can matter).
inline RegularityReport check_regularity(const ValuationProfile& so_profile,
                                         const TypeDistribution& so_dist, double beta,
                                         int grid_resolution, int k_max) {
  if (grid_resolution < 2) throw std::invalid_argument("grid_resolution must be >= 2");
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");

  RegularityReport rep;
  const double upper = so_dist.upper();
  auto grid_point = [&](int g) { return upper * (g + 1) / static_cast<double>(grid_resolution); };

  for (int k = 1; k <= k_max; ++k) {
    // rows with no valuation at all (e.g. past the end of a custom table)
    // cannot win a channel and are exempt from the type-monotonicity demand
    if (so_profile.value(so_dist.upper(), k) == 0.0) continue;
    double prev = beta_contribution(so_profile, so_dist, k, grid_point(0), beta);
    for (int g = 1; g < grid_resolution; ++g) {
      const double cur = beta_contribution(so_profile, so_dist, k, grid_point(g), beta);
      if (!(cur > prev)) {
        rep.regular = false;
        rep.what = "beta-contribution not strictly increasing in type";
        rep.k = k;
        rep.type_at = grid_point(g);
        return rep;
      }
      prev = cur;
    }
  }
  for (int g = 0; g < grid_resolution; ++g) {
    const double t = grid_point(g);
    double prev = beta_contribution(so_profile, so_dist, 1, t, beta);
    for (int k = 2; k <= k_max; ++k) {
      const double cur = beta_contribution(so_profile, so_dist, k, t, beta);
      if (cur > 0.0 && cur > prev) {
        rep.regular = false;
        rep.what = "positive beta-contribution increasing in k";
        rep.k = k;
        rep.type_at = t;
        return rep;
      }
      prev = cur;
    }
  }
  return rep;
}

/// Minimum bid whose k-th beta-contribution reaches `cutoff`:
///
///   inf { a in (0, upper] : pi_k^beta(a) >= cutoff }
///
/// Returns 0.0 (the support infimum) when the contribution clears the cutoff
/// down to the lower end, and nullopt when even the supremum type falls short.
/// Bisection to 1e-9 absolute on the type axis, 200 iterations cap; requires
/// a regular (monotone) contribution.
inline std::optional<double> threshold_bid(const ValuationProfile& so_profile,
                                           const TypeDistribution& so_dist, int k, double beta,
                                           double cutoff) {
  const double upper = so_dist.upper();
  const double probe = upper * 1e-12;
  const double at_top = beta_contribution(so_profile, so_dist, k, upper, beta);
  const double at_bottom = beta_contribution(so_profile, so_dist, k, probe, beta);
  {
    // coarse monotonicity scan; bisection is meaningless on a folded function
    double prev = at_bottom;
    for (int g = 1; g <= 16; ++g) {
      const double cur = beta_contribution(so_profile, so_dist, k, upper * g / 16.0, beta);
      if (cur < prev)
        throw std::runtime_error("contribution not increasing in type: threshold undefined");
      prev = cur;
    }
  }
  if (at_top < cutoff) return std::nullopt;
  if (at_bottom >= cutoff) return 0.0;

  double lo = probe, hi = upper;
  for (int it = 0; it < 200 && hi - lo > 1e-9; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (beta_contribution(so_profile, so_dist, k, mid, beta) >= cutoff)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace hsm
