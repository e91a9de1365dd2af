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
#include <stdexcept>
#include <utility>
#include <vector>

namespace hsm {

enum class ValuationFamily { reciprocal, custom_table };

/// A per-channel marginal-valuation family. The value of the k-th marginal
/// channel for an operator of a given scalar type. Values are nonincreasing
/// in k (diminishing returns) and strictly increasing in the type.
///
/// Built-ins:
///  - reciprocal:   value(type, k) = scale * type / k
///  - custom_table: value(type, k) = coeff[k-1] * type  (zero beyond the table)
///
/// Out-of-support types are an error, never clamped.
class ValuationProfile {
 public:
  static ValuationProfile reciprocal(double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("reciprocal profile needs scale > 0");
    ValuationProfile p;
    p.family_ = ValuationFamily::reciprocal;
    p.scale_ = scale;
    return p;
  }

  /// Arbitrary per-channel coefficients; rows need not be monotone so that
  /// regularity violations can be constructed in tests.
  static ValuationProfile custom_table(std::vector<double> coeffs) {
    if (coeffs.empty()) throw std::invalid_argument("custom table must not be empty");
    for (double c : coeffs)
      if (!(c >= 0.0)) throw std::invalid_argument("custom table coefficients must be >= 0");
    ValuationProfile p;
    p.family_ = ValuationFamily::custom_table;
    p.scale_ = 1.0;
    p.coeffs_ = std::move(coeffs);
    return p;
  }

  ValuationFamily family() const { return family_; }
  double scale() const { return scale_; }

  double value(double type, int k) const {
    check_args(type, k);
    if (family_ == ValuationFamily::reciprocal) return scale_ * type / k;
    return coeff(k) * type;
  }

  /// d value / d type, supplied analytically for both families.
  double derivative(double type, int k) const {
    check_args(type, k);
    if (family_ == ValuationFamily::reciprocal) return scale_ / k;
    return coeff(k);
  }

 private:
  ValuationProfile() = default;

  static void check_args(double type, int k) {
    if (k < 1) throw std::invalid_argument("channel index k must be >= 1");
    if (!(type > 0.0) || !std::isfinite(type))
      throw std::domain_error("type outside the open support (0, max]");
  }

  double coeff(int k) const {
    return static_cast<std::size_t>(k) <= coeffs_.size() ? coeffs_[k - 1] : 0.0;
  }

  ValuationFamily family_ = ValuationFamily::reciprocal;
  double scale_ = 1.0;
  std::vector<double> coeffs_;
};

/// Marginal valuation of the k-th channel for the given type.
inline double marginal_value(const ValuationProfile& profile, double type, int k) {
  return profile.value(type, k);
}

}  // namespace hsm
