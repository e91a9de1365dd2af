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

#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "hsm/contribution.hpp"
#include "hsm/distribution.hpp"
#include "hsm/valuation.hpp"

namespace hsm {

/// One three-layer market: a controller holding `channels` identical channels,
/// `po_types.size()` primary operators, and the same number of secondary
/// operators in the monopoly market under each PO.
struct MarketInstance {
  int channels = 1;                            // K
  std::vector<double> po_types;                // p_j
  std::vector<std::vector<double>> so_types;   // alpha_{j,i}, one row per PO
  ValuationProfile po_profile;
  ValuationProfile so_profile;
  TypeDistribution so_dist;
  double po_type_upper = 0.0;                  // P_max (types live in (0, P_max])
  double beta = 0.0;

  int po_count() const { return static_cast<int>(po_types.size()); }
  int so_count() const { return so_types.empty() ? 0 : static_cast<int>(so_types.front().size()); }

  static MarketInstance make(int channels, std::vector<double> po_types,
                             std::vector<std::vector<double>> so_types,
                             ValuationProfile po_profile, ValuationProfile so_profile,
                             TypeDistribution so_dist, double po_type_upper, double beta) {
    MarketInstance m{channels, std::move(po_types), std::move(so_types),
                     std::move(po_profile), std::move(so_profile), std::move(so_dist),
                     po_type_upper, beta};
    m.validate();
    return m;
  }

  void validate() const {
    if (channels < 1) throw std::invalid_argument("need at least one channel");
    if (po_types.empty()) throw std::invalid_argument("need at least one PO");
    if (so_types.size() != po_types.size())
      throw std::invalid_argument("one SO row per PO required");
    if (beta < 0.0) throw std::invalid_argument("beta must be >= 0");
    for (double p : po_types)
      if (!(p > 0.0) || (po_type_upper > 0.0 && p > po_type_upper))
        throw std::invalid_argument("PO type outside its support");
    const std::size_t n = so_types.front().size();
    for (const auto& row : so_types) {
      if (row.size() != n) throw std::invalid_argument("SO count must be uniform across POs");
      for (double a : row)
        if (!so_dist.contains(a)) throw std::invalid_argument("SO type outside its support");
    }
  }
};

/// Integer channel split: k_c (received per PO), k_0 (reserved per PO) and
/// k_s (sold per PO x SO), with k_0[j] + sum_i k_s[j][i] == k_c[j] and
/// sum_j k_c[j] <= K.
struct Allocation {
  std::vector<int> k_c;
  std::vector<int> k_0;
  std::vector<std::vector<int>> k_s;

  int total_po() const { return std::accumulate(k_0.begin(), k_0.end(), 0); }
  int total_so() const {
    int t = 0;
    for (const auto& row : k_s) t += std::accumulate(row.begin(), row.end(), 0);
    return t;
  }
  int total() const { return total_po() + total_so(); }

  static Allocation empty(int pos, int sos) {
    Allocation a;
    a.k_c.assign(pos, 0);
    a.k_0.assign(pos, 0);
    a.k_s.assign(pos, std::vector<int>(sos, 0));
    return a;
  }

  void validate(const MarketInstance& m) const {
    const auto M = static_cast<std::size_t>(m.po_count());
    if (k_c.size() != M || k_0.size() != M || k_s.size() != M)
      throw std::logic_error("allocation shape does not match the market");
    int total_c = 0;
    for (std::size_t j = 0; j < M; ++j) {
      if (k_c[j] < 0 || k_0[j] < 0) throw std::logic_error("negative channel count");
      int sold = 0;
      for (int s : k_s[j]) {
        if (s < 0) throw std::logic_error("negative channel count");
        sold += s;
      }
      if (k_0[j] + sold != k_c[j])
        throw std::logic_error("reserved + sold != received for a PO");
      total_c += k_c[j];
    }
    if (total_c > m.channels) throw std::logic_error("allocation exceeds channel supply");
  }
};

/// Combined valuation-revenue objective of PO j: the value of the reserved
/// channels plus the realized stage-2 revenue.
inline double po_objective(const MarketInstance& m, int j, const Allocation& alloc,
                           std::span<const double> stage2_payments_j) {
  alloc.validate(m);
  double v = 0.0;
  for (int k = 1; k <= alloc.k_0[j]; ++k) v += m.po_profile.value(m.po_types[j], k);
  for (double h : stage2_payments_j) v += h;
  return v;
}

/// Controller objective C(beta) evaluated with the contribution surrogate for
/// the revenue component: reserved valuations plus the winning SOs' plain
/// contributions plus beta times their raw valuations.
inline double co_objective(const MarketInstance& m, const Allocation& alloc) {
  alloc.validate(m);
  double c = 0.0;
  for (int j = 0; j < m.po_count(); ++j) {
    for (int k = 1; k <= alloc.k_0[j]; ++k) c += m.po_profile.value(m.po_types[j], k);
    for (int i = 0; i < m.so_count(); ++i) {
      const double a = m.so_types[j][i];
      for (int k = 1; k <= alloc.k_s[j][i]; ++k) {
        c += contribution(m.so_profile, m.so_dist, k, a);
        c += m.beta * m.so_profile.value(a, k);
      }
    }
  }
  return c;
}

/// Aggregate raw valuation (POs + SOs) of an allocation; the efficiency
/// yardstick used by the benchmark comparisons.
inline double aggregate_valuation(const MarketInstance& m, const Allocation& alloc) {
  double w = 0.0;
  for (int j = 0; j < m.po_count(); ++j) {
    for (int k = 1; k <= alloc.k_0[j]; ++k) w += m.po_profile.value(m.po_types[j], k);
    for (int i = 0; i < m.so_count(); ++i)
      for (int k = 1; k <= alloc.k_s[j][i]; ++k) w += m.so_profile.value(m.so_types[j][i], k);
  }
  return w;
}

/// End-to-end result of one pipeline run.
struct MarketReport {
  Allocation allocation;
  std::vector<double> stage1_payments;               // Q or Q_R per PO
  std::vector<std::vector<double>> stage2_payments;  // h per PO x SO
  std::vector<double> reimbursements;                // L_j per PO
  std::vector<double> net_payments;                  // Lambda_j per PO
  std::vector<double> revenue;                       // realized H_j per PO

  double po_valuation = 0.0;        // sum of reserved-channel valuations
  double so_valuation = 0.0;        // sum of sold-channel raw valuations
  double co_objective_value = 0.0;  // C(beta), contribution surrogate
  double co_objective_realized = 0.0;  // C(beta) with realized payments as H
};

}  // namespace hsm
