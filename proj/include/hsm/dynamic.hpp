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

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "hsm/auction.hpp"
#include "hsm/market.hpp"
#include "hsm/mechanism.hpp"
#include "hsm/rng.hpp"

namespace hsm {

enum class AverageKind { mean, median };

/// Slotted time: every period the controller re-allocates once using the
/// average secondary demand, then the POs redistribute in each of the T slots
/// against freshly drawn SO types. Draws are reproducible from the seed.
struct DynamicSchedule {
  int periods = 1;
  int slots_per_period = 1;  // T
  std::uint64_t seed = 0;

  void validate() const {
    if (periods < 1 || slots_per_period < 1)
      throw std::invalid_argument("schedule needs at least one period and one slot");
  }
};

struct SlotReport {
  std::vector<std::vector<double>> so_types;     // realized alpha^t
  Allocation allocation;                         // stage-1 k_c with this slot's redistribution
  std::vector<std::vector<double>> payments;     // per PO x SO
  std::vector<double> reimbursements;            // L_j for this slot (0 when unregulated)
  double objective = 0.0;                        // slot C(beta), contribution surrogate
};

struct PeriodReport {
  std::vector<int> stage1_kc;          // \bar K_c for the period
  std::vector<SlotReport> slots;
  std::vector<double> period_price;    // L_j^T
};

/// End-of-period price: the summed per-slot reimbursements of each PO.
inline std::vector<double> period_price(const std::vector<SlotReport>& slots, int po_count) {
  std::vector<double> total(po_count, 0.0);
  for (const auto& s : slots)
    for (int j = 0; j < po_count; ++j) total[j] += s.reimbursements[j];
  return total;
}

namespace detail {

inline double slot_objective(const MarketInstance& m,
                             const std::vector<std::vector<double>>& so_types,
                             const Allocation& alloc, double beta) {
  double c = 0.0;
  for (int j = 0; j < m.po_count(); ++j) {
    for (int k = 1; k <= alloc.k_0[j]; ++k) c += m.po_profile.value(m.po_types[j], k);
    for (int i = 0; i < m.so_count(); ++i)
      for (int k = 1; k <= alloc.k_s[j][i]; ++k) {
        c += contribution(m.so_profile, m.so_dist, k, so_types[j][i]);
        c += beta * m.so_profile.value(so_types[j][i], k);
      }
  }
  return c;
}

}  // namespace detail

/// Runs the dynamic market. Stage 1 is solved once per period from the
/// average demand (both variants share it, so per-slot comparisons are over
/// identical channel splits); the regulated flag selects the per-slot
/// auction: beta-optimal with reimbursements, or the plain optimal auction.
inline std::vector<PeriodReport> run_dynamic(const MarketInstance& m,
                                             const DynamicSchedule& schedule, double beta,
                                             bool regulated,
                                             AverageKind average = AverageKind::mean) {
  schedule.validate();
  const double avg_type =
      average == AverageKind::mean ? m.so_dist.mean() : m.so_dist.median();
  const std::vector<std::vector<double>> avg_feedback(
      m.po_count(), std::vector<double>(m.so_count(), avg_type));

  std::vector<PeriodReport> reports;
  reports.reserve(schedule.periods);
  for (int period = 0; period < schedule.periods; ++period) {
    PeriodReport pr;
    const auto stage1 = co_balanced_allocate(m.po_types, avg_feedback, m.po_profile, m.so_profile,
                                             m.so_dist, m.channels, beta);
    pr.stage1_kc = stage1.k_c;

    for (int slot = 0; slot < schedule.slots_per_period; ++slot) {
      Rng rng(sub_seed(schedule.seed, static_cast<std::uint64_t>(period),
                       static_cast<std::uint64_t>(slot)));
      SlotReport sr;
      sr.so_types.assign(m.po_count(), std::vector<double>(m.so_count(), 0.0));
      for (int j = 0; j < m.po_count(); ++j)
        for (int i = 0; i < m.so_count(); ++i) sr.so_types[j][i] = m.so_dist.sample(rng);

      sr.allocation = Allocation::empty(m.po_count(), m.so_count());
      sr.allocation.k_c = pr.stage1_kc;
      sr.payments.assign(m.po_count(), {});
      sr.reimbursements.assign(m.po_count(), 0.0);
      const double slot_beta = regulated ? beta : 0.0;
      for (int j = 0; j < m.po_count(); ++j) {
        auto outcome = beta_optimal_allocate(m.po_types[j], m.po_profile, sr.so_types[j],
                                             m.so_profile, m.so_dist, slot_beta, pr.stage1_kc[j],
                                             j);
        beta_optimal_payments(outcome, m.po_types[j], m.po_profile, sr.so_types[j], m.so_profile,
                              m.so_dist, slot_beta);
        sr.allocation.k_0[j] = outcome.reserved;
        sr.allocation.k_s[j] = outcome.sold;
        sr.payments[j] = outcome.payments;
        if (regulated) {
          double L = 0.0;
          for (int i = 0; i < m.so_count(); ++i)
            for (int k = 1; k <= outcome.sold[i]; ++k)
              L += m.so_profile.value(sr.so_types[j][i], k);
          sr.reimbursements[j] = beta * L;
        }
      }
      sr.objective = detail::slot_objective(m, sr.so_types, sr.allocation, beta);
      pr.slots.push_back(std::move(sr));
    }
    pr.period_price = period_price(pr.slots, m.po_count());
    reports.push_back(std::move(pr));
  }
  return reports;
}

}  // namespace hsm
