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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsm/auction.hpp"
#include "hsm/market.hpp"

namespace hsm {

enum class Scenario { unregulated_naive, unregulated_aware, regulated };

enum class FeedbackFidelity { exact, none, average };

/// What the controller observes about the secondary markets. Under exact
/// fidelity the reported types equal the true ones (SOs are price takers and
/// bid truthfully); average fidelity replaces every type by the distribution
/// mean, as in the dynamic-market setting.
struct FeedbackChannel {
  FeedbackFidelity fidelity = FeedbackFidelity::exact;
  std::vector<std::vector<double>> so_types_reported;
  std::vector<std::vector<int>> so_allocations_reported;

  static FeedbackChannel exact(const MarketInstance& m) {
    FeedbackChannel f;
    f.fidelity = FeedbackFidelity::exact;
    f.so_types_reported = m.so_types;
    return f;
  }
  static FeedbackChannel average(const MarketInstance& m) {
    FeedbackChannel f;
    f.fidelity = FeedbackFidelity::average;
    f.so_types_reported.assign(m.po_count(),
                               std::vector<double>(m.so_count(), m.so_dist.mean()));
    return f;
  }
  static FeedbackChannel none(const MarketInstance& m) {
    FeedbackChannel f;
    f.fidelity = FeedbackFidelity::none;
    f.so_types_reported.assign(m.po_count(), std::vector<double>(m.so_count(), 0.0));
    return f;
  }
};

struct MechanismConfig {
  double beta = 0.0;
  std::optional<double> offset_y;  // Y; defaulted when absent
  Scenario scenario = Scenario::regulated;
};

/// Safe instance-computable offset: beta * N * M * sum_{k<=K} U_k at the
/// supremum type bounds every possible reimbursement, so all net payments
/// stay nonnegative.
inline double default_offset(const MarketInstance& m, double beta) {
  double per_so = 0.0;
  for (int k = 1; k <= m.channels; ++k) per_so += m.so_profile.value(m.so_dist.upper(), k);
  return beta * m.so_count() * m.po_count() * per_so;
}

/// Reimbursement the controller pays PO j for the welfare his redistribution
/// produced: L_j = beta * sum_i sum_{k<=K_ji} U_k(alpha_i).
inline double reimbursement_at(const MarketInstance& m, int j, const Allocation& alloc,
                               double beta) {
  double L = 0.0;
  for (int i = 0; i < m.so_count(); ++i)
    for (int k = 1; k <= alloc.k_s[j][i]; ++k) L += m.so_profile.value(m.so_types[j][i], k);
  return beta * L;
}

inline double reimbursement(const MarketInstance& m, int j, const Allocation& alloc) {
  return reimbursement_at(m, j, alloc, m.beta);
}

/// Overall regulated payment of a PO: Lambda_j = Y - L_j + Q_R.
inline double net_payment(const MechanismConfig& config, double L_j, double Q_R,
                          const MarketInstance& m) {
  const double y = config.offset_y ? *config.offset_y : default_offset(m, config.beta);
  return y - L_j + Q_R;
}

namespace detail {

inline MarketReport assemble_report(const MarketInstance& m, Allocation alloc,
                                    std::vector<double> stage1_payments,
                                    std::vector<std::vector<double>> stage2_payments,
                                    std::vector<double> reimbursements,
                                    std::vector<double> net_payments) {
  MarketReport r;
  r.allocation = std::move(alloc);
  r.allocation.validate(m);
  r.stage1_payments = std::move(stage1_payments);
  r.stage2_payments = std::move(stage2_payments);
  r.reimbursements = std::move(reimbursements);
  r.net_payments = std::move(net_payments);
  r.revenue.assign(m.po_count(), 0.0);
  for (int j = 0; j < m.po_count(); ++j)
    for (double h : r.stage2_payments[j]) r.revenue[j] += h;

  for (int j = 0; j < m.po_count(); ++j) {
    for (int k = 1; k <= r.allocation.k_0[j]; ++k)
      r.po_valuation += m.po_profile.value(m.po_types[j], k);
    for (int i = 0; i < m.so_count(); ++i)
      for (int k = 1; k <= r.allocation.k_s[j][i]; ++k)
        r.so_valuation += m.so_profile.value(m.so_types[j][i], k);
  }
  r.co_objective_value = co_objective(m, r.allocation);
  double total_revenue = 0.0;
  for (double h : r.revenue) total_revenue += h;
  r.co_objective_realized = r.po_valuation + total_revenue + m.beta * r.so_valuation;
  return r;
}

}  // namespace detail

double po_best_response(const MarketInstance& m, int j, Scenario scenario, double beta, int grid);

/// Unregulated two-stage pipeline: VCG stage 1 on the POs' own valuations,
/// then a revenue-optimal auction in every secondary market. With
/// aware = false the POs bid their true types (the VCG auction is truthful
/// for bidders who only value their own use); with aware = true each PO bids
/// his grid best response to the others' true types, anticipating resale.
inline MarketReport run_unregulated(const MarketInstance& m, bool aware, int grid = 200) {
  std::vector<double> bids = m.po_types;
  if (aware) {
    for (int j = 0; j < m.po_count(); ++j)
      bids[j] = po_best_response(m, j, Scenario::unregulated_aware, 0.0, grid);
  }
  const auto k_c = co_efficient_allocate(bids, m.po_profile, m.channels);

  Allocation alloc = Allocation::empty(m.po_count(), m.so_count());
  alloc.k_c = k_c;
  std::vector<std::vector<double>> stage2(m.po_count());
  std::vector<double> q(m.po_count(), 0.0);
  for (int j = 0; j < m.po_count(); ++j) {
    auto outcome = beta_optimal_allocate(m.po_types[j], m.po_profile, m.so_types[j], m.so_profile,
                                         m.so_dist, 0.0, k_c[j], j);
    beta_optimal_payments(outcome, m.po_types[j], m.po_profile, m.so_types[j], m.so_profile,
                          m.so_dist, 0.0);
    alloc.k_0[j] = outcome.reserved;
    alloc.k_s[j] = outcome.sold;
    stage2[j] = outcome.payments;
    q[j] = vcg_payment(j, bids, m.po_profile, m.channels);
  }
  return detail::assemble_report(m, std::move(alloc), q, std::move(stage2),
                                 std::vector<double>(m.po_count(), 0.0), q);
}

/// Regulated pipeline (the incentive mechanism): truthful SO and PO bids,
/// balanced stage-1 solve on the fed-back types, per-market beta-optimal
/// redistribution, reimbursements L_j and net payments Lambda_j = Y - L + Q_R.
inline MarketReport run_regulated(const MarketInstance& m, const MechanismConfig& config) {
  if (config.beta != m.beta)
    throw std::invalid_argument("config.beta must match the instance beta");
  const double beta = config.beta;
  const auto feedback = FeedbackChannel::exact(m);
  const std::vector<double>& bids = m.po_types;  // truthful under Q_R

  const auto alloc = co_balanced_allocate(bids, feedback.so_types_reported, m.po_profile,
                                          m.so_profile, m.so_dist, m.channels, beta);

  std::vector<std::vector<double>> stage2(m.po_count());
  std::vector<double> q_r(m.po_count(), 0.0), L(m.po_count(), 0.0), lambda(m.po_count(), 0.0);
  for (int j = 0; j < m.po_count(); ++j) {
    auto outcome = beta_optimal_allocate(m.po_types[j], m.po_profile, m.so_types[j], m.so_profile,
                                         m.so_dist, beta, alloc.k_c[j], j);
    if (outcome.reserved != alloc.k_0[j] || outcome.sold != alloc.k_s[j])
      throw std::logic_error("local redistribution diverged from the balanced solve");
    beta_optimal_payments(outcome, m.po_types[j], m.po_profile, m.so_types[j], m.so_profile,
                          m.so_dist, beta);
    stage2[j] = outcome.payments;
    q_r[j] = vcg_payment_regulated(j, bids, feedback.so_types_reported, m.po_profile, m.so_profile,
                                   m.so_dist, m.channels, beta);
    L[j] = reimbursement_at(m, j, alloc, beta);
    lambda[j] = net_payment(config, L[j], q_r[j], m);
    if (lambda[j] < 0.0)
      throw std::runtime_error("offset Y too small: negative net payment for PO " +
                               std::to_string(j));
  }
  return detail::assemble_report(m, alloc, q_r, std::move(stage2), std::move(L),
                                 std::move(lambda));
}

/// Payoff of SO (j, i) bidding `bid` while everyone else is truthful, under
/// the beta-optimal auction run on the market's current k_c. The valuation
/// part uses the true type; the payment is whatever the auction charges.
inline double so_payoff(const MarketInstance& m, int j, int i, double bid, double beta,
                        int k_c) {
  auto bids = m.so_types[j];
  bids[i] = bid;
  auto outcome = beta_optimal_allocate(m.po_types[j], m.po_profile, bids, m.so_profile, m.so_dist,
                                       beta, k_c, j);
  beta_optimal_payments(outcome, m.po_types[j], m.po_profile, bids, m.so_profile, m.so_dist, beta);
  double value = 0.0;
  for (int k = 1; k <= outcome.sold[i]; ++k) value += m.so_profile.value(m.so_types[j][i], k);
  return value - outcome.payments[i];
}

/// Payoff of PO j bidding `bid_j` while the other POs bid truthfully.
///  - unregulated_naive: reserved-use value of the received channels minus Q.
///  - unregulated_aware: value after optimally reselling (realized revenue)
///    minus Q.
///  - regulated: reserved value plus the market's beta-contribution surplus
///    minus the net payment Lambda (the offset Y is a constant).
inline double po_payoff(const MarketInstance& m, int j, double bid_j, Scenario scenario,
                        double beta) {
  std::vector<double> bids = m.po_types;
  bids[j] = bid_j;

  if (scenario == Scenario::regulated) {
    const auto alloc = co_balanced_allocate(bids, m.so_types, m.po_profile, m.so_profile,
                                            m.so_dist, m.channels, beta);
    double value = 0.0;
    for (int k = 1; k <= alloc.k_0[j]; ++k) value += m.po_profile.value(m.po_types[j], k);
    for (int i = 0; i < m.so_count(); ++i)
      for (int k = 1; k <= alloc.k_s[j][i]; ++k)
        value += beta_contribution(m.so_profile, m.so_dist, k, m.so_types[j][i], beta);
    const double q_r = vcg_payment_regulated(j, bids, m.so_types, m.po_profile, m.so_profile,
                                             m.so_dist, m.channels, beta);
    return value - q_r;  // minus the constant offset Y, dropped
  }

  const auto k_c = co_efficient_allocate(bids, m.po_profile, m.channels);
  const double q = vcg_payment(j, bids, m.po_profile, m.channels);
  if (scenario == Scenario::unregulated_naive) {
    double value = 0.0;
    for (int k = 1; k <= k_c[j]; ++k) value += m.po_profile.value(m.po_types[j], k);
    return value - q;
  }
  // aware: the PO knows the secondary demand and values the resale revenue
  auto outcome = beta_optimal_allocate(m.po_types[j], m.po_profile, m.so_types[j], m.so_profile,
                                       m.so_dist, 0.0, k_c[j], j);
  beta_optimal_payments(outcome, m.po_types[j], m.po_profile, m.so_types[j], m.so_profile,
                        m.so_dist, 0.0);
  double value = 0.0;
  for (int k = 1; k <= outcome.reserved; ++k) value += m.po_profile.value(m.po_types[j], k);
  for (double h : outcome.payments) value += h;
  return value - q;
}

/// Grid best response of PO j; the true type is always a candidate and ties
/// resolve toward it.
inline double po_best_response(const MarketInstance& m, int j, Scenario scenario, double beta,
                               int grid) {
  if (grid < 1) throw std::invalid_argument("grid must be >= 1");
  const double upper = m.po_type_upper > 0.0 ? m.po_type_upper : 2.0 * m.po_types[j];
  double best_bid = m.po_types[j];
  double best = po_payoff(m, j, best_bid, scenario, beta);
  for (int g = 1; g <= grid; ++g) {
    const double r = upper * g / grid;
    const double v = po_payoff(m, j, r, scenario, beta);
    if (v > best ||
        (v == best && std::abs(r - m.po_types[j]) < std::abs(best_bid - m.po_types[j]))) {
      best = v;
      best_bid = r;
    }
  }
  return best_bid;
}

/// Grid best response of SO (j, i) under the beta-optimal auction on k_c
/// channels; truthful within a grid step for regular problems.
inline double so_best_response(const MarketInstance& m, int j, int i, double beta, int grid,
                               int k_c) {
  if (grid < 1) throw std::invalid_argument("grid must be >= 1");
  const double upper = m.so_dist.upper();
  double best_bid = m.so_types[j][i];
  double best = so_payoff(m, j, i, best_bid, beta, k_c);
  for (int g = 1; g <= grid; ++g) {
    const double b = upper * g / grid;
    const double v = so_payoff(m, j, i, b, beta, k_c);
    if (v > best ||
        (v == best && std::abs(b - m.so_types[j][i]) < std::abs(best_bid - m.so_types[j][i]))) {
      best = v;
      best_bid = b;
    }
  }
  return best_bid;
}

}  // namespace hsm
