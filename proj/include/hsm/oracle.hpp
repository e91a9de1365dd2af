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
//
// Ground-truth machinery kept independent of the greedy solvers: exhaustive
// enumeration over integer allocations, Monte Carlo verification of the
// revenue-equivalence identity, and best-response deviation sweeps.

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hsm/auction.hpp"
#include "hsm/market.hpp"
#include "hsm/rng.hpp"

namespace hsm::oracle {

enum class ObjectiveKind {
  co_efficient,     // stage-1 split, PO valuations only
  po_optimal,       // one market, reserved value + plain contributions
  po_beta_optimal,  // one market, reserved value + beta-contributions
  co_balanced,      // global balanced objective (contribution surrogate)
  efficient_total,  // global raw-valuation sum
};

struct BruteForceResult {
  Allocation allocation;
  double value = 0.0;
};

namespace detail {

// Owner-ordered prefix tables: prefix[o][c] = sum of the owner's first c
// scores. Both the enumerator and evaluate_objective fold these in the same
// order, so equal allocations always produce bit-identical values.
struct Owners {
  std::vector<std::vector<double>> prefix;
  std::vector<std::pair<int, int>> id;  // (po, so), so = -1 for reserved slots
};

inline std::vector<double> prefix_sums(const std::function<double(int)>& score, int cap) {
  std::vector<double> p(cap + 1, 0.0);
  for (int k = 1; k <= cap; ++k) p[k] = p[k - 1] + score(k);
  return p;
}

inline Owners build_owners(ObjectiveKind kind, const MarketInstance& m, int market, int cap) {
  Owners o;
  auto add_seller = [&](int j) {
    o.prefix.push_back(prefix_sums(
        [&, j](int k) { return m.po_profile.value(m.po_types[j], k); }, cap));
    o.id.emplace_back(j, -1);
  };
  auto add_bidder = [&](int j, int i, double beta, bool raw) {
    o.prefix.push_back(prefix_sums(
        [&, j, i, beta, raw](int k) {
          if (raw) return m.so_profile.value(m.so_types[j][i], k);
          return contribution(m.so_profile, m.so_dist, k, m.so_types[j][i]) +
                 beta * m.so_profile.value(m.so_types[j][i], k);
        },
        cap));
    o.id.emplace_back(j, i);
  };

  switch (kind) {
    case ObjectiveKind::co_efficient:
      for (int j = 0; j < m.po_count(); ++j) add_seller(j);
      break;
    case ObjectiveKind::po_optimal:
    case ObjectiveKind::po_beta_optimal: {
      const double beta = kind == ObjectiveKind::po_beta_optimal ? m.beta : 0.0;
      add_seller(market);
      for (int i = 0; i < m.so_count(); ++i) add_bidder(market, i, beta, false);
      break;
    }
    case ObjectiveKind::co_balanced:
      for (int j = 0; j < m.po_count(); ++j) {
        add_seller(j);
        for (int i = 0; i < m.so_count(); ++i) add_bidder(j, i, m.beta, false);
      }
      break;
    case ObjectiveKind::efficient_total:
      for (int j = 0; j < m.po_count(); ++j) {
        add_seller(j);
        for (int i = 0; i < m.so_count(); ++i) add_bidder(j, i, 0.0, true);
      }
      break;
  }
  return o;
}

inline void enumerate(const Owners& owners, std::size_t idx, int remaining, double acc,
                      std::vector<int>& counts, double& best, std::vector<int>& best_counts) {
  if (idx == owners.prefix.size()) {
    if (acc > best) {
      best = acc;
      best_counts = counts;
    }
    return;
  }
  const auto& pre = owners.prefix[idx];
  const int cap = std::min<int>(remaining, static_cast<int>(pre.size()) - 1);
  for (int c = 0; c <= cap; ++c) {
    counts[idx] = c;
    enumerate(owners, idx + 1, remaining - c, acc + pre[c], counts, best, best_counts);
  }
  counts[idx] = 0;
}

}  // namespace detail

/// Objective value of a concrete allocation under the chosen kind, computed
/// through the same prefix tables and fold order as the enumerator.
inline double evaluate_objective(ObjectiveKind kind, const MarketInstance& m,
                                 const Allocation& alloc, int market = 0, int capacity = -1) {
  const int cap = capacity > 0 ? capacity : m.channels;
  const auto owners = detail::build_owners(kind, m, market, cap);
  double v = 0.0;
  for (std::size_t o = 0; o < owners.id.size(); ++o) {
    const auto [j, i] = owners.id[o];
    const int c = i < 0 ? (kind == ObjectiveKind::co_efficient ? alloc.k_c[j] : alloc.k_0[j])
                        : alloc.k_s[j][i];
    v += owners.prefix[o][c];
  }
  return v;
}

/// Exhaustive optimum over all feasible integer allocations. `capacity`
/// bounds the channels handed out (the per-market k_c for the single-market
/// kinds, the full supply otherwise). Guarded to stay enumerable: at most 12
/// channels and 16 operators.
inline BruteForceResult brute_force_allocate(ObjectiveKind kind, const MarketInstance& m,
                                             int capacity = -1, int market = 0) {
  const int cap = capacity >= 0 ? capacity : m.channels;
  const int operators = m.po_count() + m.po_count() * m.so_count();
  if (m.channels > 12 || operators > 16)
    throw std::length_error("instance too large for exhaustive enumeration");
  if (cap > m.channels) throw std::invalid_argument("capacity exceeds the channel supply");

  const auto owners = detail::build_owners(kind, m, market, cap);
  std::vector<int> counts(owners.prefix.size(), 0), best_counts(owners.prefix.size(), 0);
  double best = -1.0;  // every objective admits the all-zero allocation worth 0
  detail::enumerate(owners, 0, cap, 0.0, counts, best, best_counts);

  BruteForceResult res;
  res.allocation = Allocation::empty(m.po_count(), m.so_count());
  for (std::size_t o = 0; o < owners.id.size(); ++o) {
    const auto [j, i] = owners.id[o];
    if (i < 0)
      res.allocation.k_0[j] = best_counts[o];
    else
      res.allocation.k_s[j][i] = best_counts[o];
  }
  for (int j = 0; j < m.po_count(); ++j) {
    res.allocation.k_c[j] = res.allocation.k_0[j];
    for (int s : res.allocation.k_s[j]) res.allocation.k_c[j] += s;
  }
  res.value = best;
  return res;
}

/// Monte Carlo check of the identity behind the truthfulness proof: under
/// the beta-optimal auction, expected realized revenue equals the expected
/// sum of the winners' plain contributions (the beta term is accounted
/// separately through the reimbursement).
struct RevenueEquivalenceReport {
  double mean_revenue = 0.0;
  double mean_contribution = 0.0;
  double gap = 0.0;      // mean of (revenue - winner contributions)
  double gap_se = 0.0;   // standard error of that mean
  std::vector<std::vector<double>> win_frequency;  // s_ik estimates, bidder x k
  std::vector<double> mean_payment;                // c_i per bidder
  int draws = 0;
};

inline RevenueEquivalenceReport mc_revenue_equivalence(
    const ValuationProfile& so_profile, const TypeDistribution& so_dist, double po_type,
    const ValuationProfile& po_profile, double beta, int k_c, int n_bidders, int n_draws,
    std::uint64_t seed, const std::optional<TypeDistribution>& population = std::nullopt) {
  if (n_draws < 1000) throw std::invalid_argument("need at least 1000 draws");
  if (n_bidders < 1) throw std::invalid_argument("need at least one bidder");
  const TypeDistribution& pop = population ? *population : so_dist;

  RevenueEquivalenceReport rep;
  rep.draws = n_draws;
  rep.win_frequency.assign(n_bidders, std::vector<double>(k_c, 0.0));
  rep.mean_payment.assign(n_bidders, 0.0);
  double sum_rev = 0.0, sum_con = 0.0, sum_d = 0.0, sum_d2 = 0.0;

  std::vector<double> bids(n_bidders);
  for (int d = 0; d < n_draws; ++d) {
    Rng rng(sub_seed(seed, static_cast<std::uint64_t>(d)));
    for (double& b : bids) b = pop.sample(rng);
    auto outcome = beta_optimal_allocate(po_type, po_profile, bids, so_profile, so_dist, beta,
                                         k_c);
    beta_optimal_payments(outcome, po_type, po_profile, bids, so_profile, so_dist, beta);
    double rev = 0.0, con = 0.0;
    for (int i = 0; i < n_bidders; ++i) {
      rev += outcome.payments[i];
      rep.mean_payment[i] += outcome.payments[i];
      for (int k = 1; k <= outcome.sold[i]; ++k) {
        con += contribution(so_profile, so_dist, k, bids[i]);
        rep.win_frequency[i][k - 1] += 1.0;
      }
    }
    sum_rev += rev;
    sum_con += con;
    const double diff = rev - con;
    sum_d += diff;
    sum_d2 += diff * diff;
  }

  const double n = n_draws;
  rep.mean_revenue = sum_rev / n;
  rep.mean_contribution = sum_con / n;
  rep.gap = sum_d / n;
  const double var = (sum_d2 - sum_d * sum_d / n) / (n - 1.0);
  rep.gap_se = std::sqrt(std::max(0.0, var) / n);
  for (auto& row : rep.win_frequency)
    for (double& f : row) f /= n;
  for (double& c : rep.mean_payment) c /= n;
  return rep;
}

/// Best gain any grid deviation achieves over the truthful bid; incentive
/// compatibility holds when this never exceeds the tolerance.
struct DeviationSweep {
  double truthful_payoff = 0.0;
  double max_regret = 0.0;
  double best_deviation = 0.0;
};

inline DeviationSweep deviation_sweep(const std::function<double(double)>& payoff,
                                      double truthful_bid, double lo, double hi, int grid) {
  if (grid < 1) throw std::invalid_argument("grid must be >= 1");
  DeviationSweep s;
  s.truthful_payoff = payoff(truthful_bid);
  s.best_deviation = truthful_bid;
  s.max_regret = 0.0;
  for (int g = 0; g <= grid; ++g) {
    const double b = lo + (hi - lo) * g / grid;
    if (!(b > 0.0)) continue;
    const double regret = payoff(b) - s.truthful_payoff;
    if (regret > s.max_regret) {
      s.max_regret = regret;
      s.best_deviation = b;
    }
  }
  return s;
}

}  // namespace hsm::oracle
