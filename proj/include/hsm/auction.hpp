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

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hsm/contribution.hpp"
#include "hsm/market.hpp"

namespace hsm {

enum class OwnerKind { seller, bidder };

/// One scored candidate in a contribution-valuation merge: either a seller
/// (PO) valuation or a bidder (SO) beta-contribution, with the raw valuation
/// that backs the score.
struct ContributionEntry {
  double score = 0.0;
  OwnerKind owner = OwnerKind::seller;
  int po = 0;  // market index
  int so = -1; // bidder index within the market, -1 for seller entries
  int k = 1;   // channel index for this owner
  double raw_valuation = 0.0;
};

/// Deterministic ordering of equal scores. Seller-first reproduces the
/// revenue-optimal auctions and the stage-1 solvers; bidder-first is used by
/// the efficient benchmark. After the kind, ties resolve by lower PO index,
/// lower SO index, lower k.
enum class TieBreak { seller_first, bidder_first };

namespace detail {

/// Scores are quantized to 1e-12 before they are compared or sorted.
/// Valuations and contributions that are equal as decimal numbers (the ties
/// the tie-break rules exist for) differ by a few ulp once evaluated in
/// binary; without the quantization those phantom differences would decide
/// allocations.
inline double quantize_score(double s) { return std::round(s * 1e12) / 1e12; }

inline bool entry_less(const ContributionEntry& a, const ContributionEntry& b, TieBreak tie) {
  if (a.score != b.score) return a.score > b.score;
  if (a.owner != b.owner) {
    const bool a_seller = a.owner == OwnerKind::seller;
    return tie == TieBreak::seller_first ? a_seller : !a_seller;
  }
  if (a.po != b.po) return a.po < b.po;
  if (a.so != b.so) return a.so < b.so;
  return a.k < b.k;
}

/// Sorts candidates, drops strictly negative scores, keeps the `capacity`
/// best. Returns the selection (descending) and the max{0, next-best} cutoff.
inline std::pair<std::vector<ContributionEntry>, double> greedy_select(
    std::vector<ContributionEntry> entries, int capacity, TieBreak tie) {
  std::erase_if(entries, [](const ContributionEntry& e) { return e.score < 0.0; });
  std::sort(entries.begin(), entries.end(),
            [tie](const ContributionEntry& a, const ContributionEntry& b) {
              return entry_less(a, b, tie);
            });
  double cutoff = 0.0;
  if (static_cast<int>(entries.size()) > capacity) {
    cutoff = std::max(0.0, entries[capacity].score);
    entries.resize(capacity);
  }
  return {std::move(entries), cutoff};
}

/// Per-bidder check that positive contributions do not increase in k; the
/// greedy selection is only an optimum under this (regularity) condition.
inline void require_k_monotone(const std::vector<ContributionEntry>& entries) {
  // entries for one owner are generated in k order
  double prev = 0.0;
  int prev_po = -1, prev_so = -2;
  for (const auto& e : entries) {
    if (e.owner == OwnerKind::seller) continue;
    if (e.po == prev_po && e.so == prev_so) {
      if (e.score > 0.0 && e.score > prev)
        throw std::runtime_error("regularity violation: contribution increasing in k");
    }
    prev = e.score;
    prev_po = e.po;
    prev_so = e.so;
  }
}

}  // namespace detail

/// Sorted contribution-valuation vector of one auction: the winning scores in
/// decreasing order plus the max{0, first-excluded} cutoff score.
struct ScoreVector {
  std::vector<ContributionEntry> entries;
  double cutoff_score = 0.0;
};

/// Outcome of one PO's channel redistribution: reserved count, per-SO sold
/// counts and per-SO payments (computed only from opponents' bids).
struct Stage2Outcome {
  int k_c = 0;
  int reserved = 0;
  std::vector<int> sold;
  std::vector<double> payments;
  ScoreVector scores;
};

namespace detail {

inline std::vector<ContributionEntry> stage2_entries(double po_type,
                                                     const ValuationProfile& po_profile,
                                                     const std::vector<double>& bids,
                                                     const ValuationProfile& so_profile,
                                                     const TypeDistribution& so_dist, double beta,
                                                     int k_c, int po_index, int skip_bidder) {
  std::vector<ContributionEntry> entries;
  entries.reserve(static_cast<std::size_t>(k_c) * (bids.size() + 1));
  for (int k = 1; k <= k_c; ++k) {
    const double v = po_profile.value(po_type, k);
    entries.push_back({quantize_score(v), OwnerKind::seller, po_index, -1, k, v});
  }
  for (int i = 0; i < static_cast<int>(bids.size()); ++i) {
    if (i == skip_bidder) continue;
    for (int k = 1; k <= k_c; ++k) {
      const double s = beta_contribution(so_profile, so_dist, k, bids[i], beta);
      entries.push_back(
          {quantize_score(s), OwnerKind::bidder, po_index, i, k, so_profile.value(bids[i], k)});
    }
  }
  return entries;
}

}  // namespace detail

/// Beta-optimal auction allocation rule: merge the seller's valuations with
/// every bidder's beta-contributions, drop negative scores, keep the k_c
/// best. beta = 0 is exactly the revenue-optimal auction.
inline Stage2Outcome beta_optimal_allocate(double po_type, const ValuationProfile& po_profile,
                                           const std::vector<double>& bids,
                                           const ValuationProfile& so_profile,
                                           const TypeDistribution& so_dist, double beta, int k_c,
                                           int po_index = 0) {
  if (k_c < 0) throw std::invalid_argument("k_c must be >= 0");
  Stage2Outcome out;
  out.k_c = k_c;
  out.sold.assign(bids.size(), 0);
  out.payments.assign(bids.size(), 0.0);
  if (k_c == 0) return out;

  auto entries = detail::stage2_entries(po_type, po_profile, bids, so_profile, so_dist, beta, k_c,
                                        po_index, -1);
  detail::require_k_monotone(entries);
  auto [selected, cutoff] = detail::greedy_select(std::move(entries), k_c, TieBreak::seller_first);
  for (const auto& e : selected) {
    if (e.owner == OwnerKind::seller)
      ++out.reserved;
    else
      ++out.sold[e.so];
  }
  out.scores = {std::move(selected), cutoff};
  return out;
}

/// Beta-optimal auction payment rule. For the k-th channel a winner acquired,
/// the charge is U_k at the minimum bid that still wins that channel: the
/// bid whose k-th beta-contribution reaches the (k_c - k + 1)-th highest
/// opponent candidate (other bidders' contributions and the seller's own
/// valuations), clamped below at zero. Losers pay nothing, and a winner's
/// payment does not depend on her own bid.
inline void beta_optimal_payments(Stage2Outcome& outcome, double po_type,
                                  const ValuationProfile& po_profile,
                                  const std::vector<double>& bids,
                                  const ValuationProfile& so_profile,
                                  const TypeDistribution& so_dist, double beta) {
  const int k_c = outcome.k_c;
  for (int i = 0; i < static_cast<int>(bids.size()); ++i) {
    outcome.payments[i] = 0.0;
    if (outcome.sold[i] == 0) continue;

    auto opponents = detail::stage2_entries(po_type, po_profile, bids, so_profile, so_dist, beta,
                                            k_c, 0, i);
    std::sort(opponents.begin(), opponents.end(),
              [](const ContributionEntry& a, const ContributionEntry& b) {
                return a.score > b.score;
              });
    for (int k = 1; k <= outcome.sold[i]; ++k) {
      const std::size_t idx = static_cast<std::size_t>(k_c - k);
      const double cutoff = idx < opponents.size() ? std::max(0.0, opponents[idx].score) : 0.0;
      const auto z = threshold_bid(so_profile, so_dist, k, beta, cutoff);
      if (!z) throw std::logic_error("winner without an attainable threshold bid");
      if (*z > 0.0) outcome.payments[i] += so_profile.value(*z, k);
    }
  }
}

/// Stage-1 efficient split: sort every PO's valuations and hand the K highest
/// their channels. Ties resolve by lower PO index, then lower k.
inline std::vector<int> co_efficient_allocate(const std::vector<double>& po_bids,
                                              const ValuationProfile& po_profile, int channels) {
  if (channels < 1) throw std::invalid_argument("need at least one channel");
  std::vector<ContributionEntry> entries;
  entries.reserve(po_bids.size() * static_cast<std::size_t>(channels));
  for (int j = 0; j < static_cast<int>(po_bids.size()); ++j) {
    if (po_bids[j] <= 0.0) continue;  // a zero bid withdraws the PO
    for (int k = 1; k <= channels; ++k) {
      const double v = po_profile.value(po_bids[j], k);
      entries.push_back({detail::quantize_score(v), OwnerKind::seller, j, -1, k, v});
    }
  }
  auto [selected, cutoff] = detail::greedy_select(std::move(entries), channels,
                                                  TieBreak::seller_first);
  (void)cutoff;
  std::vector<int> k_c(po_bids.size(), 0);
  for (const auto& e : selected) ++k_c[e.po];
  return k_c;
}

namespace detail {

inline double po_value_sum(const std::vector<int>& k_c, const std::vector<double>& po_bids,
                           const ValuationProfile& po_profile, int except) {
  double v = 0.0;
  for (int j = 0; j < static_cast<int>(po_bids.size()); ++j) {
    if (j == except) continue;
    for (int k = 1; k <= k_c[j]; ++k) v += po_profile.value(po_bids[j], k);
  }
  return v;
}

}  // namespace detail

/// VCG payment of PO j in the stage-1 efficient auction: the externality his
/// participation imposes on the other POs.
inline double vcg_payment(int j, const std::vector<double>& po_bids,
                          const ValuationProfile& po_profile, int channels) {
  const auto with_j = co_efficient_allocate(po_bids, po_profile, channels);
  auto reduced = po_bids;
  reduced[j] = 0.0;  // withdrawn
  const auto without_j = co_efficient_allocate(reduced, po_profile, channels);
  return detail::po_value_sum(without_j, po_bids, po_profile, j) -
         detail::po_value_sum(with_j, po_bids, po_profile, j);
}

namespace detail {

inline std::vector<ContributionEntry> balanced_entries(
    const std::vector<double>& po_bids, const std::vector<std::vector<double>>& so_feedback,
    const ValuationProfile& po_profile, const ValuationProfile& so_profile,
    const TypeDistribution& so_dist, double beta, int channels, int skip_market) {
  std::vector<ContributionEntry> entries;
  for (int j = 0; j < static_cast<int>(po_bids.size()); ++j) {
    if (j == skip_market || po_bids[j] <= 0.0) continue;
    for (int k = 1; k <= channels; ++k) {
      const double v = po_profile.value(po_bids[j], k);
      entries.push_back({quantize_score(v), OwnerKind::seller, j, -1, k, v});
    }
    for (int i = 0; i < static_cast<int>(so_feedback[j].size()); ++i) {
      for (int k = 1; k <= channels; ++k) {
        const double s = beta_contribution(so_profile, so_dist, k, so_feedback[j][i], beta);
        entries.push_back({quantize_score(s), OwnerKind::bidder, j, i, k,
                           so_profile.value(so_feedback[j][i], k)});
      }
    }
  }
  return entries;
}

inline Allocation selection_to_allocation(const std::vector<ContributionEntry>& selected, int pos,
                                          int sos) {
  Allocation a = Allocation::empty(pos, sos);
  for (const auto& e : selected) {
    if (e.owner == OwnerKind::seller)
      ++a.k_0[e.po];
    else
      ++a.k_s[e.po][e.so];
  }
  for (int j = 0; j < pos; ++j) {
    a.k_c[j] = a.k_0[j];
    for (int s : a.k_s[j]) a.k_c[j] += s;
  }
  return a;
}

}  // namespace detail

/// Balanced stage-1 solve: global top-K merge of every PO's valuations with
/// every market's beta-contributions. Each PO receives exactly the channels
/// his market's winners need, k_c = k_0 + sum k_s.
inline Allocation co_balanced_allocate(const std::vector<double>& po_bids,
                                       const std::vector<std::vector<double>>& so_feedback,
                                       const ValuationProfile& po_profile,
                                       const ValuationProfile& so_profile,
                                       const TypeDistribution& so_dist, int channels, double beta) {
  if (channels < 1) throw std::invalid_argument("need at least one channel");
  if (so_feedback.size() != po_bids.size())
    throw std::invalid_argument("need SO feedback for every market");
  auto entries = detail::balanced_entries(po_bids, so_feedback, po_profile, so_profile, so_dist,
                                          beta, channels, -1);
  detail::require_k_monotone(entries);
  auto [selected, cutoff] = detail::greedy_select(std::move(entries), channels,
                                                  TieBreak::seller_first);
  (void)cutoff;
  const int sos = so_feedback.empty() ? 0 : static_cast<int>(so_feedback.front().size());
  return detail::selection_to_allocation(selected, static_cast<int>(po_bids.size()), sos);
}

namespace detail {

/// Regulated objective of everyone but PO j under a given split, with the
/// contribution surrogate standing in for realized revenue.
inline double balanced_value_excluding(int j, const Allocation& alloc,
                                       const std::vector<double>& po_bids,
                                       const std::vector<std::vector<double>>& so_feedback,
                                       const ValuationProfile& po_profile,
                                       const ValuationProfile& so_profile,
                                       const TypeDistribution& so_dist, double beta) {
  double v = 0.0;
  for (int m = 0; m < static_cast<int>(po_bids.size()); ++m) {
    if (m == j) continue;
    for (int k = 1; k <= alloc.k_0[m]; ++k) v += po_profile.value(po_bids[m], k);
    for (int i = 0; i < static_cast<int>(so_feedback[m].size()); ++i)
      for (int k = 1; k <= alloc.k_s[m][i]; ++k)
        v += beta_contribution(so_profile, so_dist, k, so_feedback[m][i], beta);
  }
  return v;
}

}  // namespace detail

/// VCG payment of PO j under the balanced solve: the drop in the other
/// markets' regulated objective caused by market j's participation.
inline double vcg_payment_regulated(int j, const std::vector<double>& po_bids,
                                    const std::vector<std::vector<double>>& so_feedback,
                                    const ValuationProfile& po_profile,
                                    const ValuationProfile& so_profile,
                                    const TypeDistribution& so_dist, int channels, double beta) {
  const auto full = co_balanced_allocate(po_bids, so_feedback, po_profile, so_profile, so_dist,
                                         channels, beta);
  auto entries = detail::balanced_entries(po_bids, so_feedback, po_profile, so_profile, so_dist,
                                          beta, channels, j);
  auto [selected, cutoff] = detail::greedy_select(std::move(entries), channels,
                                                  TieBreak::seller_first);
  (void)cutoff;
  const int sos = so_feedback.empty() ? 0 : static_cast<int>(so_feedback.front().size());
  const auto absent = detail::selection_to_allocation(selected, static_cast<int>(po_bids.size()),
                                                      sos);
  return detail::balanced_value_excluding(j, absent, po_bids, so_feedback, po_profile, so_profile,
                                          so_dist, beta) -
         detail::balanced_value_excluding(j, full, po_bids, so_feedback, po_profile, so_profile,
                                          so_dist, beta);
}

/// Hypothetical benchmark: the controller assigns all channels directly to
/// the globally highest raw valuations, POs and SOs alike. Ties favor the
/// SOs. Independent of beta.
inline Allocation efficient_benchmark(const MarketInstance& m) {
  std::vector<ContributionEntry> entries;
  for (int j = 0; j < m.po_count(); ++j) {
    for (int k = 1; k <= m.channels; ++k) {
      const double v = m.po_profile.value(m.po_types[j], k);
      entries.push_back({detail::quantize_score(v), OwnerKind::seller, j, -1, k, v});
    }
    for (int i = 0; i < m.so_count(); ++i)
      for (int k = 1; k <= m.channels; ++k) {
        const double u = m.so_profile.value(m.so_types[j][i], k);
        entries.push_back({detail::quantize_score(u), OwnerKind::bidder, j, i, k, u});
      }
  }
  auto [selected, cutoff] = detail::greedy_select(std::move(entries), m.channels,
                                                  TieBreak::bidder_first);
  (void)cutoff;
  return detail::selection_to_allocation(selected, m.po_count(), m.so_count());
}

/// Socially-aware redistribution: each PO merges his own valuations with the
/// SOs' raw valuations (not their contributions) over a given stage-1 split.
inline Allocation socially_aware_allocate(const MarketInstance& m,
                                          const std::vector<int>& stage1_kc) {
  if (static_cast<int>(stage1_kc.size()) != m.po_count())
    throw std::invalid_argument("stage-1 split must cover every PO");
  Allocation a = Allocation::empty(m.po_count(), m.so_count());
  for (int j = 0; j < m.po_count(); ++j) {
    std::vector<ContributionEntry> entries;
    for (int k = 1; k <= stage1_kc[j]; ++k) {
      const double v = m.po_profile.value(m.po_types[j], k);
      entries.push_back({detail::quantize_score(v), OwnerKind::seller, j, -1, k, v});
    }
    for (int i = 0; i < m.so_count(); ++i)
      for (int k = 1; k <= stage1_kc[j]; ++k) {
        const double u = m.so_profile.value(m.so_types[j][i], k);
        entries.push_back({detail::quantize_score(u), OwnerKind::bidder, j, i, k, u});
      }
    auto [selected, cutoff] = detail::greedy_select(std::move(entries), stage1_kc[j],
                                                    TieBreak::seller_first);
    (void)cutoff;
    for (const auto& e : selected) {
      if (e.owner == OwnerKind::seller)
        ++a.k_0[j];
      else
        ++a.k_s[j][e.so];
    }
    a.k_c[j] = stage1_kc[j];
  }
  return a;
}

}  // namespace hsm
