#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "tfde/types.hpp"

namespace tfde {

/// Tempered Grunwald-Letnikov weight sequence g_0..g_K for a fixed
/// (alpha, lambda, h). Sign structure for alpha in (1,2):
/// g_1 < 0, g_k > 0 for k != 1, and every partial sum from index 1 on
/// is negative. Both time-stepping schemes and the all-at-once operator
/// draw their Toeplitz coefficients from this sequence.
template <typename Scalar = double>
struct TemperedWeights {
  Scalar alpha{};
  Scalar lambda{};
  Scalar h{};
  Vector<Scalar> g;  // g_0..g_K

  Index count() const { return g.size(); }
};

/// Untempered weights gt_k = (-1)^k C(alpha, k), k = 0..K, via the stable
/// recurrence gt_0 = 1, gt_k = gt_{k-1} * (1 - (alpha + 1)/k). No binomial
/// of large arguments is ever formed.
template <typename Scalar = double>
Vector<Scalar> untempered_weights(Scalar alpha, Index K) {
  if (!(alpha > Scalar(1) && alpha < Scalar(2)))
    throw std::domain_error("untempered_weights: alpha must lie in (1,2)");
  if (K < 1) throw std::domain_error("untempered_weights: K must be >= 1");

  Vector<Scalar> gt(K + 1);
  gt[0] = Scalar(1);
  for (Index k = 1; k <= K; ++k)
    gt[k] = gt[k - 1] * (Scalar(1) - (alpha + Scalar(1)) / Scalar(k));
  return gt;
}

/// Tempered weights:
///   g_0 = e^{h lambda},
///   g_1 = gt_1 - e^{h lambda} (1 - e^{-h lambda})^alpha,
///   g_k = gt_k e^{-(k-1) h lambda}  (k >= 2).
/// (1 - e^{-h lambda})^alpha is evaluated through expm1 so small h*lambda
/// does not cancel. Exponential underflow for large k*h*lambda flushes
/// g_k to zero, which is benign (the terms are positive and vanishing).
template <typename Scalar = double>
TemperedWeights<Scalar> tempered_weights(Scalar alpha, Scalar lambda, Scalar h, Index K) {
  if (!(alpha > Scalar(1) && alpha < Scalar(2)))
    throw std::domain_error("tempered_weights: alpha must lie in (1,2)");
  if (!(lambda >= Scalar(0)))
    throw std::domain_error("tempered_weights: lambda must be >= 0");
  if (!(h > Scalar(0)))
    throw std::domain_error("tempered_weights: h must be > 0");
  if (K < 0) throw std::domain_error("tempered_weights: K must be >= 0");

  TemperedWeights<Scalar> w;
  w.alpha = alpha;
  w.lambda = lambda;
  w.h = h;

  const Index Keff = std::max<Index>(K, 1);
  Vector<Scalar> gt = untempered_weights(alpha, Keff);

  w.g.resize(K + 1);
  if (lambda == Scalar(0)) {
    w.g = gt.head(K + 1);
    return w;
  }

  const Scalar hl = h * lambda;
  const Scalar one_minus_emhl = -std::expm1(-hl);  // 1 - e^{-h lambda}, no cancellation
  const Scalar temper_jump = std::exp(hl) * std::pow(one_minus_emhl, alpha);

  w.g[0] = std::exp(hl);
  if (K >= 1) w.g[1] = gt[1] - temper_jump;
  for (Index k = 2; k <= K; ++k)
    w.g[k] = gt[k] * std::exp(-Scalar(k - 1) * hl);
  return w;
}

/// Per-property outcome of the sign/partial-sum checks on a weight sequence.
/// The partial sums decay to zero from below; once the true |S_j| drops
/// under the forward-summation rounding floor (a few ulps of sum |g_k|)
/// the computed sign is noise, so negativity and monotone shrink are
/// enforced up to that floor. Indices where g_k underflowed to zero stop
/// changing the sums and are skipped.
struct WeightPropertyReport {
  bool g1_negative = false;
  bool positive_off_g1 = false;       // g_k > 0 for k != 1 (underflowed g_k == 0 skipped)
  bool partial_sums_negative = false;  // S_j < 0 for all j >= 1, up to rounding
  bool tail_magnitude_shrinks = false;  // |S_j| non-increasing for j >= 1, up to rounding
  Index first_violation = -1;         // smallest index witnessing a failure, -1 if none

  bool all() const {
    return g1_negative && positive_off_g1 && partial_sums_negative &&
           tail_magnitude_shrinks;
  }
};

template <typename Scalar = double>
WeightPropertyReport check_weight_properties(const TemperedWeights<Scalar>& w) {
  WeightPropertyReport rep;
  const auto& g = w.g;
  const Index K = g.size() - 1;

  rep.g1_negative = K < 1 || g[1] < Scalar(0);
  if (!rep.g1_negative) rep.first_violation = 1;

  rep.positive_off_g1 = true;
  for (Index k = 0; k <= K; ++k) {
    if (k == 1) continue;
    if (g[k] == Scalar(0)) continue;  // underflow flush
    if (!(g[k] > Scalar(0))) {
      rep.positive_off_g1 = false;
      if (rep.first_violation < 0) rep.first_violation = k;
      break;
    }
  }

  rep.partial_sums_negative = true;
  rep.tail_magnitude_shrinks = true;
  constexpr Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar s = K >= 0 ? g[0] : Scalar(0);
  Scalar abs_sum = std::abs(s);
  Scalar prev_abs = Scalar(0);
  for (Index j = 1; j <= K; ++j) {
    s += g[j];
    abs_sum += std::abs(g[j]);
    const Scalar floor = Scalar(4) * eps * abs_sum;
    if (!(s < floor)) {
      rep.partial_sums_negative = false;
      if (rep.first_violation < 0) rep.first_violation = j;
      break;
    }
    if (j > 1 && std::abs(s) > prev_abs + floor) {
      rep.tail_magnitude_shrinks = false;
      if (rep.first_violation < 0) rep.first_violation = j;
    }
    prev_abs = std::abs(s);
  }
  return rep;
}

/// Memoized weights, shared across operator assemblies: one sequence per
/// (alpha, lambda, h, K). Thread-safe.
inline const TemperedWeights<double>& cached_weights(double alpha, double lambda,
                                                     double h, Index K) {
  using Key = std::tuple<double, double, double, Index>;
  static std::map<Key, TemperedWeights<double>> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = Key{alpha, lambda, h, K};
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, tempered_weights(alpha, lambda, h, K)).first;
  return it->second;
}

}  // namespace tfde
