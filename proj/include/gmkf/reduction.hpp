#pragma once

#include <vector>

#include "gmkf/estimate.hpp"

namespace gmkf {

enum class ReductionScheme { Merge, Remove };

/// Collapse a hypothesis bank to a single Gaussian: Merge moment-matches the
/// weighted bank, Remove keeps the heaviest hypothesis (ties to the lowest
/// (i, j) index).
template <int NX, int NZ>
GaussianEstimateT<NX> reduce(const std::vector<HypothesisState<NX, NZ>>& bank,
                             ReductionScheme scheme) {
  if (bank.empty()) throw ConfigError("cannot reduce an empty bank");
  if (scheme == ReductionScheme::Remove) {
    int best = 0;
    for (int h = 1; h < static_cast<int>(bank.size()); ++h)
      if (bank[h].weight > bank[best].weight) best = h;
    return {bank[best].post_mean, bank[best].post_cov};
  }
  GaussianEstimateT<NX> out;
  out.mean = bank.front().post_mean * 0.0;
  for (const auto& hyp : bank) out.mean += hyp.weight * hyp.post_mean;
  out.cov = bank.front().post_cov * 0.0;
  for (const auto& hyp : bank) {
    const auto d = (hyp.post_mean - out.mean).eval();
    out.cov += hyp.weight * (hyp.post_cov + d * d.transpose());
  }
  out.cov = symmetrized(out.cov);
  return out;
}

/// Weighted squared spread of the bank means around the reduced mean.
template <int NX, int NZ>
double mean_spread(const std::vector<HypothesisState<NX, NZ>>& bank,
                   const GaussianEstimateT<NX>& reduced) {
  double s = 0.0;
  for (const auto& hyp : bank) s += hyp.weight * (hyp.post_mean - reduced.mean).squaredNorm();
  return s;
}

}  // namespace gmkf
