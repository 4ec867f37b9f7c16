#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "gmkf/common.hpp"

namespace gmkf {

/// Per-step position errors of one experiment.
struct ErrorSeries {
  std::vector<double> errors;

  int size() const { return static_cast<int>(errors.size()); }
  void validate() const {
    if (errors.empty()) throw DataError("error series is empty");
    for (double e : errors)
      if (!std::isfinite(e)) throw DataError("error series contains a non-finite value");
  }
};

inline double rmse(std::span<const double> errors) {
  if (errors.empty()) throw DataError("rmse of empty series");
  double acc = 0.0;
  for (double e : errors) acc += e * e;
  return std::sqrt(acc / static_cast<double>(errors.size()));
}

inline double rmse(const ErrorSeries& e) {
  e.validate();
  return rmse(std::span<const double>(e.errors));
}

/// Median of the absolute errors, interpolating linearly between the two
/// central order statistics for even counts.
inline double cep(std::span<const double> errors) {
  if (errors.empty()) throw DataError("cep of empty series");
  std::vector<double> mag(errors.begin(), errors.end());
  for (double& m : mag) m = std::abs(m);
  std::sort(mag.begin(), mag.end());
  const std::size_t n = mag.size();
  if (n % 2 == 1) return mag[n / 2];
  return 0.5 * (mag[n / 2 - 1] + mag[n / 2]);
}

inline double cep(const ErrorSeries& e) {
  e.validate();
  return cep(std::span<const double>(e.errors));
}

/// Outcome of a two-sample hypothesis test at fixed level; the null is
/// accepted exactly when the statistic does not exceed the threshold.
struct TestResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool accepted = true;
  double alpha = 0.05;
};

/// Two-sample Kolmogorov-Smirnov test of equal distributions. Uses the
/// asymptotic critical value c(0.05) = 1.3581 scaled by sqrt((n+m)/(n*m)).
inline TestResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n < 10 || m < 10) throw DataError("ks_two_sample needs at least 10 samples per side");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  double d = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < n || ib < m) {
    const double v = (ib >= m || (ia < n && sa[ia] <= sb[ib])) ? sa[ia] : sb[ib];
    while (ia < n && sa[ia] <= v) ++ia;
    while (ib < m && sb[ib] <= v) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / n - static_cast<double>(ib) / m));
  }
  TestResult r;
  r.statistic = d;
  r.threshold = 1.3581 * std::sqrt((n + m) / (static_cast<double>(n) * static_cast<double>(m)));
  r.accepted = r.statistic <= r.threshold;
  return r;
}

/// Ansari-Bradley two-sample test of equal dispersion. Scores rank the
/// pooled sample from both ends inward (midranks over ties); the decision
/// uses the two-sided normal approximation of the null distribution.
inline TestResult ansari_bradley(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n < 20 || m < 20)
    throw DataError("ansari_bradley needs at least 20 samples per side");
  const std::size_t total = n + m;

  struct Tagged {
    double value;
    bool first;
  };
  std::vector<Tagged> pooled;
  pooled.reserve(total);
  for (double v : a) pooled.push_back({v, true});
  for (double v : b) pooled.push_back({v, false});
  std::sort(pooled.begin(), pooled.end(),
            [](const Tagged& x, const Tagged& y) { return x.value < y.value; });

  // score of rank r (1-based) is min(r, total + 1 - r)
  std::vector<double> score(total);
  for (std::size_t r = 1; r <= total; ++r)
    score[r - 1] = std::min<double>(r, static_cast<double>(total + 1 - r));

  double w = 0.0;
  std::size_t k = 0;
  while (k < total) {
    std::size_t e = k;
    while (e + 1 < total && pooled[e + 1].value == pooled[k].value) ++e;
    double mid = 0.0;
    for (std::size_t t = k; t <= e; ++t) mid += score[t];
    mid /= static_cast<double>(e - k + 1);
    for (std::size_t t = k; t <= e; ++t)
      if (pooled[t].first) w += mid;
    k = e + 1;
  }

  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  const double dt = static_cast<double>(total);
  double mean = 0.0, var = 0.0;
  if (total % 2 == 0) {
    mean = dn * (dt + 2.0) / 4.0;
    var = dn * dm * (dt + 2.0) * (dt - 2.0) / (48.0 * (dt - 1.0));
  } else {
    mean = dn * (dt + 1.0) * (dt + 1.0) / (4.0 * dt);
    var = dn * dm * (dt + 1.0) * (3.0 + dt * dt) / (48.0 * dt * dt);
  }

  TestResult r;
  r.statistic = std::abs((w - mean) / std::sqrt(var));
  r.threshold = 1.959963984540054;  // two-sided 5%
  r.accepted = r.statistic <= r.threshold;
  return r;
}

/// Normal-approximation confidence interval for the mean of the values.
inline std::pair<double, double> confidence_interval(std::span<const double> values,
                                                     double level = 0.95) {
  if (values.size() < 2) throw DataError("confidence interval needs at least two values");
  double z = 0.0;
  if (level == 0.95)
    z = 1.959963984540054;
  else if (level == 0.90)
    z = 1.6448536269514722;
  else if (level == 0.99)
    z = 2.5758293035489004;
  else
    throw ConfigError("unsupported confidence level");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double stderr_ = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return {mean - z * stderr_, mean + z * stderr_};
}

}  // namespace gmkf
