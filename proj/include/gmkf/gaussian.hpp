#pragma once

#include <utility>
#include <vector>

#include "gmkf/common.hpp"
#include "gmkf/rng.hpp"

namespace gmkf {

/// One weighted Gaussian. Covariances may be rank deficient (PSD); operations
/// that need strict positive definiteness say so.
struct GaussianComponent {
  double weight = 1.0;
  Vector mean;
  Matrix cov;

  int dim() const { return static_cast<int>(mean.size()); }
};

namespace detail {

inline void validate_component(const GaussianComponent& c) {
  if (c.weight < 0.0) throw ConfigError("component weight must be nonnegative");
  if (c.cov.rows() != c.mean.size() || c.cov.cols() != c.mean.size())
    throw ConfigError("covariance shape does not match mean dimension");
  if ((c.cov - c.cov.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw ConfigError("covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(c.cov, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw ConfigError("covariance has a negative eigenvalue");
}

}  // namespace detail

/// Weighted set of Gaussian components over a common dimension. Weights must
/// sum to one within 1e-12; zero-weight components are kept so that component
/// indices stay stable.
class GaussianMixture {
 public:
  explicit GaussianMixture(std::vector<GaussianComponent> components)
      : components_(std::move(components)) {
    if (components_.empty()) throw ConfigError("mixture needs at least one component");
    dim_ = components_.front().dim();
    double sum = 0.0;
    for (const auto& c : components_) {
      detail::validate_component(c);
      if (c.dim() != dim_) throw ConfigError("mixture components disagree on dimension");
      sum += c.weight;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw ConfigError("mixture weights sum to " + std::to_string(sum) + ", expected 1");
  }

  /// Univariate mixture from parallel weight/mean/variance lists.
  static GaussianMixture scalar(const std::vector<double>& weights,
                                const std::vector<double>& means,
                                const std::vector<double>& variances) {
    if (weights.size() != means.size() || weights.size() != variances.size())
      throw ConfigError("scalar mixture lists must have equal length");
    std::vector<GaussianComponent> comps;
    comps.reserve(weights.size());
    for (std::size_t k = 0; k < weights.size(); ++k) {
      GaussianComponent c;
      c.weight = weights[k];
      c.mean = Vector::Constant(1, means[k]);
      c.cov = Matrix::Constant(1, 1, variances[k]);
      comps.push_back(std::move(c));
    }
    return GaussianMixture(std::move(comps));
  }

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(components_.size()); }
  const std::vector<GaussianComponent>& components() const { return components_; }
  const GaussianComponent& component(int k) const { return components_.at(k); }

  std::vector<double> weights() const {
    std::vector<double> w;
    w.reserve(components_.size());
    for (const auto& c : components_) w.push_back(c.weight);
    return w;
  }

 private:
  std::vector<GaussianComponent> components_;
  int dim_ = 0;
};

/// Exact multivariate normal log-density. Requires SPD covariance unless
/// jitter is enabled.
inline double gaussian_logpdf(const Vector& x, const Vector& mean, const Matrix& cov,
                              const Jitter& jitter = {}) {
  if (x.size() != mean.size() || cov.rows() != x.size())
    throw ConfigError("gaussian_logpdf dimension mismatch");
  const auto llt = cholesky(cov, jitter);
  const Vector d = x - mean;
  const double qf = llt.matrixL().solve(d).squaredNorm();
  const double n = static_cast<double>(x.size());
  return -0.5 * (n * std::log(2.0 * kPi) + logdet_from_llt(llt) + qf);
}

/// Single Gaussian with the mixture's mean and covariance, including the
/// spread-of-means term.
inline GaussianComponent moment_match(const GaussianMixture& mix) {
  Vector mean = Vector::Zero(mix.dim());
  for (const auto& c : mix.components()) mean += c.weight * c.mean;
  Matrix cov = Matrix::Zero(mix.dim(), mix.dim());
  for (const auto& c : mix.components()) {
    const Vector d = c.mean - mean;
    cov += c.weight * (c.cov + d * d.transpose());
  }
  return GaussianComponent{1.0, std::move(mean), symmetrized(cov)};
}

/// Noise draw together with the index of the component that generated it.
struct LabeledSample {
  Vector value;
  int component_index = 0;
};

namespace detail {

/// Square-root factor usable for sampling from a PSD (possibly rank
/// deficient) covariance.
inline Matrix sampling_root(const Matrix& cov) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  Vector lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
}

inline int pick_component(const GaussianMixture& mix, double u) {
  double cum = 0.0;
  int last_positive = 0;
  for (int k = 0; k < mix.size(); ++k) {
    const double w = mix.component(k).weight;
    if (w > 0.0) last_positive = k;
    cum += w;
    if (u < cum && w > 0.0) return k;
  }
  return last_positive;  // u landed on the rounding slack at the top
}

}  // namespace detail

/// Ancestral sampling: pick a component by weight, then draw from it.
inline std::vector<LabeledSample> sample_mixture(const GaussianMixture& mix, Rng& rng, int n) {
  if (n < 0) throw ConfigError("sample count must be nonnegative");
  std::vector<Matrix> roots;
  roots.reserve(mix.size());
  for (const auto& c : mix.components()) roots.push_back(detail::sampling_root(c.cov));
  std::vector<LabeledSample> out;
  out.reserve(n);
  Vector z(mix.dim());
  for (int s = 0; s < n; ++s) {
    const int k = detail::pick_component(mix, rng.uniform());
    for (int d = 0; d < mix.dim(); ++d) z[d] = rng.normal();
    out.push_back({mix.component(k).mean + roots[k] * z, k});
  }
  return out;
}

/// Mixture density with per-component factorizations done once.
class MixtureDensity {
 public:
  explicit MixtureDensity(const GaussianMixture& mix, const Jitter& jitter = {}) {
    for (const auto& c : mix.components()) {
      if (c.weight <= 0.0) continue;
      Comp p;
      p.logw = std::log(c.weight);
      p.mean = c.mean;
      p.llt = cholesky(c.cov, jitter);
      p.lognorm = -0.5 * (c.dim() * std::log(2.0 * kPi) + logdet_from_llt(p.llt));
      comps_.push_back(std::move(p));
    }
    scratch_.resize(comps_.size());
  }

  double logpdf(const Vector& x) const {
    for (std::size_t k = 0; k < comps_.size(); ++k) {
      const auto& c = comps_[k];
      scratch_[k] = c.logw + c.lognorm - 0.5 * c.llt.matrixL().solve(x - c.mean).squaredNorm();
    }
    return log_sum_exp(scratch_);
  }

 private:
  struct Comp {
    double logw = 0.0;
    Vector mean;
    Eigen::LLT<Matrix> llt;
    double lognorm = 0.0;
  };
  std::vector<Comp> comps_;
  mutable std::vector<double> scratch_;
};

/// Monte-Carlo estimate of KL(mixture || moment-matched Gaussian) in nats,
/// sampling from the mixture side. Clamped at zero from below.
inline double kl_to_moment_matched(const GaussianMixture& mix, int n_samples, Rng& rng,
                                   const Jitter& jitter = {}) {
  if (n_samples < 1000) throw ConfigError("KL estimate needs at least 1000 samples");
  const GaussianComponent mm = moment_match(mix);
  const MixtureDensity gm(mix, jitter);
  const auto mm_llt = cholesky(mm.cov, jitter);
  const double mm_lognorm =
      -0.5 * (mix.dim() * std::log(2.0 * kPi) + logdet_from_llt(mm_llt));

  std::vector<Matrix> roots;
  roots.reserve(mix.size());
  for (const auto& c : mix.components()) roots.push_back(detail::sampling_root(c.cov));

  double acc = 0.0;
  Vector z(mix.dim()), x(mix.dim());
  for (int s = 0; s < n_samples; ++s) {
    const int k = detail::pick_component(mix, rng.uniform());
    for (int d = 0; d < mix.dim(); ++d) z[d] = rng.normal();
    x = mix.component(k).mean + roots[k] * z;
    const double lq = mm_lognorm - 0.5 * mm_llt.matrixL().solve(x - mm.mean).squaredNorm();
    acc += gm.logpdf(x) - lq;
  }
  return std::max(acc / n_samples, 0.0);
}

}  // namespace gmkf
