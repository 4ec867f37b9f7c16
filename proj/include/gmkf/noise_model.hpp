#pragma once

#include <utility>

#include "gmkf/gaussian.hpp"
#include "gmkf/linear_system.hpp"

namespace gmkf {

/// How a scalar process-noise variable maps into state space.
enum class ProcessEmbedding {
  None,                // process mixture already has state dimension
  RandomWalkVelocity,  // scalar velocity noise enters as v * [dt, 1]
};

/// Process and measurement noise mixtures for one axis.
struct NoiseModel {
  GaussianMixture process;
  GaussianMixture measurement;
  ProcessEmbedding embedding = ProcessEmbedding::RandomWalkVelocity;
};

/// Lift of a scalar velocity-noise component into (position, velocity) space.
/// The lifted covariance sigma^2 * [dt^2, dt; dt, 1] has rank one.
inline GaussianComponent lift_random_walk_velocity(const GaussianComponent& c, double dt) {
  if (c.dim() != 1) throw ConfigError("random-walk-velocity lift expects a scalar component");
  const double u = c.mean[0];
  const double s2 = c.cov(0, 0);
  GaussianComponent out;
  out.weight = c.weight;
  out.mean = Vector{{u * dt, u}};
  out.cov = s2 * Matrix{{dt * dt, dt}, {dt, 1.0}};
  return out;
}

/// Process mixture in state coordinates.
inline GaussianMixture lifted_process(const NoiseModel& noise, double dt) {
  if (noise.embedding == ProcessEmbedding::None) return noise.process;
  std::vector<GaussianComponent> comps;
  comps.reserve(noise.process.size());
  for (const auto& c : noise.process.components())
    comps.push_back(lift_random_walk_velocity(c, dt));
  return GaussianMixture(std::move(comps));
}

}  // namespace gmkf
