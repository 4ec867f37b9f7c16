#pragma once

#include <utility>
#include <vector>

#include "gmkf/rng.hpp"
#include "gmkf/scenario.hpp"

namespace gmkf {

/// Ground truth, measurements and the active noise-component labels of one
/// synthetic experiment.
struct Trajectory {
  std::vector<Vector> states;
  std::vector<Vector> measurements;
  std::vector<std::pair<int, int>> labels;

  int size() const { return static_cast<int>(states.size()); }
};

/// Simulate the linear dynamics from the zero state, drawing labeled noise
/// from the scenario's mixtures.
inline Trajectory generate_trajectory(const Scenario& scenario, Rng& rng) {
  const LinearSystem sys = scenario.system();
  const NoiseModel noise = scenario.noise();

  std::vector<Matrix> proc_roots, meas_roots;
  for (const auto& c : noise.process.components())
    proc_roots.push_back(detail::sampling_root(c.cov));
  for (const auto& c : noise.measurement.components())
    meas_roots.push_back(detail::sampling_root(c.cov));

  Trajectory out;
  out.states.reserve(scenario.horizon);
  out.measurements.reserve(scenario.horizon);
  out.labels.reserve(scenario.horizon);

  Vector x = Vector::Zero(sys.state_dim());
  Vector zp(noise.process.dim()), zm(noise.measurement.dim());
  for (int k = 0; k < scenario.horizon; ++k) {
    const int i = detail::pick_component(noise.process, rng.uniform());
    for (int d = 0; d < noise.process.dim(); ++d) zp[d] = rng.normal();
    const Vector v = noise.process.component(i).mean + proc_roots[i] * zp;
    if (noise.embedding == ProcessEmbedding::RandomWalkVelocity) {
      x = sys.F * x;
      x[0] += v[0] * sys.dt;
      x[1] += v[0];
    } else {
      x = sys.F * x + v;
    }

    const int j = detail::pick_component(noise.measurement, rng.uniform());
    for (int d = 0; d < noise.measurement.dim(); ++d) zm[d] = rng.normal();
    const Vector w = noise.measurement.component(j).mean + meas_roots[j] * zm;

    out.states.push_back(x);
    out.measurements.push_back(sys.H * x + w);
    out.labels.emplace_back(i, j);
  }
  return out;
}

}  // namespace gmkf
