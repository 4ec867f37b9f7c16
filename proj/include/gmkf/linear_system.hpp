#pragma once

#include "gmkf/common.hpp"

namespace gmkf {

/// Time-invariant linear dynamic/measurement model with a constant step.
struct LinearSystem {
  Matrix F;  // state transition, n_x x n_x
  Matrix H;  // measurement,      n_z x n_x
  double dt = 0.1080;

  int state_dim() const { return static_cast<int>(F.rows()); }
  int meas_dim() const { return static_cast<int>(H.rows()); }

  void validate() const {
    if (F.rows() != F.cols()) throw ConfigError("state transition must be square");
    if (H.cols() != F.rows()) throw ConfigError("measurement matrix has wrong column count");
    if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  }
};

/// Per-axis position/velocity model: position integrates velocity, only the
/// position is measured.
inline LinearSystem position_velocity_system(double dt = 0.1080) {
  LinearSystem sys;
  sys.F = Matrix{{1.0, dt}, {0.0, 1.0}};
  sys.H = Matrix{{1.0, 0.0}};
  sys.dt = dt;
  sys.validate();
  return sys;
}

}  // namespace gmkf
