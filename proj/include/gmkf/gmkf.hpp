#pragma once

// Umbrella header: state estimation for linear systems with Gaussian-mixture
// process and measurement noise, plus the experiment harness around it.

#include "gmkf/ammse.hpp"
#include "gmkf/bank.hpp"
#include "gmkf/bench.hpp"
#include "gmkf/commands.hpp"
#include "gmkf/common.hpp"
#include "gmkf/convergence.hpp"
#include "gmkf/csv.hpp"
#include "gmkf/estimate.hpp"
#include "gmkf/filter.hpp"
#include "gmkf/gaussian.hpp"
#include "gmkf/kalman.hpp"
#include "gmkf/linear_system.hpp"
#include "gmkf/monte_carlo.hpp"
#include "gmkf/noise_model.hpp"
#include "gmkf/reduction.hpp"
#include "gmkf/rng.hpp"
#include "gmkf/scenario.hpp"
#include "gmkf/stats.hpp"
#include "gmkf/trajectory.hpp"
