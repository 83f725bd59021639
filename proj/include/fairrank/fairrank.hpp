#pragma once

// Fair ranking under exposure constraints: LP over doubly stochastic matrices,
// Birkhoff-von Neumann sampling, and fairness metrics. JSON/CSV I/O lives
// separately in fairrank/io.hpp.

#include "fairrank/core.hpp"
#include "fairrank/constraints.hpp"
#include "fairrank/lp.hpp"
#include "fairrank/bvn.hpp"
#include "fairrank/sampler.hpp"
#include "fairrank/metrics.hpp"
#include "fairrank/feasibility.hpp"
#include "fairrank/simulator.hpp"
#include "fairrank/datasets.hpp"
