#pragma once

// Umbrella header for the simulation library.

#include "tpbsim/error.hpp"
#include "tpbsim/rng.hpp"
#include "tpbsim/model.hpp"
#include "tpbsim/population.hpp"
#include "tpbsim/metrics.hpp"
#include "tpbsim/sweep.hpp"
#include "tpbsim/config.hpp"
#include "tpbsim/csv.hpp"
#include "tpbsim/svg.hpp"
#include "tpbsim/manifest.hpp"
