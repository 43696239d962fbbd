#pragma once

#include "rifield/certify.hpp"
#include "rifield/convex.hpp"
#include "rifield/entropy_model.hpp"
#include "rifield/grid_function.hpp"
#include "rifield/metric_space.hpp"
#include "rifield/monte_carlo.hpp"
#include "rifield/numeric.hpp"
#include "rifield/process.hpp"
#include "rifield/psi.hpp"
#include "rifield/ri_space.hpp"
#include "rifield/rng.hpp"
#include "rifield/scenario.hpp"
#include "rifield/stats.hpp"
#include "rifield/version.hpp"
