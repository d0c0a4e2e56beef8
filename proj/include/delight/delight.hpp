#pragma once

// Umbrella header for the delight-gated exploration library.

#include "delight/agents.hpp"
#include "delight/core.hpp"
#include "delight/environments.hpp"
#include "delight/harness.hpp"
#include "delight/mdp.hpp"
#include "delight/posteriors.hpp"
#include "delight/quadrature.hpp"
#include "delight/reservoir.hpp"
#include "delight/rng.hpp"
#include "delight/special_math.hpp"
#include "delight/stats.hpp"
#include "delight/verify.hpp"
