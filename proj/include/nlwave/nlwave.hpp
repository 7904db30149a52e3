#pragma once

#include "nlwave/analytic.hpp"
#include "nlwave/discrete_ops.hpp"
#include "nlwave/error.hpp"
#include "nlwave/experiments.hpp"
#include "nlwave/grid.hpp"
#include "nlwave/integrator.hpp"
#include "nlwave/kernel.hpp"
#include "nlwave/system.hpp"
