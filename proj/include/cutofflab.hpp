/// @file cutofflab.hpp
/// @brief Umbrella header for the radial cut-off / exhaustion laboratory.
#pragma once

#include "cutofflab/grid.hpp"
#include "cutofflab/curvature.hpp"
#include "cutofflab/ode.hpp"
#include "cutofflab/tridiag.hpp"
#include "cutofflab/smoothstep.hpp"
#include "cutofflab/bessel.hpp"
#include "cutofflab/model.hpp"
#include "cutofflab/comparison.hpp"
#include "cutofflab/exhaustion.hpp"
#include "cutofflab/cutoff.hpp"
#include "cutofflab/liyau.hpp"
#include "cutofflab/diffusion.hpp"
