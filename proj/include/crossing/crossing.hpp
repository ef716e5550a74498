#pragma once

#include "crossing/branching_law.hpp"
#include "crossing/comparison.hpp"
#include "crossing/crossing_distribution.hpp"
#include "crossing/error.hpp"
#include "crossing/model.hpp"
#include "crossing/philox.hpp"
#include "crossing/rho_series.hpp"
#include "crossing/root_solver.hpp"
#include "crossing/simulation.hpp"
#include "crossing/truncated_series.hpp"
