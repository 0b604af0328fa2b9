#pragma once

#include "thermoflux/error.hpp"
#include "thermoflux/grid.hpp"
#include "thermoflux/thermo_models.hpp"
#include "thermoflux/pde_solver.hpp"
#include "thermoflux/quadrature.hpp"
#include "thermoflux/aux_analysis.hpp"
#include "thermoflux/diagnostics.hpp"
#include "thermoflux/config.hpp"
#include "thermoflux/invariants.hpp"
#include "thermoflux/commands.hpp"
