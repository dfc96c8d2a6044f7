#pragma once

#include "ecfv/config.hpp"
#include "ecfv/entropy_diagnostics.hpp"
#include "ecfv/errors.hpp"
#include "ecfv/euler.hpp"
#include "ecfv/fluxes.hpp"
#include "ecfv/harness.hpp"
#include "ecfv/means.hpp"
#include "ecfv/mesh.hpp"
#include "ecfv/newton.hpp"
#include "ecfv/quadrature.hpp"
#include "ecfv/time_integrators.hpp"
