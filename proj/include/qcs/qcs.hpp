#pragma once

#include "qcs/adiabatic.hpp"
#include "qcs/constants.hpp"
#include "qcs/errors.hpp"
#include "qcs/heavy_dynamics.hpp"
#include "qcs/potential.hpp"
#include "qcs/roots.hpp"
#include "qcs/scattering.hpp"
#include "qcs/specfun.hpp"
#include "qcs/truncated_system.hpp"
#include "qcs/twobody.hpp"
