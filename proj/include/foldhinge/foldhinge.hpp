#pragma once

#include "foldhinge/atmosphere.hpp"
#include "foldhinge/dispersion.hpp"
#include "foldhinge/error.hpp"
#include "foldhinge/hinge_geometry.hpp"
#include "foldhinge/hinge_mechanics.hpp"
#include "foldhinge/quadrature.hpp"
#include "foldhinge/random.hpp"
#include "foldhinge/recovery.hpp"
#include "foldhinge/units.hpp"
