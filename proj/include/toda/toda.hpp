#pragma once

#include "toda/coeff_b.hpp"
#include "toda/weight.hpp"
#include "toda/lie_lattice.hpp"
#include "toda/kinematics.hpp"
#include "toda/special_value.hpp"
#include "toda/special_functions.hpp"
#include "toda/hyper_blocks.hpp"
#include "toda/nonscalar_fields.hpp"
#include "toda/structure_constants.hpp"
#include "toda/bootstrap.hpp"
