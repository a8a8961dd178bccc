#pragma once

#include "qcs/beltrami.hpp"
#include "qcs/errors.hpp"
#include "qcs/gluing.hpp"
#include "qcs/grid_field.hpp"
#include "qcs/log_complex.hpp"
#include "qcs/nevanlinna.hpp"
#include "qcs/oscillation.hpp"
#include "qcs/parallel.hpp"
#include "qcs/special.hpp"
#include "qcs/spiral.hpp"
#include "qcs/surgery.hpp"
