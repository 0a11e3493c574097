#pragma once

#include "layerfit/error.hpp"
#include "layerfit/geometry.hpp"
#include "layerfit/grids.hpp"
#include "layerfit/harness.hpp"
#include "layerfit/interpolation.hpp"
#include "layerfit/linsolve.hpp"
#include "layerfit/operators.hpp"
#include "layerfit/pipeline.hpp"
#include "layerfit/problems.hpp"
