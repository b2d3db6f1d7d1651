#pragma once

#include "osrf/analysis.hpp"
#include "osrf/config.hpp"
#include "osrf/dims.hpp"
#include "osrf/errors.hpp"
#include "osrf/fieldsim.hpp"
#include "osrf/polar.hpp"
#include "osrf/spectral.hpp"
#include "osrf/stablerng.hpp"
