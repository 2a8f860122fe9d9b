#pragma once

#include "fiberuq/bkde.hpp"
#include "fiberuq/distribution.hpp"
#include "fiberuq/error.hpp"
#include "fiberuq/field.hpp"
#include "fiberuq/geometry.hpp"
#include "fiberuq/image.hpp"
#include "fiberuq/interior_probability.hpp"
#include "fiberuq/io.hpp"
#include "fiberuq/kernels.hpp"
#include "fiberuq/monte_carlo.hpp"
#include "fiberuq/surface.hpp"
#include "fiberuq/synth.hpp"
#include "fiberuq/volume.hpp"
