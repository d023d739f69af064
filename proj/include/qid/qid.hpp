#pragma once

// Umbrella header for the quasi-infinitely divisible distribution toolkit.

#include "convergence.hpp"
#include "cuppens.hpp"
#include "density.hpp"
#include "errors.hpp"
#include "json_io.hpp"
#include "lattice.hpp"
#include "measure.hpp"
#include "moments.hpp"
#include "stable.hpp"
#include "support.hpp"
#include "triplet.hpp"
