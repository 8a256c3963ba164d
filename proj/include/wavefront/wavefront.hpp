#pragma once

// Umbrella header.

#include "wavefront/error.hpp"
#include "wavefront/numerics.hpp"
#include "wavefront/interval_map.hpp"
#include "wavefront/birth_model.hpp"
#include "wavefront/char_spectrum.hpp"
#include "wavefront/map_dynamics.hpp"
#include "wavefront/profile_solver.hpp"
#include "wavefront/shape_classifier.hpp"
#include "wavefront/pde_oracle.hpp"
