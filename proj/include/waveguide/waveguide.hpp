#pragma once

// Umbrella header for the waveguide library.

#include "waveguide/errors.hpp"
#include "waveguide/quadrature.hpp"
#include "waveguide/transverse.hpp"
#include "waveguide/profile.hpp"
#include "waveguide/bskernel.hpp"
#include "waveguide/spectrum.hpp"
#include "waveguide/asymptotics.hpp"
#include "waveguide/bounds.hpp"
#include "waveguide/oracle.hpp"
#include "waveguide/config.hpp"
#include "waveguide/run.hpp"
