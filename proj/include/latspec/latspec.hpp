#pragma once
// Umbrella header.

#include "core.hpp"
#include "dispersion.hpp"
#include "quadrature.hpp"
#include "green.hpp"
#include "potential.hpp"
#include "semiclassical.hpp"
#include "inertia.hpp"
#include "boxop.hpp"
#include "birman.hpp"
#include "harness.hpp"
#include "config.hpp"
