#pragma once

// Single include for the whole library.
#include "trisphere/ball_stats.hpp"
#include "trisphere/bounds.hpp"
#include "trisphere/experiment.hpp"
#include "trisphere/fdm2d.hpp"
#include "trisphere/presets.hpp"
#include "trisphere/radial.hpp"
#include "trisphere/rng.hpp"
#include "trisphere/structural.hpp"
#include "trisphere/verify.hpp"
