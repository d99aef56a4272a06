#pragma once

// Umbrella header.

#include "shapedepth/deepest.hpp"
#include "shapedepth/depth.hpp"
#include "shapedepth/errors.hpp"
#include "shapedepth/halfspace.hpp"
#include "shapedepth/inference.hpp"
#include "shapedepth/io.hpp"
#include "shapedepth/mcd.hpp"
#include "shapedepth/rng.hpp"
#include "shapedepth/samplers.hpp"
#include "shapedepth/spd.hpp"

namespace shapedepth {
inline constexpr const char* kVersion = "0.1.0";
}
