#pragma once

// Umbrella header.

#include "core.hpp"
#include "errors.hpp"
#include "funcspace.hpp"
#include "maps.hpp"
#include "rational.hpp"
#include "realizers.hpp"
#include "reals.hpp"
#include "reps.hpp"
#include "space_io.hpp"
#include "totality.hpp"
#include "trace_io.hpp"
#include "uniformity.hpp"
