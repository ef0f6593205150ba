#pragma once

#include "ncdir/dist.hpp"
#include "ncdir/errors.hpp"
#include "ncdir/moments.hpp"
#include "ncdir/rng.hpp"
#include "ncdir/series_control.hpp"
#include "ncdir/sim.hpp"
#include "ncdir/specfun.hpp"
#include "ncdir/stats.hpp"
#include "ncdir/variates.hpp"

namespace ncdir {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ncdir
