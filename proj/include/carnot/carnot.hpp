#pragma once

#include "carnot/checks.hpp"
#include "carnot/derivative.hpp"
#include "carnot/group.hpp"
#include "carnot/group_io.hpp"
#include "carnot/measure.hpp"
#include "carnot/partition.hpp"
#include "carnot/potential.hpp"
#include "carnot/random.hpp"
#include "carnot/report.hpp"
#include "carnot/spatial.hpp"
#include "carnot/tiling.hpp"
#include "carnot/version.hpp"
