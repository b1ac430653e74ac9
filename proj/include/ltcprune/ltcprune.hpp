#pragma once

// Convenience umbrella for the whole toolkit.

#include "ltcprune/causality.hpp"
#include "ltcprune/charts.hpp"
#include "ltcprune/config.hpp"
#include "ltcprune/dataset.hpp"
#include "ltcprune/errors.hpp"
#include "ltcprune/integrate.hpp"
#include "ltcprune/jsonio.hpp"
#include "ltcprune/ltc.hpp"
#include "ltcprune/manifest.hpp"
#include "ltcprune/numeric.hpp"
#include "ltcprune/pruner.hpp"
#include "ltcprune/rng.hpp"
#include "ltcprune/serialize.hpp"
#include "ltcprune/signal.hpp"
#include "ltcprune/testbeds.hpp"
#include "ltcprune/training.hpp"
#include "ltcprune/version.hpp"
