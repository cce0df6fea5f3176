#pragma once

// Umbrella header.

#include "analytics.hpp"
#include "ensemble.hpp"
#include "error.hpp"
#include "genotype.hpp"
#include "harness.hpp"
#include "ising_landscape.hpp"
#include "landscape.hpp"
#include "landscape_io.hpp"
#include "nk_landscape.hpp"
#include "results_io.hpp"
#include "rng.hpp"
#include "search.hpp"
#include "figures.hpp"
