#pragma once

#include "pliers/dataio.hpp"
#include "pliers/error.hpp"
#include "pliers/experiments.hpp"
#include "pliers/graph.hpp"
#include "pliers/metrics.hpp"
#include "pliers/recommenders.hpp"
#include "pliers/rng.hpp"
