#pragma once

// Umbrella header for the conefp library: eigenvectors, combinatorial
// structure and convergence-rate certification for order-preserving
// homogeneous maps on the positive orthant, plus their topical (log
// coordinate) counterparts.

#include "conefp/cone_metrics.hpp"
#include "conefp/digraph.hpp"
#include "conefp/eig.hpp"
#include "conefp/errors.hpp"
#include "conefp/iteration.hpp"
#include "conefp/map_models.hpp"
#include "conefp/matrix.hpp"
#include "conefp/positive_vector.hpp"
#include "conefp/rate.hpp"
#include "conefp/rng.hpp"
#include "conefp/structure.hpp"
#include "conefp/topical.hpp"
#include "conefp/version.hpp"
