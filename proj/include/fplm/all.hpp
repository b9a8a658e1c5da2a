#pragma once

#include "fplm/delaunay.hpp"
#include "fplm/errors.hpp"
#include "fplm/fplm.hpp"
#include "fplm/generators.hpp"
#include "fplm/hull.hpp"
#include "fplm/laplacian.hpp"
#include "fplm/meshio.hpp"
#include "fplm/predicates.hpp"
#include "fplm/simplicial.hpp"
#include "fplm/solver.hpp"
#include "fplm/validity.hpp"
#include "fplm/version.hpp"
