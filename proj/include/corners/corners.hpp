#pragma once

// Umbrella header: the whole library.

#include "corners/arrangement.hpp"
#include "corners/collar.hpp"
#include "corners/edging.hpp"
#include "corners/evaluable.hpp"
#include "corners/jets.hpp"
#include "corners/json_io.hpp"
#include "corners/lattice.hpp"
#include "corners/linalg.hpp"
#include "corners/perturb.hpp"
#include "corners/poly.hpp"
#include "corners/polyhedron.hpp"
#include "corners/rational.hpp"
#include "corners/rng.hpp"
#include "corners/transversality.hpp"
