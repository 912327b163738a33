#pragma once

// Invariant Einstein metrics on compact homogeneous spaces: structure
// constants in, Lichnerowicz spectrum and G-stability verdict out.

#include "einstab/catalog.hpp"
#include "einstab/classical.hpp"
#include "einstab/curvature.hpp"
#include "einstab/errors.hpp"
#include "einstab/isotropy.hpp"
#include "einstab/json_io.hpp"
#include "einstab/lichnerowicz.hpp"
#include "einstab/linalg.hpp"
#include "einstab/reductive.hpp"
#include "einstab/stability.hpp"
#include "einstab/structure_tensor.hpp"
