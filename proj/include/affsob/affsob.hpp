#pragma once

#include "affsob/core/error.hpp"
#include "affsob/core/parallel.hpp"
#include "affsob/core/random.hpp"
#include "affsob/core/small_matrix.hpp"
#include "affsob/field/affine_map.hpp"
#include "affsob/field/grid.hpp"
#include "affsob/field/io.hpp"
#include "affsob/field/liminf.hpp"
#include "affsob/field/mask.hpp"
#include "affsob/field/quadrature.hpp"
#include "affsob/field/resample.hpp"
#include "affsob/field/scalar_field.hpp"
#include "affsob/field/stencil.hpp"
#include "affsob/energy/diagnostics.hpp"
#include "affsob/energy/gram.hpp"
#include "affsob/energy/sphere.hpp"
#include "affsob/energy/transform.hpp"
#include "affsob/operator/affine_laplacian.hpp"
#include "affsob/operator/cg.hpp"
#include "affsob/operator/stencil.hpp"
#include "affsob/solvers/bubble.hpp"
#include "affsob/solvers/config.hpp"
#include "affsob/solvers/ground_state.hpp"
#include "affsob/solvers/poisson.hpp"
#include "affsob/profiles/extract.hpp"
#include "affsob/profiles/normalize.hpp"
#include "affsob/profiles/windowed_mass.hpp"
