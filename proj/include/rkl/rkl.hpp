#pragma once

// Umbrella header for the rkl library: conditional orthogonal polynomial
// ensembles of rigid point processes, their Christoffel-Darboux kernels,
// and the sine-kernel comparison machinery.

#include "rkl/equilibrium.hpp"
#include "rkl/expfield.hpp"
#include "rkl/numerics.hpp"
#include "rkl/orthopoly.hpp"
#include "rkl/pointconf.hpp"
#include "rkl/quadrature.hpp"
#include "rkl/sampler.hpp"
#include "rkl/universality.hpp"
#include "rkl/weights.hpp"

namespace rkl {
inline constexpr const char* version = "0.1.0";
}
