#pragma once
// Umbrella header for the numerical library. The command-line layer in
// cli.hpp is separate because it pulls in CLI11.

#include "analytic.hpp"
#include "diffusion.hpp"
#include "errors.hpp"
#include "freepath.hpp"
#include "montecarlo.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "specfun.hpp"
#include "transform.hpp"
