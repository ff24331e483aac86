#pragma once

// Umbrella header: rank-n approximation of stationary scalar processes via
// principal-component truncation of Toeplitz window covariances, stationary
// state-space extension, and weak-convergence diagnostics.

#include "toepca/converge.hpp"
#include "toepca/covariance.hpp"
#include "toepca/error.hpp"
#include "toepca/io.hpp"
#include "toepca/linalg.hpp"
#include "toepca/pca.hpp"
#include "toepca/quadrature.hpp"
#include "toepca/realize.hpp"
#include "toepca/rng.hpp"
#include "toepca/sample.hpp"
#include "toepca/spectrum.hpp"
#include "toepca/symbol.hpp"
#include "toepca/toeplitz.hpp"
