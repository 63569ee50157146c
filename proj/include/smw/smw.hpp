#pragma once

// Umbrella header for the whole library.

#include "errors.hpp"
#include "vector.hpp"
#include "dense.hpp"
#include "csr.hpp"
#include "matrix_market.hpp"
#include "fft.hpp"
#include "circulant.hpp"
#include "splitting.hpp"
#include "solvers.hpp"
#include "problems.hpp"
#include "bench.hpp"
