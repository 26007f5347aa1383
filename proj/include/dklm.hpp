#pragma once

// Data-driven kernel learning for nonlinear subspace clustering.

#include "dklm/bootstrap.hpp"
#include "dklm/core.hpp"
#include "dklm/datagen.hpp"
#include "dklm/io.hpp"
#include "dklm/kernel.hpp"
#include "dklm/metrics.hpp"
#include "dklm/numerics.hpp"
#include "dklm/pipeline.hpp"
#include "dklm/solver.hpp"
#include "dklm/spectral.hpp"
#include "dklm/sym_matrix.hpp"
