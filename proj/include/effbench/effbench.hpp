#pragma once

// Umbrella header for the effbench library.

#include "effbench/core.hpp"      // IWYU pragma: export
#include "effbench/ingest.hpp"    // IWYU pragma: export
#include "effbench/metrics.hpp"   // IWYU pragma: export
#include "effbench/report.hpp"    // IWYU pragma: export
#include "effbench/scheme.hpp"    // IWYU pragma: export
#include "effbench/simulate.hpp"  // IWYU pragma: export
