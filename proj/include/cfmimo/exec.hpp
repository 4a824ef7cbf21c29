#pragma once

namespace cfmimo {

// Execution policy for the data-parallel kernels (dataset generation,
// Monte-Carlo trials, batch inference). Serial is the reference path kept
// for testing; the OpenMP path must produce bit-identical results, which
// the kernels guarantee by fixed chunking and ordered reduction.
enum class Exec { Serial, Parallel };

}  // namespace cfmimo
