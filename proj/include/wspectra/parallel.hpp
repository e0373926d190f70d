#pragma once
// Execution policy shared by every sweep: a plain serial loop kept as the
// reference path, and an OpenMP loop for production runs.  Both write into
// per-index slots, so results are identical regardless of thread count.

#include <cstddef>
#include <functional>

namespace wspectra {

enum class Exec { serial, parallel };

// Worker cap: WSPECTRA_THREADS if set to a positive integer, else the
// OpenMP default.
int worker_count();

// Runs body(i) for i in [0, n).  Exceptions thrown by body are captured and
// the first one (lowest index) is rethrown after the loop.
void for_each_index(std::size_t n, Exec exec, const std::function<void(std::size_t)>& body);

}  // namespace wspectra
