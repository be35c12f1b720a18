#pragma once

#include <cstddef>
#include <functional>

namespace bpwa {

enum class Execution { Serial, Parallel };

// Worker bound from BPWA_THREADS, else the OpenMP default.
int worker_count();

// Runs f(i) for i in [0, n). Each cell writes only its own output slot, so the parallel and serial
// paths give identical results. The lowest-index exception is rethrown after all cells finish.
void for_each_cell(Execution exec, std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace bpwa
