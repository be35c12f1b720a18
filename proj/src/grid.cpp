#include "bpwa/grid.hpp"

#include <omp.h>

#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

namespace bpwa {

int worker_count() {
    if (const char* env = std::getenv("BPWA_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return int(v);
    }
    return omp_get_max_threads();
}

void for_each_cell(Execution exec, std::size_t n, const std::function<void(std::size_t)>& f) {
    if (exec == Execution::Serial || n < 2) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::exception_ptr> errors(n);
    const long count = long(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
    for (long i = 0; i < count; ++i) {
        try {
            f(std::size_t(i));
        } catch (...) {
            errors[std::size_t(i)] = std::current_exception();
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace bpwa
