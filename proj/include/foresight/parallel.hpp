#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace foresight {

// Worker count from FORESIGHT_THREADS (0 or unset = hardware concurrency).
inline std::size_t worker_count() {
    std::size_t n = 0;
    if (const char* env = std::getenv("FORESIGHT_THREADS")) {
        try {
            n = static_cast<std::size_t>(std::stoul(env));
        } catch (...) {
            n = 0;
        }
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return n;
}

// Calls body(i) for i in [0, count). Each index runs exactly once; results
// must be written to per-index slots so the outcome does not depend on
// scheduling. The exception of the lowest failing index is rethrown.
template <typename Body>
void parallel_for(std::size_t count, Body&& body, std::size_t workers = worker_count()) {
    if (count == 0) return;
    workers = std::clamp<std::size_t>(workers, 1, count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace foresight
