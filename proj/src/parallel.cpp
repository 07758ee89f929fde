#include "stickylab/parallel.hpp"

#include <cstdlib>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace stickylab {

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("STICKYLAB_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_blocks(std::size_t n, int workers,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t w = static_cast<std::size_t>(workers < 1 ? 1 : workers);
    if (w > n) w = n;
    if (w == 1) {
        fn(0, n);
        return;
    }
    std::size_t base = n / w, extra = n % w;
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(w);
    std::size_t begin = 0;
    for (std::size_t i = 0; i < w; ++i) {
        std::size_t len = base + (i < extra ? 1 : 0);
        std::size_t end = begin + len;
        threads.emplace_back([&fn, &errors, i, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        });
        begin = end;
    }
    for (std::thread& t : threads) t.join();
    for (std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace stickylab
