#include "qfc/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace qfc {

int worker_count() {
    int n = 0;
    if (const char* env = std::getenv("QFCBENCH_THREADS")) {
        n = std::atoi(env);
    }
    if (n <= 0) {
        n = static_cast<int>(std::thread::hardware_concurrency());
        if (n <= 0) n = 1;
    }
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                body(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace qfc
