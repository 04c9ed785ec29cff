#include "mlpr/parallel.hpp"

#include <algorithm>

namespace mlpr {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int count) { g_max_threads.store(count < 0 ? 0 : count); }

int max_threads() {
    int configured = g_max_threads.load();
    if (configured > 0) return configured;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_chunks(int total, const std::function<void(int, int, int)>& fn) {
    if (total <= 0) return;
    const int chunks = chunk_count(total);
    const int workers = std::min(chunks, max_threads());
    if (workers <= 1) {
        for (int c = 0; c < chunks; ++c)
            fn(c, c * kChunkSize, std::min(total, (c + 1) * kChunkSize));
        return;
    }
    std::atomic<int> next{0};
    auto body = [&] {
        for (;;) {
            int c = next.fetch_add(1);
            if (c >= chunks) return;
            fn(c, c * kChunkSize, std::min(total, (c + 1) * kChunkSize));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
}

} // namespace mlpr
