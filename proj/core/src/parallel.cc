#include "ridgeinfo/parallel.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ridgeinfo {

namespace {
std::atomic<unsigned> g_max_threads{1};
thread_local bool t_inside_worker = false;
}

void set_max_threads(unsigned threads) {
    g_max_threads.store(threads);
}

unsigned max_threads() {
    unsigned t = g_max_threads.load();
    if (t == 0) {
        t = std::max(1u, std::thread::hardware_concurrency());
    }
    return t;
}

void parallel_for(size_t count, const std::function<void(size_t)> &body) {
    size_t workers = std::min<size_t>(max_threads(), count);
    // Nested loops run inline on the calling worker.
    if (workers <= 1 || t_inside_worker) {
        for (size_t i = 0; i < count; i++) {
            body(i);
        }
        return;
    }

    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        bool was_inside = t_inside_worker;
        t_inside_worker = true;
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= count) {
                t_inside_worker = was_inside;
                return;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(count);
                t_inside_worker = was_inside;
                return;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (size_t t = 1; t < workers; t++) {
            pool.emplace_back(work);
        }
        work();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace ridgeinfo
