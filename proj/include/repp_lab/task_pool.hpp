#ifndef REPP_LAB_TASK_POOL_HPP
#define REPP_LAB_TASK_POOL_HPP

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace repp_lab {

inline unsigned default_thread_count() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// Runs fn(task_index) for task_index in [0, n_tasks) on up to n_threads
// threads. The task grid is fixed by the caller, so any per-task output
// written into preallocated slots is independent of the thread count;
// reductions over those slots must be done by the caller in task order.
template <class Fn>
void run_tasks(std::size_t n_tasks, unsigned n_threads, Fn&& fn) {
    if (n_threads == 0) n_threads = default_thread_count();
    if (n_tasks == 0) return;
    if (n_threads == 1 || n_tasks == 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n_tasks) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    unsigned count = static_cast<unsigned>(std::min<std::size_t>(n_threads, n_tasks));
    threads.reserve(count);
    for (unsigned t = 0; t < count; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace repp_lab

#endif
