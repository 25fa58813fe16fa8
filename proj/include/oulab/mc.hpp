#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace oulab {

/// Monte Carlo mean with standard error.
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;

    /// One-sided upper confidence bound mean + z(conf) stderr.
    double upper(double confidence) const;
};

/// Pairwise summation in index order; the result depends only on the values and their order.
double pairwise_sum(std::span<double const> values) noexcept;

/// Sample mean and standard error (two-pass, pairwise reductions). Needs n >= 2.
McEstimate estimate_mean(std::span<double const> values);

/// Number of workers to use; 0 means hardware concurrency.
std::size_t resolve_workers(std::size_t requested) noexcept;

/// Runs task(i) for i in [0, count) across `workers` threads in contiguous
/// blocks. Tasks must write only to slots owned by index i; results are then
/// independent of the worker count.
template <class Task>
void parallel_for(std::size_t count, std::size_t workers, Task&& task)
{
    workers = std::min(resolve_workers(workers), std::max<std::size_t>(count, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            task(i);
        }
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t const chunk = (count + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t const begin = w * chunk;
        std::size_t const end = std::min(count, begin + chunk);
        if (begin >= end) {
            break;
        }
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) {
                    task(i);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace oulab
