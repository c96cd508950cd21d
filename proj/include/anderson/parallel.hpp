#pragma once

// Trial-level parallelism.
//
// Work is expressed as a pure function of the trial index; results are written
// into per-index slots and reduced afterwards in index order, so the output of
// any experiment is independent of the number of threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace anderson {

class WorkerPool {
public:
    explicit WorkerPool(unsigned threads = 1) : threads_(std::max(1U, threads)) {}

    unsigned threads() const noexcept { return threads_; }

    /// Calls fn(i) for every i in [0, n). Indices are handed out in small
    /// chunks; the first exception (lowest index) is rethrown after all
    /// workers have stopped.
    template <class Fn>
    void for_each(std::size_t n, Fn&& fn) const {
        if (n == 0) return;
        const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads_, n));
        if (workers == 1) {
            for (std::size_t i = 0; i < n; ++i) fn(i);
            return;
        }
        const std::size_t chunk = std::max<std::size_t>(1, n / (workers * 16));
        std::atomic<std::size_t> next{0};
        std::atomic<bool> stop{false};
        std::mutex error_mutex;
        std::exception_ptr error;
        std::size_t error_index = n;

        auto body = [&] {
            while (!stop.load(std::memory_order_relaxed)) {
                const std::size_t begin = next.fetch_add(chunk);
                if (begin >= n) break;
                const std::size_t end = std::min(n, begin + chunk);
                for (std::size_t i = begin; i < end; ++i) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (i < error_index) {
                            error_index = i;
                            error = std::current_exception();
                        }
                        stop.store(true);
                        break;
                    }
                }
            }
        };

        std::vector<std::thread> pool;
        pool.reserve(workers - 1);
        for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
        body();
        for (auto& t : pool) t.join();
        if (error) std::rethrow_exception(error);
    }

    /// Evaluates fn(i) for every i and returns the results in index order.
    template <class T, class Fn>
    std::vector<T> map(std::size_t n, Fn&& fn) const {
        std::vector<T> out(n);
        for_each(n, [&](std::size_t i) { out[i] = fn(i); });
        return out;
    }

private:
    unsigned threads_;
};

/// Resolves the worker count: explicit request, then the
/// ANDERSON_SPECTRA_THREADS environment variable, then 1.
unsigned resolve_thread_count(std::optional<unsigned> requested);

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Mean and standard error of a sample, accumulated in index order.
struct SampleMoments {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation (n - 1)
    double stderr_of_mean = 0.0;
    std::size_t count = 0;
};

SampleMoments sample_moments(const std::vector<double>& xs);

}  // namespace anderson
