#include "cjm/backend.hpp"

#include "cjm/errors.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace cjm {

// Persistent fork-join pool. The calling thread acts as worker 0.
class WorkerPool {
public:
    explicit WorkerPool(int workers) : workers_(workers) {
        threads_.reserve(static_cast<std::size_t>(workers - 1));
        for (int w = 1; w < workers; ++w) {
            threads_.emplace_back([this, w] { loop(w); });
        }
    }

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    ~WorkerPool() {
        {
            std::lock_guard lock(mutex_);
            stop_ = true;
        }
        wake_.notify_all();
        for (auto& t : threads_) {
            t.join();
        }
    }

    void run(const std::function<void(int)>& job) {
        // One job at a time per pool; Backend copies share the pool.
        std::lock_guard run_lock(run_mutex_);
        errors_.assign(static_cast<std::size_t>(workers_), nullptr);
        {
            std::lock_guard lock(mutex_);
            job_ = &job;
            pending_ = workers_ - 1;
            ++generation_;
        }
        wake_.notify_all();
        execute(job, 0);
        {
            std::unique_lock lock(mutex_);
            done_.wait(lock, [this] { return pending_ == 0; });
            job_ = nullptr;
        }
        for (auto& e : errors_) {
            if (e) {
                try {
                    std::rethrow_exception(e);
                } catch (const Error&) {
                    throw;
                } catch (const std::exception& ex) {
                    throw BackendError(std::string("kernel failed: ") + ex.what());
                } catch (...) {
                    throw BackendError("kernel failed with a non-standard exception");
                }
            }
        }
    }

private:
    void execute(const std::function<void(int)>& job, int w) {
        try {
            job(w);
        } catch (...) {
            errors_[static_cast<std::size_t>(w)] = std::current_exception();
        }
    }

    void loop(int w) {
        std::uint64_t seen = 0;
        for (;;) {
            const std::function<void(int)>* job = nullptr;
            {
                std::unique_lock lock(mutex_);
                wake_.wait(lock, [&] { return stop_ || generation_ != seen; });
                if (stop_) return;
                seen = generation_;
                job = job_;
            }
            execute(*job, w);
            {
                std::lock_guard lock(mutex_);
                --pending_;
            }
            done_.notify_one();
        }
    }

    int workers_;
    std::vector<std::thread> threads_;
    std::mutex run_mutex_;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable done_;
    const std::function<void(int)>* job_ = nullptr;
    std::vector<std::exception_ptr> errors_;
    std::uint64_t generation_ = 0;
    int pending_ = 0;
    bool stop_ = false;
};

Backend::Backend(BackendKind kind, int workers, int chunk)
    : kind_(kind), workers_(workers), chunk_(chunk) {}

Backend Backend::serial() {
    return Backend(BackendKind::Serial, 1, 0);
}

Backend Backend::parallel(int workers, int chunk) {
    if (workers < 1) {
        throw ConfigError("parallel backend needs at least one worker");
    }
    if (chunk < 0) {
        throw ConfigError("row-block size must be positive");
    }
    Backend b(BackendKind::Parallel, workers, chunk);
    if (workers > 1) {
        b.pool_ = std::make_shared<WorkerPool>(workers);
    }
    return b;
}

std::string Backend::describe() const {
    if (kind_ == BackendKind::Serial) {
        return "serial";
    }
    return "parallel(" + std::to_string(workers_) + ")";
}

int Backend::block_size(int rows) const {
    if (chunk_ > 0) {
        return chunk_;
    }
    return std::max(1, (rows + workers_ - 1) / workers_);
}

void Backend::for_rows(int first, int last, const std::function<void(int, int)>& fn) const {
    const int rows = last - first + 1;
    if (rows <= 0) {
        return;
    }
    if (!pool_) {
        try {
            fn(first, last + 1);
        } catch (const Error&) {
            throw;
        } catch (const std::exception& ex) {
            throw BackendError(std::string("kernel failed: ") + ex.what());
        }
        return;
    }
    const int block = block_size(rows);
    const int blocks = (rows + block - 1) / block;
    pool_->run([&](int w) {
        for (int k = w; k < blocks; k += workers_) {
            const int begin = first + k * block;
            fn(begin, std::min(begin + block, last + 1));
        }
    });
}

double Backend::max_rows(int first, int last, const std::function<double(int, int)>& fn) const {
    const int rows = last - first + 1;
    double result = -std::numeric_limits<double>::infinity();
    if (rows <= 0) {
        return result;
    }
    const int block = pool_ ? block_size(rows) : rows;
    const int blocks = (rows + block - 1) / block;
    std::vector<double> partial(static_cast<std::size_t>(blocks),
                                -std::numeric_limits<double>::infinity());
    for_rows(first, last, [&](int begin, int end) {
        // Sub-ranges handed out by for_rows always start on a block boundary.
        for (int b = begin; b < end; b += block) {
            partial[static_cast<std::size_t>((b - first) / block)] =
                fn(b, std::min(b + block, end));
        }
    });
    for (double p : partial) {
        result = nan_max(result, p);
    }
    return result;
}

void par_map_interior(const Backend& backend, const Grid& grid,
                      const std::function<double(int, int)>& kernel, Field& out) {
    if (&out.grid() != &grid) {
        throw ConfigError("output field is defined on a different grid");
    }
    backend.for_rows(1, grid.nx() - 1, [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            for (int j = 1; j <= grid.ny() - 1; ++j) {
                out(i, j) = kernel(i, j);
            }
        }
    });
}

double par_max_reduce(const Backend& backend, const Grid& grid,
                      const std::function<double(int, int)>& node_fn) {
    return backend.max_rows(1, grid.nx() - 1, [&](int begin, int end) {
        double m = -std::numeric_limits<double>::infinity();
        for (int i = begin; i < end; ++i) {
            for (int j = 1; j <= grid.ny() - 1; ++j) {
                m = nan_max(m, node_fn(i, j));
            }
        }
        return m;
    });
}

}  // namespace cjm
