#pragma once

/// @file backend.hpp
/// @brief Execution engines for stencil sweeps and max-reductions.
///
/// Every engine honours the same contract: the input buffer is shared
/// read-only, output rows are written by exactly one worker, and reductions are
/// merged in block order. Results are therefore bitwise independent of the
/// worker count and the block size.

#include "cjm/grid.hpp"

#include <functional>
#include <memory>
#include <string>

namespace cjm {

enum class BackendKind { Serial, Parallel };

class WorkerPool;

class Backend {
public:
    static Backend serial();
    /// `chunk` is the row-block size; 0 picks ceil(rows / workers).
    static Backend parallel(int workers, int chunk = 0);

    BackendKind kind() const { return kind_; }
    int workers() const { return workers_; }
    int chunk() const { return chunk_; }
    std::string describe() const;

    /// Calls fn(begin, end) for contiguous row blocks covering [first, last].
    void for_rows(int first, int last, const std::function<void(int, int)>& fn) const;

    /// Max of fn(begin, end) over the same row blocks. NaN in any block wins.
    double max_rows(int first, int last, const std::function<double(int, int)>& fn) const;

private:
    Backend(BackendKind kind, int workers, int chunk);

    int block_size(int rows) const;

    BackendKind kind_;
    int workers_;
    int chunk_;
    std::shared_ptr<WorkerPool> pool_;
};

/// Max that propagates NaN instead of dropping it.
inline double nan_max(double a, double b) {
    if (a != a || b != b) {
        return a != a ? a : b;
    }
    return a < b ? b : a;
}

/// out(i, j) = kernel(i, j) on every interior node.
void par_map_interior(const Backend& backend, const Grid& grid,
                      const std::function<double(int, int)>& kernel, Field& out);

/// Max of node_fn over every interior node.
double par_max_reduce(const Backend& backend, const Grid& grid,
                      const std::function<double(int, int)>& node_fn);

}  // namespace cjm
