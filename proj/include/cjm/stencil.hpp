#pragma once

/// @file stencil.hpp
/// @brief Discrete Laplacians as coefficient-function masks.
///
/// A mask lists the non-zero entries of a 3x3 or 5x5 footprint. Each entry
/// carries an evaluator f(x1, x2, dx1, dx2) returning the coefficient at a node
/// with coordinates (x1, x2) and local spacings (dx1, dx2). Compilation turns a
/// mask into flat storage offsets plus either one shared coefficient vector or
/// a per-node table.

#include "cjm/backend.hpp"
#include "cjm/grid.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cjm {

struct Offset {
    int di = 0;
    int dj = 0;

    friend bool operator==(const Offset&, const Offset&) = default;
};

using CoeffFn = std::function<double(double x1, double x2, double dx1, double dx2)>;

struct MaskEntry {
    Offset offset;
    std::string label;  // f_N, f_NE2, ...
    CoeffFn coeff;
};

struct StencilMask {
    std::string name;
    int footprint = 3;               // 3 or 5
    std::optional<double> alpha;     // family parameter, metadata only
    int order_hint = 2;
    CoordinateKind coords = CoordinateKind::Cartesian;
    bool coordinate_dependent = false;
    std::vector<MaskEntry> entries;  // center included, zeros omitted

    int reach() const { return footprint / 2; }
    const MaskEntry* find(Offset offset) const;
    /// Coefficient at `offset`, 0 for offsets not in the mask.
    double coefficient(Offset offset, double x1, double x2, double dx1, double dx2) const;
};

StencilMask cartesian_5pt();
/// 9-point, alpha = 2/3: (4 axis + 1 diagonal - 20 center) / (6 h^2).
StencilMask cartesian_9pt();
/// 17-point, alpha = 2/3: (64, -4 axis; 16, -1 diagonal; -300 center) / (72 h^2).
StencilMask cartesian_17pt();
StencilMask polar_5pt();
StencilMask bipolar_5pt(double a);

class CompiledStencil {
public:
    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const std::string& name() const { return name_; }
    int reach() const { return reach_; }

    /// Number of off-center entries.
    std::size_t size() const { return offsets_.size(); }
    std::span<const std::ptrdiff_t> offsets() const { return offsets_; }
    std::span<const Offset> neighbor_offsets() const { return neighbors_; }

    /// True when one coefficient vector serves every node.
    bool shared() const { return table_.empty(); }
    std::span<const double> shared_coeffs() const { return shared_; }
    double shared_center() const { return shared_center_; }

    double coeff(std::size_t k, int i, int j) const;
    double center(int i, int j) const;

    /// acc[j-1] -= sum_k c_k(i, j) u(i, j + offset_k) for j = 1 .. ny-1.
    void subtract_neighbors(int i, const double* u, double* acc) const;
    /// acc[j-1] = c_C(i, j) for j = 1 .. ny-1.
    void center_row(int i, double* acc) const;

private:
    friend CompiledStencil compile(const StencilMask& mask, GridPtr grid);

    GridPtr grid_;
    std::string name_;
    int reach_ = 1;
    std::vector<std::ptrdiff_t> offsets_;
    std::vector<Offset> neighbors_;
    std::vector<double> shared_;
    double shared_center_ = 0.0;
    // Per-node mode: table_[k * interior_count + interior_number(i, j)].
    std::vector<double> table_;
    std::vector<double> center_table_;
};

/// Throws ConfigError when the footprint exceeds the ghost width, the
/// coordinate systems disagree, or a node has a zero/invalid center coefficient.
CompiledStencil compile(const StencilMask& mask, GridPtr grid);

/// Discrete Laplacian on the interior; the ghost ring of the result is zero.
Field apply(const CompiledStencil& stencil, const Field& u,
            const Backend& backend = Backend::serial());

/// Exact solve of row (i, j): (b - sum_{k != C} c_k u_k) / c_C.
double jacobi_local(const CompiledStencil& stencil, const Field& u, const Field& b, int i, int j);

/// Source with the compact fourth-order correction f + h^2/12 * Lap_5(f),
/// i.e. (8 f_C + f_E + f_W + f_N + f_S) / 12, sampled on the interior of a
/// uniform Cartesian grid.
Field compact_source(const GridPtr& grid, const ScalarFn& f);

}  // namespace cjm
