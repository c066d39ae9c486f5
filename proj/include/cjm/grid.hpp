#pragma once

/// @file grid.hpp
/// @brief Structured node lattice, coordinate systems and ghost-ringed fields.
///
/// A grid with `n` intervals per dimension carries the unknowns at indices
/// i, j = 1 .. n-1. The first ghost layer (index 0 and n) lies on the domain
/// boundary; a second ghost layer (index -1 and n+1), present for 5x5 stencil
/// footprints, lies one spacing outside of it. Storage is a single row-major
/// array over all interior and ghost nodes, with `i` selecting the row.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace cjm {

using ScalarFn = std::function<double(double, double)>;

enum class CoordinateKind { Cartesian, Polar, Bipolar };

struct AxisRange {
    double lo = 0.0;
    double hi = 1.0;

    double length() const { return hi - lo; }
};

/// Coordinates (x1, x2) are (x, y), (r, theta) or (mu, nu) depending on kind.
class CoordinateSystem {
public:
    static CoordinateSystem cartesian(AxisRange x = {0.0, 1.0}, AxisRange y = {0.0, 1.0});
    static CoordinateSystem polar(AxisRange r, AxisRange theta);
    static CoordinateSystem bipolar(double a, AxisRange mu, AxisRange nu);

    CoordinateKind kind() const { return kind_; }
    const AxisRange& x1() const { return x1_; }
    const AxisRange& x2() const { return x2_; }
    /// Bipolar focal scale `a`; 0 for the other systems.
    double scale() const { return scale_; }

private:
    CoordinateSystem(CoordinateKind kind, AxisRange x1, AxisRange x2, double scale);

    CoordinateKind kind_;
    AxisRange x1_;
    AxisRange x2_;
    double scale_;
};

const char* to_string(CoordinateKind kind);

class Grid {
public:
    /// General lattice. `x1_nodes` / `x2_nodes` hold the coordinates of every
    /// storage index along each axis, i.e. nx-1+2*ghost (resp. ny-1+2*ghost)
    /// strictly increasing values starting at index 1-ghost.
    Grid(int nx, int ny, int ghost, CoordinateSystem coords,
         std::vector<double> x1_nodes, std::vector<double> x2_nodes);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int ghost() const { return ghost_; }
    const CoordinateSystem& coords() const { return coords_; }

    double lx() const { return coords_.x1().length(); }
    double ly() const { return coords_.x2().length(); }

    /// True when both axes are equispaced.
    bool uniform() const { return uniform_; }
    /// Spacing along x1 / x2 for uniform grids.
    double h1() const { return h1_; }
    double h2() const { return h2_; }

    /// Unknowns per dimension.
    int interior_x() const { return nx_ - 1; }
    int interior_y() const { return ny_ - 1; }
    std::size_t interior_count() const {
        return static_cast<std::size_t>(interior_x()) * static_cast<std::size_t>(interior_y());
    }

    int rows() const { return nx_ - 1 + 2 * ghost_; }
    int stride() const { return ny_ - 1 + 2 * ghost_; }
    std::size_t storage_size() const {
        return static_cast<std::size_t>(rows()) * static_cast<std::size_t>(stride());
    }

    int min_index() const { return 1 - ghost_; }
    int max_index_x() const { return nx_ - 1 + ghost_; }
    int max_index_y() const { return ny_ - 1 + ghost_; }

    bool in_storage(int i, int j) const {
        return i >= min_index() && i <= max_index_x() && j >= min_index() && j <= max_index_y();
    }
    bool is_interior(int i, int j) const {
        return i >= 1 && i <= nx_ - 1 && j >= 1 && j <= ny_ - 1;
    }

    /// Flat storage offset of node (i, j); no range check.
    std::ptrdiff_t index(int i, int j) const {
        return static_cast<std::ptrdiff_t>(i - min_index()) * stride() + (j - min_index());
    }
    /// Dense 0-based number of an interior node, row-major over the unknowns.
    std::size_t interior_number(int i, int j) const {
        return static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(interior_y()) +
               static_cast<std::size_t>(j - 1);
    }

    double x1(int i) const { return x1_[static_cast<std::size_t>(i - min_index())]; }
    double x2(int j) const { return x2_[static_cast<std::size_t>(j - min_index())]; }
    /// Spacing between node i and its successor along x1 (predecessor at the last node).
    double dx1(int i) const { return dx1_[static_cast<std::size_t>(i - min_index())]; }
    double dx2(int j) const { return dx2_[static_cast<std::size_t>(j - min_index())]; }

    /// Physical coordinates of a storage node; throws ConfigError when out of range.
    std::pair<double, double> node_coords(int i, int j) const;

private:
    int nx_;
    int ny_;
    int ghost_;
    CoordinateSystem coords_;
    std::vector<double> x1_;
    std::vector<double> x2_;
    std::vector<double> dx1_;
    std::vector<double> dx2_;
    bool uniform_ = false;
    double h1_ = 0.0;
    double h2_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

/// n x n intervals over the coordinate ranges of `coords` (unit square for the
/// default Cartesian system). Requires n >= 4 and ghost in {1, 2}.
GridPtr make_uniform_grid(int n, const CoordinateSystem& coords, int ghost);

/// Node-indexed scalar over the interior plus ghost ring of a grid.
class Field {
public:
    explicit Field(GridPtr grid, double fill = 0.0);

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }

    double& operator()(int i, int j) { return values_[static_cast<std::size_t>(grid_->index(i, j))]; }
    double operator()(int i, int j) const {
        return values_[static_cast<std::size_t>(grid_->index(i, j))];
    }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    double* data() { return values_.data(); }
    const double* data() const { return values_.data(); }

    bool same_grid(const Field& other) const { return grid_ == other.grid_; }

    friend bool operator==(const Field& a, const Field& b) { return a.values_ == b.values_; }

private:
    GridPtr grid_;
    std::vector<double> values_;
};

template <class Fn>
void for_each_interior(const Grid& grid, Fn&& fn) {
    for (int i = 1; i <= grid.nx() - 1; ++i) {
        for (int j = 1; j <= grid.ny() - 1; ++j) {
            fn(i, j);
        }
    }
}

template <class Fn>
void for_each_ghost(const Grid& grid, Fn&& fn) {
    for (int i = grid.min_index(); i <= grid.max_index_x(); ++i) {
        for (int j = grid.min_index(); j <= grid.max_index_y(); ++j) {
            if (!grid.is_interior(i, j)) {
                fn(i, j);
            }
        }
    }
}

/// Sets every ghost node to boundary(x1, x2); the interior is left untouched.
void fill_dirichlet(Field& field, const ScalarFn& boundary);

/// Samples fn at every interior node.
void fill_interior(Field& field, const ScalarFn& fn);

}  // namespace cjm
