#include "cjm/grid.hpp"

#include "cjm/errors.hpp"

#include <cmath>
#include <string>

namespace cjm {

CoordinateSystem::CoordinateSystem(CoordinateKind kind, AxisRange x1, AxisRange x2, double scale)
    : kind_(kind), x1_(x1), x2_(x2), scale_(scale) {
    if (!(x1.hi > x1.lo) || !(x2.hi > x2.lo)) {
        throw ConfigError("coordinate ranges must have positive length");
    }
}

CoordinateSystem CoordinateSystem::cartesian(AxisRange x, AxisRange y) {
    return CoordinateSystem(CoordinateKind::Cartesian, x, y, 0.0);
}

CoordinateSystem CoordinateSystem::polar(AxisRange r, AxisRange theta) {
    if (!(r.lo > 0.0)) {
        throw ConfigError("polar radial range must exclude r = 0");
    }
    return CoordinateSystem(CoordinateKind::Polar, r, theta, 0.0);
}

CoordinateSystem CoordinateSystem::bipolar(double a, AxisRange mu, AxisRange nu) {
    if (!(a > 0.0)) {
        throw ConfigError("bipolar scale a must be positive");
    }
    return CoordinateSystem(CoordinateKind::Bipolar, mu, nu, a);
}

const char* to_string(CoordinateKind kind) {
    switch (kind) {
        case CoordinateKind::Cartesian: return "cartesian";
        case CoordinateKind::Polar: return "polar";
        case CoordinateKind::Bipolar: return "bipolar";
    }
    return "unknown";
}

namespace {

std::vector<double> spacings(const std::vector<double>& nodes) {
    std::vector<double> out(nodes.size());
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        out[k] = nodes[k + 1] - nodes[k];
    }
    out.back() = nodes[nodes.size() - 1] - nodes[nodes.size() - 2];
    return out;
}

// Equispaced up to round-off in the node coordinates.
bool equispaced(const std::vector<double>& d) {
    for (double v : d) {
        if (std::abs(v - d.front()) > 1e-12 * std::abs(d.front())) {
            return false;
        }
    }
    return true;
}

}  // namespace

Grid::Grid(int nx, int ny, int ghost, CoordinateSystem coords, std::vector<double> x1_nodes,
           std::vector<double> x2_nodes)
    : nx_(nx), ny_(ny), ghost_(ghost), coords_(coords), x1_(std::move(x1_nodes)),
      x2_(std::move(x2_nodes)) {
    if (nx < 4 || ny < 4) {
        throw ConfigError("grid needs at least 4 intervals per dimension, got " +
                          std::to_string(nx) + "x" + std::to_string(ny));
    }
    if (ghost != 1 && ghost != 2) {
        throw ConfigError("ghost width must be 1 or 2, got " + std::to_string(ghost));
    }
    if (x1_.size() != static_cast<std::size_t>(rows()) ||
        x2_.size() != static_cast<std::size_t>(stride())) {
        throw ConfigError("node coordinate arrays do not match the grid extent");
    }
    dx1_ = spacings(x1_);
    dx2_ = spacings(x2_);
    for (double d : dx1_) {
        if (!(d > 0.0)) throw ConfigError("grid spacings must be strictly positive");
    }
    for (double d : dx2_) {
        if (!(d > 0.0)) throw ConfigError("grid spacings must be strictly positive");
    }
    if (coords_.kind() == CoordinateKind::Polar && !(x1_.front() > 0.0)) {
        throw ConfigError("polar grid has a node with r <= 0");
    }
    uniform_ = equispaced(dx1_) && equispaced(dx2_);
    if (uniform_) {
        h1_ = dx1_.front();
        h2_ = dx2_.front();
    }
}

std::pair<double, double> Grid::node_coords(int i, int j) const {
    if (!in_storage(i, j)) {
        throw ConfigError("node (" + std::to_string(i) + ", " + std::to_string(j) +
                          ") is outside the grid storage");
    }
    return {x1(i), x2(j)};
}

GridPtr make_uniform_grid(int n, const CoordinateSystem& coords, int ghost) {
    if (n < 4) {
        throw ConfigError("grid needs n >= 4, got " + std::to_string(n));
    }
    if (ghost != 1 && ghost != 2) {
        throw ConfigError("ghost width must be 1 or 2, got " + std::to_string(ghost));
    }
    const int count = n - 1 + 2 * ghost;
    const double h1 = coords.x1().length() / n;
    const double h2 = coords.x2().length() / n;
    std::vector<double> x1(static_cast<std::size_t>(count));
    std::vector<double> x2(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const int idx = k + 1 - ghost;
        // End nodes are pinned so the boundary layer sits exactly on the range ends.
        x1[static_cast<std::size_t>(k)] = idx == n ? coords.x1().hi : coords.x1().lo + idx * h1;
        x2[static_cast<std::size_t>(k)] = idx == n ? coords.x2().hi : coords.x2().lo + idx * h2;
    }
    return std::make_shared<const Grid>(n, n, ghost, coords, std::move(x1), std::move(x2));
}

Field::Field(GridPtr grid, double fill) : grid_(std::move(grid)) {
    if (!grid_) {
        throw ConfigError("field requires a grid");
    }
    values_.assign(grid_->storage_size(), fill);
}

void fill_dirichlet(Field& field, const ScalarFn& boundary) {
    const Grid& g = field.grid();
    for_each_ghost(g, [&](int i, int j) { field(i, j) = boundary(g.x1(i), g.x2(j)); });
}

void fill_interior(Field& field, const ScalarFn& fn) {
    const Grid& g = field.grid();
    for_each_interior(g, [&](int i, int j) { field(i, j) = fn(g.x1(i), g.x2(j)); });
}

}  // namespace cjm
