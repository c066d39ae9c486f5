#include "cjm/stencil.hpp"

#include "cjm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cjm {

const MaskEntry* StencilMask::find(Offset offset) const {
    for (const auto& e : entries) {
        if (e.offset == offset) {
            return &e;
        }
    }
    return nullptr;
}

double StencilMask::coefficient(Offset offset, double x1, double x2, double dx1, double dx2) const {
    const MaskEntry* e = find(offset);
    return e ? e->coeff(x1, x2, dx1, dx2) : 0.0;
}

namespace {

// Entry whose coefficient is `num / (den * dx1 * dx2)`; Cartesian masks are
// only defined on uniform grids with dx1 == dx2 == h.
MaskEntry scaled(Offset o, std::string label, double num, double den) {
    return {o, std::move(label),
            [num, den](double, double, double dx1, double dx2) { return num / (den * dx1 * dx2); }};
}

}  // namespace

StencilMask cartesian_5pt() {
    StencilMask m;
    m.name = "cartesian_5pt";
    m.footprint = 3;
    m.order_hint = 2;
    m.entries = {
        {{0, 0}, "f_C",
         [](double, double, double dx, double dy) { return -2.0 / (dx * dx) - 2.0 / (dy * dy); }},
        {{1, 0}, "f_E", [](double, double, double dx, double) { return 1.0 / (dx * dx); }},
        {{-1, 0}, "f_W", [](double, double, double dx, double) { return 1.0 / (dx * dx); }},
        {{0, 1}, "f_N", [](double, double, double, double dy) { return 1.0 / (dy * dy); }},
        {{0, -1}, "f_S", [](double, double, double, double dy) { return 1.0 / (dy * dy); }},
    };
    return m;
}

StencilMask cartesian_9pt() {
    StencilMask m;
    m.name = "cartesian_9pt";
    m.footprint = 3;
    m.alpha = 2.0 / 3.0;
    m.order_hint = 4;
    m.entries = {
        scaled({0, 0}, "f_C", -20.0, 6.0),
        scaled({1, 0}, "f_E", 4.0, 6.0),
        scaled({-1, 0}, "f_W", 4.0, 6.0),
        scaled({0, 1}, "f_N", 4.0, 6.0),
        scaled({0, -1}, "f_S", 4.0, 6.0),
        scaled({1, 1}, "f_NE", 1.0, 6.0),
        scaled({-1, -1}, "f_SW", 1.0, 6.0),
        scaled({-1, 1}, "f_NW", 1.0, 6.0),
        scaled({1, -1}, "f_SE", 1.0, 6.0),
    };
    return m;
}

StencilMask cartesian_17pt() {
    StencilMask m;
    m.name = "cartesian_17pt";
    m.footprint = 5;
    m.alpha = 2.0 / 3.0;
    m.order_hint = 4;
    m.entries = {
        scaled({0, 0}, "f_C", -300.0, 72.0),
        scaled({1, 0}, "f_E", 64.0, 72.0),
        scaled({-1, 0}, "f_W", 64.0, 72.0),
        scaled({0, 1}, "f_N", 64.0, 72.0),
        scaled({0, -1}, "f_S", 64.0, 72.0),
        scaled({2, 0}, "f_E2", -4.0, 72.0),
        scaled({-2, 0}, "f_W2", -4.0, 72.0),
        scaled({0, 2}, "f_N2", -4.0, 72.0),
        scaled({0, -2}, "f_S2", -4.0, 72.0),
        scaled({1, 1}, "f_NE", 16.0, 72.0),
        scaled({-1, -1}, "f_SW", 16.0, 72.0),
        scaled({-1, 1}, "f_NW", 16.0, 72.0),
        scaled({1, -1}, "f_SE", 16.0, 72.0),
        scaled({2, 2}, "f_NE2", -1.0, 72.0),
        scaled({-2, -2}, "f_SW2", -1.0, 72.0),
        scaled({-2, 2}, "f_NW2", -1.0, 72.0),
        scaled({2, -2}, "f_SE2", -1.0, 72.0),
    };
    return m;
}

// (x1, x2) = (r, theta). The radial first-derivative term shifts weight
// between the inner and outer neighbours.
StencilMask polar_5pt() {
    StencilMask m;
    m.name = "polar_5pt";
    m.footprint = 3;
    m.order_hint = 2;
    m.coords = CoordinateKind::Polar;
    m.coordinate_dependent = true;
    m.entries = {
        {{0, 0}, "f_C",
         [](double r, double, double dr, double dt) {
             return -2.0 / (dr * dr) - 2.0 / (r * r * dt * dt);
         }},
        {{1, 0}, "f_E",
         [](double r, double, double dr, double) { return 1.0 / (dr * dr) + 1.0 / (2.0 * r * dr); }},
        {{-1, 0}, "f_W",
         [](double r, double, double dr, double) { return 1.0 / (dr * dr) - 1.0 / (2.0 * r * dr); }},
        {{0, 1}, "f_N", [](double r, double, double, double dt) { return 1.0 / (r * r * dt * dt); }},
        {{0, -1}, "f_S", [](double r, double, double, double dt) { return 1.0 / (r * r * dt * dt); }},
    };
    return m;
}

// (x1, x2) = (mu, nu); every entry shares the metric factor (cosh nu - cos mu) / a^2.
StencilMask bipolar_5pt(double a) {
    if (!(a > 0.0)) {
        throw ConfigError("bipolar scale a must be positive");
    }
    const double a2 = a * a;
    auto factor = [a2](double mu, double nu) { return (std::cosh(nu) - std::cos(mu)) / a2; };
    StencilMask m;
    m.name = "bipolar_5pt";
    m.footprint = 3;
    m.order_hint = 2;
    m.coords = CoordinateKind::Bipolar;
    m.coordinate_dependent = true;
    m.entries = {
        {{0, 0}, "f_C",
         [factor](double mu, double nu, double dmu, double dnu) {
             const double f = factor(mu, nu);
             return -2.0 * f / (dmu * dmu) - 2.0 * f / (dnu * dnu);
         }},
        {{1, 0}, "f_E",
         [factor](double mu, double nu, double dmu, double) { return factor(mu, nu) / (dmu * dmu); }},
        {{-1, 0}, "f_W",
         [factor](double mu, double nu, double dmu, double) { return factor(mu, nu) / (dmu * dmu); }},
        {{0, 1}, "f_N",
         [factor](double mu, double nu, double, double dnu) { return factor(mu, nu) / (dnu * dnu); }},
        {{0, -1}, "f_S",
         [factor](double mu, double nu, double, double dnu) { return factor(mu, nu) / (dnu * dnu); }},
    };
    return m;
}

double CompiledStencil::coeff(std::size_t k, int i, int j) const {
    if (shared()) {
        return shared_[k];
    }
    return table_[k * grid_->interior_count() + grid_->interior_number(i, j)];
}

double CompiledStencil::center(int i, int j) const {
    if (shared()) {
        return shared_center_;
    }
    return center_table_[grid_->interior_number(i, j)];
}

void CompiledStencil::subtract_neighbors(int i, const double* u, double* acc) const {
    const int len = grid_->interior_y();
    const double* row = u + grid_->index(i, 1);
    const std::size_t n_int = grid_->interior_count();
    const std::size_t row_start = grid_->interior_number(i, 1);
    for (std::size_t k = 0; k < offsets_.size(); ++k) {
        const double* src = row + offsets_[k];
        if (shared()) {
            const double c = shared_[k];
            for (int j = 0; j < len; ++j) {
                acc[j] -= c * src[j];
            }
        } else {
            const double* c = table_.data() + k * n_int + row_start;
            for (int j = 0; j < len; ++j) {
                acc[j] -= c[j] * src[j];
            }
        }
    }
}

void CompiledStencil::center_row(int i, double* acc) const {
    const int len = grid_->interior_y();
    if (shared()) {
        std::fill(acc, acc + len, shared_center_);
        return;
    }
    const double* c = center_table_.data() + grid_->interior_number(i, 1);
    std::copy(c, c + len, acc);
}

CompiledStencil compile(const StencilMask& mask, GridPtr grid) {
    if (!grid) {
        throw ConfigError("compile requires a grid");
    }
    const Grid& g = *grid;
    if (mask.footprint != 3 && mask.footprint != 5) {
        throw ConfigError("mask footprint must be 3x3 or 5x5");
    }
    for (const auto& e : mask.entries) {
        if (std::abs(e.offset.di) > mask.reach() || std::abs(e.offset.dj) > mask.reach()) {
            throw ConfigError("mask entry " + e.label + " lies outside the declared footprint");
        }
    }
    if (mask.reach() > g.ghost()) {
        throw ConfigError("footprint exceeds ghost width (" + mask.name + " needs " +
                          std::to_string(mask.reach()) + ", grid has " +
                          std::to_string(g.ghost()) + ")");
    }
    if (mask.coords != g.coords().kind()) {
        throw ConfigError(std::string("coordinate-system mismatch: mask ") + mask.name +
                          " expects " + to_string(mask.coords) + ", grid is " +
                          to_string(g.coords().kind()));
    }
    if (!mask.coordinate_dependent && !g.uniform()) {
        throw ConfigError(mask.name + " requires a uniform grid");
    }
    const MaskEntry* center = mask.find({0, 0});
    if (!center) {
        throw ConfigError(mask.name + " has no center entry");
    }
    if (g.coords().kind() == CoordinateKind::Polar && !(g.x1(1) > 0.0)) {
        throw ConfigError("polar mask evaluated at r <= 0");
    }

    CompiledStencil out;
    out.grid_ = grid;
    out.name_ = mask.name;
    out.reach_ = mask.reach();

    std::vector<const MaskEntry*> neighbors;
    for (const auto& e : mask.entries) {
        if (!(e.offset == Offset{0, 0})) {
            neighbors.push_back(&e);
        }
    }

    auto check_center = [&](double c, int i, int j) {
        if (!std::isfinite(c) || c == 0.0) {
            throw ConfigError(mask.name + ": degenerate center coefficient at node (" +
                              std::to_string(i) + ", " + std::to_string(j) + ")");
        }
    };

    if (!mask.coordinate_dependent) {
        const double x1 = g.x1(1), x2 = g.x2(1), d1 = g.dx1(1), d2 = g.dx2(1);
        out.shared_center_ = center->coeff(x1, x2, d1, d2);
        check_center(out.shared_center_, 1, 1);
        for (const MaskEntry* e : neighbors) {
            const double c = e->coeff(x1, x2, d1, d2);
            if (c == 0.0) continue;
            out.neighbors_.push_back(e->offset);
            out.shared_.push_back(c);
        }
    } else {
        const std::size_t n_int = g.interior_count();
        out.center_table_.resize(n_int);
        for_each_interior(g, [&](int i, int j) {
            const double c = center->coeff(g.x1(i), g.x2(j), g.dx1(i), g.dx2(j));
            check_center(c, i, j);
            out.center_table_[g.interior_number(i, j)] = c;
        });
        for (const MaskEntry* e : neighbors) {
            std::vector<double> column(n_int);
            bool any = false;
            for_each_interior(g, [&](int i, int j) {
                const double c = e->coeff(g.x1(i), g.x2(j), g.dx1(i), g.dx2(j));
                column[g.interior_number(i, j)] = c;
                any = any || c != 0.0;
            });
            if (!any) continue;
            out.neighbors_.push_back(e->offset);
            out.table_.insert(out.table_.end(), column.begin(), column.end());
        }
    }
    for (const Offset& o : out.neighbors_) {
        out.offsets_.push_back(static_cast<std::ptrdiff_t>(o.di) * g.stride() + o.dj);
    }
    return out;
}

Field apply(const CompiledStencil& stencil, const Field& u, const Backend& backend) {
    const Grid& g = stencil.grid();
    if (&u.grid() != &g) {
        throw ConfigError("field and stencil are defined on different grids");
    }
    Field out(u.grid_ptr());
    const int len = g.interior_y();
    backend.for_rows(1, g.nx() - 1, [&](int begin, int end) {
        std::vector<double> center(static_cast<std::size_t>(len));
        std::vector<double> acc(static_cast<std::size_t>(len));
        for (int i = begin; i < end; ++i) {
            const double* urow = u.data() + g.index(i, 1);
            stencil.center_row(i, center.data());
            std::fill(acc.begin(), acc.end(), 0.0);
            stencil.subtract_neighbors(i, u.data(), acc.data());
            double* orow = out.data() + g.index(i, 1);
            for (int j = 0; j < len; ++j) {
                orow[j] = center[static_cast<std::size_t>(j)] * urow[j] - acc[static_cast<std::size_t>(j)];
            }
        }
    });
    return out;
}

double jacobi_local(const CompiledStencil& stencil, const Field& u, const Field& b, int i, int j) {
    const Grid& g = stencil.grid();
    if (!g.is_interior(i, j)) {
        throw ConfigError("jacobi_local requires an interior node");
    }
    const double c_center = stencil.center(i, j);
    if (c_center == 0.0) {
        throw ConfigError("degenerate mask: zero center coefficient");
    }
    const std::ptrdiff_t p = g.index(i, j);
    double s = b.data()[p];
    for (std::size_t k = 0; k < stencil.size(); ++k) {
        s -= stencil.coeff(k, i, j) * u.data()[p + stencil.offsets()[k]];
    }
    return s / c_center;
}

Field compact_source(const GridPtr& grid, const ScalarFn& f) {
    const Grid& g = *grid;
    if (g.coords().kind() != CoordinateKind::Cartesian || !g.uniform() ||
        std::abs(g.h1() - g.h2()) > 1e-14 * g.h1()) {
        throw ConfigError("compact source correction needs a uniform square Cartesian grid");
    }
    Field b(grid);
    for_each_interior(g, [&](int i, int j) {
        const double x = g.x1(i), y = g.x2(j);
        const double sum = f(g.x1(i + 1), y) + f(g.x1(i - 1), y) + f(x, g.x2(j + 1)) +
                           f(x, g.x2(j - 1));
        b(i, j) = (8.0 * f(x, y) + sum) / 12.0;
    });
    return b;
}

}  // namespace cjm
