#include "cjm/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace cjm {

Method Method::jacobi(double weight, int check_every) {
    if (!std::isfinite(weight) || !(weight > 0.0)) {
        throw ConfigError("Jacobi weight must be positive and finite");
    }
    if (check_every < 1) {
        throw ConfigError("check interval must be at least one sweep");
    }
    Method m;
    m.kind = MethodKind::Jacobi;
    m.jacobi_weight = weight;
    m.check_every = check_every;
    return m;
}

Method Method::chebyshev(WeightSchedule schedule) {
    if (schedule.m_count < 1 || schedule.weights.size() != static_cast<std::size_t>(schedule.m_count) ||
        schedule.order.size() != schedule.weights.size()) {
        throw ConfigError("malformed weight schedule");
    }
    Method m;
    m.kind = MethodKind::Chebyshev;
    m.schedule = std::move(schedule);
    return m;
}

int Method::cycle_length() const {
    return kind == MethodKind::Chebyshev ? schedule->m_count : check_every;
}

StopRule StopRule::residual(double tol, long max_cycles) {
    if (!(tol > 0.0)) throw ConfigError("residual tolerance must be positive");
    StopRule r;
    r.mode = StopMode::ResidualTol;
    r.tol = tol;
    r.max_cycles = max_cycles;
    return r;
}

StopRule StopRule::real_error(double tol, ScalarFn exact, long max_cycles) {
    if (!(tol > 0.0)) throw ConfigError("real-error tolerance must be positive");
    if (!exact) throw ConfigError("real-error stopping needs an analytic solution");
    StopRule r;
    r.mode = StopMode::RealErrorTol;
    r.tol = tol;
    r.reference = std::move(exact);
    r.max_cycles = max_cycles;
    return r;
}

StopRule StopRule::fixed_cycles(long cycles) {
    if (cycles < 1) throw ConfigError("need at least one cycle");
    StopRule r;
    r.mode = StopMode::MaxIters;
    r.max_cycles = cycles;
    return r;
}

std::vector<double> SolveReport::residual_history() const {
    std::vector<double> out;
    for (const auto& p : trace) out.push_back(p.residual);
    return out;
}

std::vector<double> SolveReport::error_history() const {
    std::vector<double> out;
    for (const auto& p : trace) out.push_back(p.real_error);
    return out;
}

namespace {

void require_same_grid(const CompiledStencil& s, const Field& f, const char* what) {
    if (&f.grid() != &s.grid()) {
        throw ConfigError(std::string(what) + " is defined on a different grid than the stencil");
    }
}

}  // namespace

void sweep_into(const CompiledStencil& stencil, const Field& u, const Field& b, double weight,
                Field& out, const Backend& backend) {
    require_same_grid(stencil, u, "u");
    require_same_grid(stencil, b, "b");
    require_same_grid(stencil, out, "output");
    if (out.data() == u.data()) {
        throw ConfigError("sweep output must not alias its input");
    }
    if (!std::isfinite(weight)) {
        throw ConfigError("sweep weight must be finite");
    }
    const Grid& g = stencil.grid();
    const int len = g.interior_y();
    backend.for_rows(1, g.nx() - 1, [&](int begin, int end) {
        std::vector<double> acc(static_cast<std::size_t>(len));
        std::vector<double> center(static_cast<std::size_t>(len));
        for (int i = begin; i < end; ++i) {
            const std::ptrdiff_t p = g.index(i, 1);
            const double* urow = u.data() + p;
            const double* brow = b.data() + p;
            double* orow = out.data() + p;
            std::copy(brow, brow + len, acc.begin());
            stencil.subtract_neighbors(i, u.data(), acc.data());
            stencil.center_row(i, center.data());
            for (int j = 0; j < len; ++j) {
                const double local = acc[static_cast<std::size_t>(j)] / center[static_cast<std::size_t>(j)];
                orow[j] = urow[j] + weight * (local - urow[j]);
            }
        }
    });
}

Field sweep(const CompiledStencil& stencil, const Field& u, const Field& b, double weight,
            const Backend& backend) {
    Field out = u;
    sweep_into(stencil, u, b, weight, out, backend);
    return out;
}

double residual_norm(const CompiledStencil& stencil, const Field& u, const Field& b,
                     const Backend& backend) {
    require_same_grid(stencil, u, "u");
    require_same_grid(stencil, b, "b");
    const Grid& g = stencil.grid();
    const int len = g.interior_y();
    const double r = backend.max_rows(1, g.nx() - 1, [&](int begin, int end) {
        std::vector<double> acc(static_cast<std::size_t>(len));
        std::vector<double> center(static_cast<std::size_t>(len));
        double m = 0.0;
        for (int i = begin; i < end; ++i) {
            const std::ptrdiff_t p = g.index(i, 1);
            const double* urow = u.data() + p;
            const double* brow = b.data() + p;
            std::copy(brow, brow + len, acc.begin());
            stencil.subtract_neighbors(i, u.data(), acc.data());
            stencil.center_row(i, center.data());
            for (int j = 0; j < len; ++j) {
                const auto k = static_cast<std::size_t>(j);
                m = nan_max(m, std::abs(acc[k] - center[k] * urow[j]));
            }
        }
        return m;
    });
    const double bnorm = par_max_reduce(backend, g, [&](int i, int j) { return std::abs(b(i, j)); });
    return r / std::max(bnorm, 1e-300);
}

double real_error(const Field& u, const ScalarFn& exact, const Backend& backend) {
    const Grid& g = u.grid();
    return par_max_reduce(backend, g, [&](int i, int j) {
        return std::abs(u(i, j) - exact(g.x1(i), g.x2(j)));
    });
}

namespace {

double sampled_error(const Field& u, const Field& exact, const Backend& backend) {
    return par_max_reduce(backend, u.grid(), [&](int i, int j) { return std::abs(u(i, j) - exact(i, j)); });
}

}  // namespace

SolveResult solve(const CompiledStencil& stencil, const Field& u0, const Field& b,
                  const Method& method, const StopRule& stop, const Backend& backend) {
    require_same_grid(stencil, u0, "u0");
    require_same_grid(stencil, b, "b");
    if (method.kind == MethodKind::Chebyshev && !method.schedule) {
        throw ConfigError("Chebyshev method needs a weight schedule");
    }
    if (stop.mode == StopMode::RealErrorTol && !stop.reference) {
        throw ConfigError("real-error stopping needs an analytic solution");
    }
    if (stop.max_cycles < 1) {
        throw ConfigError("max_cycles must be at least one");
    }

    std::optional<Field> exact;
    if (stop.reference) {
        exact.emplace(u0.grid_ptr());
        fill_interior(*exact, stop.reference);
    }

    std::vector<double> weights;
    if (method.kind == MethodKind::Chebyshev) {
        weights = method.schedule->applied();
    } else {
        weights.assign(static_cast<std::size_t>(method.check_every), method.jacobi_weight);
    }

    Field cur = u0;
    Field next = u0;
    SolveReport report;
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };

    for (long cycle = 1; cycle <= stop.max_cycles; ++cycle) {
        for (double w : weights) {
            sweep_into(stencil, cur, b, w, next, backend);
            std::swap(cur, next);
        }
        report.iterations += static_cast<long>(weights.size());
        report.cycles = cycle;

        TracePoint point;
        point.cycle = cycle;
        point.iterations = report.iterations;
        point.residual = residual_norm(stencil, cur, b, backend);
        point.real_error = exact ? sampled_error(cur, *exact, backend)
                                 : std::numeric_limits<double>::quiet_NaN();
        point.elapsed = elapsed();
        report.trace.push_back(point);
        report.final_residual = point.residual;
        if (exact) report.final_real_error = point.real_error;
        report.wall_time = point.elapsed;

        if (!std::isfinite(point.residual) || (exact && !std::isfinite(point.real_error))) {
            throw DivergenceError("iterate became non-finite after " +
                                      std::to_string(report.iterations) + " sweeps",
                                  report);
        }
        const bool done = (stop.mode == StopMode::ResidualTol && point.residual <= stop.tol) ||
                          (stop.mode == StopMode::RealErrorTol && point.real_error <= stop.tol);
        if (done) {
            return {std::move(cur), std::move(report)};
        }
    }
    if (stop.mode == StopMode::MaxIters) {
        return {std::move(cur), std::move(report)};
    }
    throw NonConvergenceError("stop rule not met after " + std::to_string(stop.max_cycles) +
                                  " cycles (" + std::to_string(report.iterations) + " sweeps)",
                              report);
}

}  // namespace cjm
