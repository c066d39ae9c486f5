#include "cjm/spectral.hpp"

#include "cjm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace cjm {

namespace {

constexpr double pi = std::numbers::pi;

double sin2(double x) {
    const double s = std::sin(x);
    return s * s;
}

void check_sizes(int nx, int ny) {
    if (nx < 2 || ny < 2) {
        throw ConfigError("spectral bounds need nx, ny >= 2");
    }
}

}  // namespace

SpectralBounds make_bounds(double kappa_min, double kappa_max) {
    if (!(kappa_min > 0.0) || !(kappa_max > kappa_min) || !(kappa_max <= 2.0)) {
        throw ConfigError("spectral bounds must satisfy 0 < kappa_min < kappa_max <= 2");
    }
    return {kappa_min, kappa_max};
}

SpectralBounds bounds_5pt(int nx, int ny) {
    check_sizes(nx, ny);
    const double kmin = sin2(pi / (2.0 * nx)) + sin2(pi / (2.0 * ny));
    return make_bounds(kmin, 2.0);
}

SpectralBounds bounds_9pt(int nx, int ny) {
    check_sizes(nx, ny);
    const double a = pi / (2.0 * nx);
    const double b = pi / (2.0 * ny);
    const double kmin = 4.0 / 5.0 * (sin2(a) + sin2(b)) + 1.0 / 5.0 * (sin2(a + b) + sin2(a - b));
    return make_bounds(kmin, 8.0 / 5.0);
}

SpectralBounds bounds_17pt(int nx, int ny) {
    check_sizes(nx, ny);
    const double a = pi / nx;
    const double b = pi / ny;
    const double c = pi / (2.0 * nx);
    const double d = pi / (2.0 * ny);
    const double kmin = -4.0 / 75.0 * (sin2(a) + sin2(b)) + 64.0 / 75.0 * (sin2(c) + sin2(d)) -
                        1.0 / 75.0 * (sin2(a + b) + sin2(a - b)) +
                        16.0 / 75.0 * (sin2(c + d) + sin2(c - d));
    return make_bounds(kmin, 128.0 / 75.0);
}

SpectralBounds analytic_bounds(StencilKind kind, int nx, int ny) {
    switch (kind) {
        case StencilKind::Five: return bounds_5pt(nx, ny);
        case StencilKind::Nine: return bounds_9pt(nx, ny);
        case StencilKind::Seventeen: return bounds_17pt(nx, ny);
    }
    throw ConfigError("unknown stencil kind");
}

namespace {

// Matrix-free D^{-1} A on interior vectors stored in a zero-ghost field.
class NormalizedOperator {
public:
    explicit NormalizedOperator(const CompiledStencil& s) : s_(s), work_(s.grid_ptr()) {}

    void operator()(const std::vector<double>& x, std::vector<double>& y) {
        const Grid& g = s_.grid();
        for_each_interior(g, [&](int i, int j) { work_(i, j) = x[g.interior_number(i, j)]; });
        const Field lx = apply(s_, work_);
        for_each_interior(g, [&](int i, int j) {
            y[g.interior_number(i, j)] = lx(i, j) / s_.center(i, j);
        });
    }

private:
    const CompiledStencil& s_;
    Field work_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

// Dominant eigenvalue of x -> shift * x - sign * K x. The stopping test
// extrapolates the remaining error from the observed geometric rate; the
// target is relative to |lambda| for the plain iteration and to
// |shift - lambda| for the shifted one.
template <class Op>
double power_iteration(Op& op, double shift, double sign, std::vector<double> x,
                       const PowerIterationOptions& opts, double target_rel) {
    std::vector<double> kx(x.size());
    std::vector<double> y(x.size());
    double norm = std::sqrt(dot(x, x));
    for (double& v : x) v /= norm;
    double lambda = 0.0;
    double prev_delta = 0.0;
    int quiet = 0;
    for (int it = 0; it < opts.max_iterations; ++it) {
        op(x, kx);
        for (std::size_t k = 0; k < x.size(); ++k) y[k] = shift * x[k] - sign * kx[k];
        const double next = dot(x, y);
        const double delta = std::abs(next - lambda);
        lambda = next;
        norm = std::sqrt(dot(y, y));
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw ConvergenceError("power iteration broke down");
        }
        for (std::size_t k = 0; k < x.size(); ++k) x[k] = y[k] / norm;
        if (it < 2) {
            prev_delta = delta;
            continue;
        }
        const double rate = prev_delta > 0.0 ? std::min(delta / prev_delta, 0.999999) : 0.0;
        prev_delta = delta;
        const double remaining = rate > 0.0 ? delta * rate / (1.0 - rate) : delta;
        const double scale = sign > 0.0 ? std::abs(shift - lambda) : std::abs(lambda);
        const bool floor = delta <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(lambda);
        if (remaining <= target_rel * scale || floor) {
            // Require a few consecutive confirmations; single steps can be noisy.
            if (++quiet >= 5) return lambda;
        } else {
            quiet = 0;
        }
    }
    throw ConvergenceError("power iteration did not converge within " +
                           std::to_string(opts.max_iterations) + " iterations");
}

}  // namespace

SpectralBounds bounds_numeric(const CompiledStencil& stencil, const PowerIterationOptions& opts) {
    const Grid& g = stencil.grid();
    const std::size_t n = g.interior_count();
    NormalizedOperator op(stencil);

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> random_start(n);
    for (double& v : random_start) v = dist(rng);

    // Largest eigenvalue: the spectrum of D^{-1} A is positive, so plain power
    // iteration converges to kappa_max.
    const double kmax = power_iteration(op, 0.0, -1.0, random_start, opts, opts.rel_accuracy);

    // Smallest: the lowest mode is smooth and single-signed, start close to it.
    std::vector<double> smooth(n);
    for_each_interior(g, [&](int i, int j) {
        smooth[g.interior_number(i, j)] = std::sin(pi * i / g.nx()) * std::sin(pi * j / g.ny()) +
                                          1e-3 * random_start[g.interior_number(i, j)];
    });
    // The shifted operator's top eigenvalue is kmax - kmin exactly for any
    // shift; accuracy is measured relative to kmin.
    const double top = power_iteration(op, kmax, 1.0, smooth, opts, opts.rel_accuracy);
    const double kmin = kmax - top;
    if (!(kmin > 0.0) || !(kmax > kmin)) {
        throw ConvergenceError("numeric bounds are not a positive interval");
    }
    return {kmin, kmax};
}

double chebyshev_t(int m, double x) {
    if (m < 0) {
        throw ConfigError("Chebyshev degree must be non-negative");
    }
    if (std::abs(x) <= 1.0) {
        return std::cos(m * std::acos(x));
    }
    const double v = std::cosh(m * std::acosh(std::abs(x)));
    return (x < 0.0 && (m % 2 == 1)) ? -v : v;
}

double WeightSchedule::damping_bound() const {
    return 1.0 / chebyshev_t(m_count, bounds.mu());
}

std::vector<double> WeightSchedule::applied() const {
    std::vector<double> out;
    out.reserve(order.size());
    for (int k : order) out.push_back(weights[static_cast<std::size_t>(k)]);
    return out;
}

std::vector<int> leja_order(std::span<const double> points) {
    const std::size_t n = points.size();
    std::vector<int> order;
    order.reserve(n);
    if (n == 0) return order;
    std::vector<bool> used(n, false);
    std::size_t first = 0;
    for (std::size_t k = 1; k < n; ++k) {
        if (std::abs(points[k]) > std::abs(points[first])) first = k;
    }
    std::vector<double> log_dist(n, 0.0);
    std::size_t last = first;
    used[first] = true;
    order.push_back(static_cast<int>(first));
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t best = n;
        for (std::size_t k = 0; k < n; ++k) {
            if (used[k]) continue;
            const double d = std::abs(points[k] - points[last]);
            log_dist[k] += d > 0.0 ? std::log(d) : -std::numeric_limits<double>::infinity();
            if (best == n || log_dist[k] > log_dist[best]) best = k;
        }
        used[best] = true;
        order.push_back(static_cast<int>(best));
        last = best;
    }
    return order;
}

WeightSchedule chebyshev_schedule(const SpectralBounds& bounds, int m) {
    if (m < 1) {
        throw ConfigError("a schedule needs at least one weight");
    }
    const SpectralBounds b = make_bounds(bounds.kappa_min, bounds.kappa_max);
    const double sum = b.kappa_max + b.kappa_min;
    const double diff = b.kappa_max - b.kappa_min;
    WeightSchedule s;
    s.m_count = m;
    s.bounds = b;
    s.weights.resize(static_cast<std::size_t>(m));
    std::vector<double> nodes(static_cast<std::size_t>(m));
    // Zero k = 1 has the largest cosine, hence the largest weight; fill from
    // the back so the stored weights ascend.
    for (int k = 1; k <= m; ++k) {
        const double t = std::cos(pi * (2.0 * k - 1.0) / (2.0 * m));
        const auto slot = static_cast<std::size_t>(m - k);
        s.weights[slot] = 2.0 / (sum - diff * t);
        nodes[slot] = -t;
    }
    s.order = leja_order(nodes);
    s.tol = s.damping_bound();
    return s;
}

WeightSchedule schedule(const SpectralBounds& bounds, double tol) {
    if (!(tol > 0.0) || !(tol < 1.0)) {
        throw ConfigError("schedule tolerance must lie in (0, 1)");
    }
    const SpectralBounds b = make_bounds(bounds.kappa_min, bounds.kappa_max);
    const double ratio = std::acosh(1.0 / tol) / std::acosh(b.mu());
    // Shave round-off so an exact integer ratio is not bumped to the next M.
    const int m = std::max(1, static_cast<int>(std::ceil(ratio * (1.0 - 1e-12))));
    WeightSchedule s = chebyshev_schedule(b, m);
    s.tol = tol;
    return s;
}

double damping_factor(std::span<const double> weights, double kappa) {
    double log_mag = 0.0;
    bool negative = false;
    for (double w : weights) {
        const double f = 1.0 - w * kappa;
        if (f == 0.0) return 0.0;
        log_mag += std::log(std::abs(f));
        negative = negative != (f < 0.0);
    }
    const double mag = std::exp(log_mag);
    return negative ? -mag : mag;
}

}  // namespace cjm
