#pragma once

/// @file spectral.hpp
/// @brief Spectral bounds of the Jacobi-normalised operator and Chebyshev
/// weight schedules.
///
/// kappa ranges over the eigenvalues of D^{-1} A, where D is the diagonal of
/// the discrete operator A. A weighted Jacobi step with weight w scales the
/// error component of eigenvalue kappa by (1 - w kappa). A schedule of M
/// weights is built from the zeros of the degree-M Chebyshev polynomial mapped
/// onto [kappa_min, kappa_max], so that the product over one cycle is bounded
/// by 1 / T_M(mu) on the whole interval.

#include "cjm/stencil.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace cjm {

enum class StencilKind { Five, Nine, Seventeen };

struct SpectralBounds {
    double kappa_min = 0.0;
    double kappa_max = 0.0;

    /// (kappa_max + kappa_min) / (kappa_max - kappa_min).
    double mu() const { return (kappa_max + kappa_min) / (kappa_max - kappa_min); }
};

/// Validates 0 < kappa_min < kappa_max <= 2.
SpectralBounds make_bounds(double kappa_min, double kappa_max);

/// kappa_min = sin^2(pi/2nx) + sin^2(pi/2ny), kappa_max = 2.
SpectralBounds bounds_5pt(int nx, int ny);
SpectralBounds bounds_9pt(int nx, int ny);
SpectralBounds bounds_17pt(int nx, int ny);
SpectralBounds analytic_bounds(StencilKind kind, int nx, int ny);

struct PowerIterationOptions {
    int max_iterations = 2'000'000;
    /// Target relative accuracy of each bound.
    double rel_accuracy = 1e-10;
    std::uint64_t seed = 0x5eed;
};

/// Extreme eigenvalues of D^{-1} A by power iteration on the compiled operator
/// (zero Dirichlet data). kappa_max comes from plain power iteration, kappa_min
/// from the shifted operator kappa_max I - D^{-1} A. Throws ConvergenceError
/// when the budget runs out.
SpectralBounds bounds_numeric(const CompiledStencil& stencil, const PowerIterationOptions& opts = {});

/// T_m(x) for real x.
double chebyshev_t(int m, double x);

struct WeightSchedule {
    int m_count = 0;
    std::vector<double> weights;  // ascending
    std::vector<int> order;       // application order, indices into weights
    SpectralBounds bounds;
    double tol = 0.0;

    /// Guaranteed per-cycle damping: 1 / T_M(mu).
    double damping_bound() const;
    /// Weights in application order.
    std::vector<double> applied() const;
};

/// Chebyshev schedule with exactly m weights.
WeightSchedule chebyshev_schedule(const SpectralBounds& bounds, int m);

/// Smallest M with 1 / T_M(mu) <= tol: M = ceil(acosh(1/tol) / acosh(mu)).
/// Throws ConfigError unless 0 < tol < 1.
WeightSchedule schedule(const SpectralBounds& bounds, double tol);

/// prod_m (1 - w_m kappa), evaluated in log space so long schedules neither
/// overflow nor underflow in the intermediate products.
double damping_factor(std::span<const double> weights, double kappa);

/// Leja ordering of points: start at the point of largest magnitude, then
/// repeatedly take the point maximising the product of distances to those
/// already chosen. Ties go to the lower index.
std::vector<int> leja_order(std::span<const double> points);

}  // namespace cjm
