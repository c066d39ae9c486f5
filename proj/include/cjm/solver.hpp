#pragma once

/// @file solver.hpp
/// @brief Weighted Jacobi and Chebyshev-Jacobi iterations.

#include "cjm/backend.hpp"
#include "cjm/errors.hpp"
#include "cjm/grid.hpp"
#include "cjm/spectral.hpp"
#include "cjm/stencil.hpp"

#include <optional>
#include <vector>

namespace cjm {

enum class MethodKind { Jacobi, Chebyshev };

struct Method {
    MethodKind kind = MethodKind::Jacobi;
    double jacobi_weight = 1.0;
    /// Sweeps between stop checks for plain Jacobi.
    int check_every = 16;
    std::optional<WeightSchedule> schedule;

    static Method jacobi(double weight = 1.0, int check_every = 16);
    static Method chebyshev(WeightSchedule schedule);

    /// Sweeps per cycle: M for Chebyshev, check_every for Jacobi.
    int cycle_length() const;
};

enum class StopMode { ResidualTol, RealErrorTol, MaxIters };

struct StopRule {
    StopMode mode = StopMode::ResidualTol;
    double tol = 0.0;
    /// Analytic solution. Required for RealErrorTol; in the other modes it is
    /// only used to record the real error.
    ScalarFn reference;
    long max_cycles = 1'000'000;

    static StopRule residual(double tol, long max_cycles = 1'000'000);
    static StopRule real_error(double tol, ScalarFn exact, long max_cycles = 1'000'000);
    static StopRule fixed_cycles(long cycles);
};

struct TracePoint {
    long cycle = 0;
    long iterations = 0;
    double residual = 0.0;
    double real_error = 0.0;  // NaN without a reference
    double elapsed = 0.0;     // seconds since the first sweep
};

struct SolveReport {
    long iterations = 0;
    long cycles = 0;
    double final_residual = 0.0;
    std::optional<double> final_real_error;
    double wall_time = 0.0;
    std::vector<TracePoint> trace;

    std::vector<double> residual_history() const;
    std::vector<double> error_history() const;
};

struct SolveResult {
    Field solution;
    SolveReport report;
};

/// Stop rule not met within max_cycles. Carries the partial report.
class NonConvergenceError : public ConvergenceError {
public:
    NonConvergenceError(const std::string& what, SolveReport report)
        : ConvergenceError(what), report_(std::move(report)) {}
    const SolveReport& report() const { return report_; }

private:
    SolveReport report_;
};

/// A non-finite value appeared in the iterate.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, SolveReport report)
        : Error(what), report_(std::move(report)) {}
    const SolveReport& report() const { return report_; }

private:
    SolveReport report_;
};

/// One weighted Jacobi step into `out`:
/// out = u + weight * (jacobi_local(u, b) - u) on the interior. `out` must not
/// alias `u`; its ghost ring is left untouched.
void sweep_into(const CompiledStencil& stencil, const Field& u, const Field& b, double weight,
                Field& out, const Backend& backend = Backend::serial());

/// Same as sweep_into, returning a fresh field whose ghost ring is copied from u.
Field sweep(const CompiledStencil& stencil, const Field& u, const Field& b, double weight,
            const Backend& backend = Backend::serial());

/// ||b - A u||_inf / max(||b||_inf, 1e-300) over the interior.
double residual_norm(const CompiledStencil& stencil, const Field& u, const Field& b,
                     const Backend& backend = Backend::serial());

/// max over the interior of |u - exact(x1, x2)|.
double real_error(const Field& u, const ScalarFn& exact, const Backend& backend = Backend::serial());

/// Iterates from u0 (ghost ring already holding the boundary data) until the
/// stop rule holds. Chebyshev checks only at cycle boundaries. Throws
/// NonConvergenceError or DivergenceError.
SolveResult solve(const CompiledStencil& stencil, const Field& u0, const Field& b,
                  const Method& method, const StopRule& stop,
                  const Backend& backend = Backend::serial());

}  // namespace cjm
