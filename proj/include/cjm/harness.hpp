#pragma once

/// @file harness.hpp
/// @brief Test problem, experiment runner and report formats.
///
/// The test problem is Lap u = -(x^2 + y^2) exp(xy) on the unit square with
/// Dirichlet data from the exact solution u = -exp(xy).

#include "cjm/backend.hpp"
#include "cjm/grid.hpp"
#include "cjm/solver.hpp"
#include "cjm/spectral.hpp"
#include "cjm/stencil.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cjm {

StencilKind parse_stencil(std::string_view text);  // "5", "9", "17"
int stencil_points(StencilKind kind);
StencilMask make_mask(StencilKind kind);
/// Ghost width required by the stencil footprint.
int ghost_width(StencilKind kind);

MethodKind parse_method(std::string_view text);  // "jacobi", "cjm"
const char* method_name(MethodKind kind);

/// How the right-hand side is sampled. Auto selects Compact for the 9-point
/// stencil (whose fourth-order accuracy relies on it) and Pointwise otherwise.
enum class SourceRule { Auto, Pointwise, Compact };
SourceRule parse_source_rule(std::string_view text);
SourceRule resolve_source_rule(SourceRule rule, StencilKind kind);

double test_solution(double x, double y);
double test_source(double x, double y);

struct TestProblem {
    Field b;
    Field u0;
    ScalarFn exact;
};

/// b from the source, u0 zero inside with every ghost layer holding the exact
/// solution. Requires a Cartesian grid.
TestProblem setup_test_problem(const GridPtr& grid, SourceRule rule = SourceRule::Pointwise);

/// eps(N) = eps0 * (n0 / N)^2.
double tolerance_rule(int n, double eps0 = 1e-6, int n0 = 128);

struct RunConfig {
    StencilKind stencil = StencilKind::Five;
    MethodKind method = MethodKind::Chebyshev;
    int n = 128;
    StopMode stop_mode = StopMode::ResidualTol;
    /// Stop tolerance; defaults to tolerance_rule(n).
    std::optional<double> tol;
    /// Per-cycle Chebyshev damping target; defaults to tolerance_rule(n).
    std::optional<double> schedule_tol;
    double jacobi_weight = 1.0;
    int jacobi_check = 16;
    long max_cycles = 1'000'000;
    SourceRule source = SourceRule::Auto;
    Backend backend = Backend::serial();
};

struct BenchRecord {
    std::string experiment;
    int n = 0;
    std::string method;   // jacobi | cjm
    std::string stencil;  // 5 | 9 | 17
    std::string backend;  // serial | parallel
    int workers = 1;
    std::string status;   // ok | nonconvergence | divergence
    long iterations = 0;
    long cycles = 0;
    int m_count = 0;      // Chebyshev cycle length, 0 for Jacobi
    double wall_time = 0.0;
    double setup_time = 0.0;
    double final_residual = 0.0;
    double final_real_error = 0.0;

    friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

struct RunOutcome {
    BenchRecord record;
    SolveReport report;
    std::optional<Field> solution;  // absent on failure
    std::optional<WeightSchedule> schedule;
};

/// Runs one configuration on the test problem. Solver failures are reported
/// through record.status rather than thrown.
RunOutcome run_single(const RunConfig& config, const std::string& experiment = "single");

struct Experiment {
    std::string id = "bench";
    std::vector<StencilKind> stencils{StencilKind::Five};
    std::vector<MethodKind> methods{MethodKind::Chebyshev};
    std::vector<int> n_list;
    std::vector<Backend> backends{Backend::serial()};
    StopMode stop_mode = StopMode::ResidualTol;
    std::optional<double> tol;
    SourceRule source = SourceRule::Auto;
    long max_cycles = 1'000'000;
    std::optional<std::filesystem::path> out;

    /// n_list ascending, every n >= 8, at least one of each axis.
    void validate() const;
};

/// One record per (stencil, method, backend, n). With `out` set the CSV file
/// is replaced atomically after every record.
std::vector<BenchRecord> run_experiment(const Experiment& experiment);

std::string csv_header();
std::string to_csv_line(const BenchRecord& record);
BenchRecord parse_csv_line(std::string_view line);
void write_records_csv(const std::filesystem::path& path, const std::vector<BenchRecord>& records);
std::vector<BenchRecord> read_records_csv(const std::filesystem::path& path);

struct OrderResult {
    double slope = 0.0;
    std::vector<int> n;
    std::vector<double> errors;
    std::vector<BenchRecord> records;
};

struct OrderOptions {
    /// Stop at residual eps(N) * safety.
    double safety = 1e-2;
    /// On fine grids the relative residual can stall at a round-off floor
    /// above eps(N) * safety. A run that hits max_cycles is still accepted
    /// when its residual is at or below eps(N) * floor_limit.
    long max_cycles = 20;
    double floor_limit = 1e-1;
    SourceRule source = SourceRule::Auto;
    Backend backend = Backend::serial();
};

/// Least-squares slope of log(real error) against log(h).
OrderResult convergence_order(StencilKind kind, const std::vector<int>& n_list,
                              const OrderOptions& options = {});

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Lower-triangular speed-up table; entry (r, c) = time(c) / time(r) for r >= c.
struct RatioTable {
    int n = 0;
    std::string stencil;
    std::vector<std::string> labels;  // j, j_parallel, cj, cj_parallel
    std::vector<std::vector<double>> ratio;
};

/// Throws ConfigError naming every missing (method, backend) cell.
RatioTable ratio_table(const std::vector<BenchRecord>& records, int n, const std::string& stencil);
std::string render(const RatioTable& table);

}  // namespace cjm
