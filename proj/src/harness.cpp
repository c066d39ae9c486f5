#include "cjm/harness.hpp"

#include "cjm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace cjm {

StencilKind parse_stencil(std::string_view text) {
    if (text == "5" || text == "5pt") return StencilKind::Five;
    if (text == "9" || text == "9pt") return StencilKind::Nine;
    if (text == "17" || text == "17pt") return StencilKind::Seventeen;
    throw ConfigError("unknown stencil '" + std::string(text) + "' (expected 5, 9 or 17)");
}

int stencil_points(StencilKind kind) {
    switch (kind) {
        case StencilKind::Five: return 5;
        case StencilKind::Nine: return 9;
        case StencilKind::Seventeen: return 17;
    }
    return 0;
}

StencilMask make_mask(StencilKind kind) {
    switch (kind) {
        case StencilKind::Five: return cartesian_5pt();
        case StencilKind::Nine: return cartesian_9pt();
        case StencilKind::Seventeen: return cartesian_17pt();
    }
    throw ConfigError("unknown stencil kind");
}

int ghost_width(StencilKind kind) {
    return kind == StencilKind::Seventeen ? 2 : 1;
}

MethodKind parse_method(std::string_view text) {
    if (text == "jacobi" || text == "j") return MethodKind::Jacobi;
    if (text == "cjm" || text == "cj") return MethodKind::Chebyshev;
    throw ConfigError("unknown method '" + std::string(text) + "' (expected jacobi or cjm)");
}

const char* method_name(MethodKind kind) {
    return kind == MethodKind::Jacobi ? "jacobi" : "cjm";
}

SourceRule parse_source_rule(std::string_view text) {
    if (text == "auto") return SourceRule::Auto;
    if (text == "pointwise") return SourceRule::Pointwise;
    if (text == "compact") return SourceRule::Compact;
    throw ConfigError("unknown source rule '" + std::string(text) + "'");
}

SourceRule resolve_source_rule(SourceRule rule, StencilKind kind) {
    if (rule != SourceRule::Auto) return rule;
    return kind == StencilKind::Nine ? SourceRule::Compact : SourceRule::Pointwise;
}

double test_solution(double x, double y) {
    return -std::exp(x * y);
}

double test_source(double x, double y) {
    return -(x * x + y * y) * std::exp(x * y);
}

TestProblem setup_test_problem(const GridPtr& grid, SourceRule rule) {
    if (grid->coords().kind() != CoordinateKind::Cartesian) {
        throw ConfigError("the test problem is defined on a Cartesian grid");
    }
    if (rule == SourceRule::Auto) {
        throw ConfigError("resolve the source rule against a stencil first");
    }
    TestProblem p{Field(grid), Field(grid), &test_solution};
    if (rule == SourceRule::Compact) {
        p.b = compact_source(grid, &test_source);
    } else {
        fill_interior(p.b, &test_source);
    }
    fill_dirichlet(p.u0, &test_solution);
    return p;
}

double tolerance_rule(int n, double eps0, int n0) {
    const double r = static_cast<double>(n0) / n;
    return eps0 * r * r;
}

RunOutcome run_single(const RunConfig& config, const std::string& experiment) {
    const auto t0 = std::chrono::steady_clock::now();
    const GridPtr grid = make_uniform_grid(config.n, CoordinateSystem::cartesian(), ghost_width(config.stencil));
    const CompiledStencil stencil = compile(make_mask(config.stencil), grid);
    TestProblem problem = setup_test_problem(grid, resolve_source_rule(config.source, config.stencil));

    const double tol = config.tol.value_or(tolerance_rule(config.n));
    StopRule stop;
    switch (config.stop_mode) {
        case StopMode::ResidualTol:
            stop = StopRule::residual(tol, config.max_cycles);
            stop.reference = problem.exact;
            break;
        case StopMode::RealErrorTol:
            stop = StopRule::real_error(tol, problem.exact, config.max_cycles);
            break;
        case StopMode::MaxIters:
            stop = StopRule::fixed_cycles(config.max_cycles);
            stop.reference = problem.exact;
            break;
    }

    RunOutcome out;
    Method method;
    if (config.method == MethodKind::Chebyshev) {
        const SpectralBounds bounds = analytic_bounds(config.stencil, grid->nx(), grid->ny());
        out.schedule = schedule(bounds, config.schedule_tol.value_or(tolerance_rule(config.n)));
        method = Method::chebyshev(*out.schedule);
    } else {
        method = Method::jacobi(config.jacobi_weight, config.jacobi_check);
    }
    const double setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    BenchRecord& r = out.record;
    r.experiment = experiment;
    r.n = config.n;
    r.method = method_name(config.method);
    r.stencil = std::to_string(stencil_points(config.stencil));
    r.backend = config.backend.kind() == BackendKind::Serial ? "serial" : "parallel";
    r.workers = config.backend.workers();
    r.m_count = out.schedule ? out.schedule->m_count : 0;
    r.setup_time = setup;

    try {
        SolveResult res = solve(stencil, problem.u0, problem.b, method, stop, config.backend);
        out.report = std::move(res.report);
        out.solution.emplace(std::move(res.solution));
        r.status = "ok";
    } catch (const NonConvergenceError& e) {
        out.report = e.report();
        r.status = "nonconvergence";
    } catch (const DivergenceError& e) {
        out.report = e.report();
        r.status = "divergence";
    }
    r.iterations = out.report.iterations;
    r.cycles = out.report.cycles;
    r.wall_time = out.report.wall_time;
    r.final_residual = out.report.final_residual;
    r.final_real_error = out.report.final_real_error.value_or(std::numeric_limits<double>::quiet_NaN());
    return out;
}

void Experiment::validate() const {
    if (stencils.empty() || methods.empty() || backends.empty() || n_list.empty()) {
        throw ConfigError("experiment needs at least one stencil, method, backend and grid size");
    }
    for (std::size_t k = 0; k < n_list.size(); ++k) {
        if (n_list[k] < 8) {
            throw ConfigError("experiment grid sizes must be >= 8");
        }
        if (k > 0 && n_list[k] <= n_list[k - 1]) {
            throw ConfigError("experiment grid sizes must be strictly ascending");
        }
    }
}

std::vector<BenchRecord> run_experiment(const Experiment& experiment) {
    experiment.validate();
    std::vector<BenchRecord> records;
    for (StencilKind stencil : experiment.stencils) {
        for (MethodKind method : experiment.methods) {
            for (const Backend& backend : experiment.backends) {
                for (int n : experiment.n_list) {
                    RunConfig cfg;
                    cfg.stencil = stencil;
                    cfg.method = method;
                    cfg.n = n;
                    cfg.stop_mode = experiment.stop_mode;
                    cfg.tol = experiment.tol;
                    cfg.source = experiment.source;
                    cfg.max_cycles = experiment.max_cycles;
                    cfg.backend = backend;
                    records.push_back(run_single(cfg, experiment.id).record);
                    if (experiment.out) {
                        write_records_csv(*experiment.out, records);
                    }
                }
            }
        }
    }
    return records;
}

namespace {

const char* const kColumns[] = {"experiment", "n", "method", "stencil", "backend",
                                "workers", "status", "iterations", "cycles", "m_count",
                                "wall_time", "setup_time", "final_residual", "final_real_error"};

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

template <class T>
T parse_number(std::string_view field, const char* column) {
    T value{};
    const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw IoError("malformed CSV value '" + std::string(field) + "' in column " + column);
    }
    return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

}  // namespace

std::string csv_header() {
    std::string h = "# ";
    for (std::size_t k = 0; k < std::size(kColumns); ++k) {
        if (k) h += ',';
        h += kColumns[k];
    }
    return h;
}

std::string to_csv_line(const BenchRecord& r) {
    std::ostringstream os;
    os << r.experiment << ',' << r.n << ',' << r.method << ',' << r.stencil << ',' << r.backend << ','
       << r.workers << ',' << r.status << ',' << r.iterations << ',' << r.cycles << ',' << r.m_count
       << ',' << format_double(r.wall_time) << ',' << format_double(r.setup_time) << ','
       << format_double(r.final_residual) << ',' << format_double(r.final_real_error);
    return os.str();
}

BenchRecord parse_csv_line(std::string_view line) {
    const auto f = split(line, ',');
    if (f.size() != std::size(kColumns)) {
        throw IoError("CSV line has " + std::to_string(f.size()) + " fields, expected " +
                      std::to_string(std::size(kColumns)));
    }
    BenchRecord r;
    r.experiment = std::string(f[0]);
    r.n = parse_number<int>(f[1], "n");
    r.method = std::string(f[2]);
    r.stencil = std::string(f[3]);
    r.backend = std::string(f[4]);
    r.workers = parse_number<int>(f[5], "workers");
    r.status = std::string(f[6]);
    r.iterations = parse_number<long>(f[7], "iterations");
    r.cycles = parse_number<long>(f[8], "cycles");
    r.m_count = parse_number<int>(f[9], "m_count");
    r.wall_time = parse_number<double>(f[10], "wall_time");
    r.setup_time = parse_number<double>(f[11], "setup_time");
    r.final_residual = parse_number<double>(f[12], "final_residual");
    r.final_real_error = parse_number<double>(f[13], "final_real_error");
    return r;
}

void write_records_csv(const std::filesystem::path& path, const std::vector<BenchRecord>& records) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::trunc);
        if (!os) {
            throw IoError("cannot open " + tmp.string() + " for writing");
        }
        os << csv_header() << '\n';
        for (const auto& r : records) {
            os << to_csv_line(r) << '\n';
        }
        os.flush();
        if (!os) {
            throw IoError("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::vector<BenchRecord> read_records_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<BenchRecord> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line.front() == '#') continue;
        out.push_back(parse_csv_line(line));
    }
    return out;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw ConfigError("slope needs at least two points");
    }
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sx += x[k];
        sy += y[k];
        sxx += x[k] * x[k];
        sxy += x[k] * y[k];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

OrderResult convergence_order(StencilKind kind, const std::vector<int>& n_list,
                              const OrderOptions& options) {
    if (n_list.size() < 3) {
        throw ConfigError("convergence order needs at least three grid sizes");
    }
    OrderResult out;
    std::vector<double> log_h;
    std::vector<double> log_e;
    for (int n : n_list) {
        RunConfig cfg;
        cfg.stencil = kind;
        cfg.method = MethodKind::Chebyshev;
        cfg.n = n;
        cfg.stop_mode = StopMode::ResidualTol;
        cfg.tol = tolerance_rule(n) * options.safety;
        cfg.schedule_tol = tolerance_rule(n) * options.safety;
        cfg.max_cycles = options.max_cycles;
        cfg.source = options.source;
        cfg.backend = options.backend;
        RunOutcome run = run_single(cfg, "order");
        const bool at_floor = run.record.status == "nonconvergence" &&
                              run.record.final_residual <= tolerance_rule(n) * options.floor_limit;
        if (run.record.status != "ok" && !at_floor) {
            throw ConvergenceError("convergence-order run at n = " + std::to_string(n) + " ended with " +
                                   run.record.status);
        }
        out.n.push_back(n);
        out.errors.push_back(run.record.final_real_error);
        out.records.push_back(run.record);
        log_h.push_back(std::log(1.0 / n));
        log_e.push_back(std::log(run.record.final_real_error));
    }
    out.slope = least_squares_slope(log_h, log_e);
    return out;
}

namespace {

const char* const kRatioLabels[] = {"j", "j_parallel", "cj", "cj_parallel"};

}  // namespace

RatioTable ratio_table(const std::vector<BenchRecord>& records, int n, const std::string& stencil) {
    std::map<std::string, double> times;
    for (const auto& r : records) {
        if (r.n != n || r.stencil != stencil || r.status != "ok") continue;
        const std::string key = std::string(r.method == "jacobi" ? "j" : "cj") +
                                (r.backend == "parallel" ? "_parallel" : "");
        // Keep the first measurement of a cell.
        times.emplace(key, r.wall_time);
    }
    std::string missing;
    for (const char* label : kRatioLabels) {
        if (!times.count(label)) {
            missing += missing.empty() ? "" : ", ";
            missing += label;
        }
    }
    if (!missing.empty()) {
        throw ConfigError("ratio table for n = " + std::to_string(n) + ", " + stencil +
                          "-point is missing: " + missing);
    }
    RatioTable t;
    t.n = n;
    t.stencil = stencil;
    const std::size_t k = std::size(kRatioLabels);
    t.labels.assign(std::begin(kRatioLabels), std::end(kRatioLabels));
    t.ratio.assign(k, std::vector<double>(k, std::numeric_limits<double>::quiet_NaN()));
    for (std::size_t row = 0; row < k; ++row) {
        for (std::size_t col = 0; col <= row; ++col) {
            t.ratio[row][col] = times[t.labels[col]] / times[t.labels[row]];
        }
    }
    return t;
}

std::string render(const RatioTable& t) {
    std::ostringstream os;
    os << "# speed-up of column method relative to row method, " << t.stencil
       << "-point stencil, N = " << t.n << " (measured on this host)\n";
    os << "# " << t.stencil << "-points";
    for (const auto& l : t.labels) os << '\t' << l;
    os << '\n';
    for (std::size_t r = 0; r < t.labels.size(); ++r) {
        os << t.labels[r];
        for (std::size_t c = 0; c < t.labels.size(); ++c) {
            os << '\t';
            if (c > r) {
                os << '-';
            } else {
                const double v = t.ratio[r][c];
                os << (v >= 10.0 ? std::round(v) : std::round(v * 100.0) / 100.0);
            }
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace cjm
