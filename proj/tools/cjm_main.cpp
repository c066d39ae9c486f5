// Command-line front end: single solves, benchmark sweeps, spectral bounds,
// weight schedules, convergence order and speed-up tables.

#include "cjm/errors.hpp"
#include "cjm/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitNonConvergence = 2;
constexpr int kExitConfig = 3;
constexpr int kExitIo = 4;

std::string shortest(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct BackendOptions {
    std::string kind = "serial";
    int workers = 1;
    int chunk = 0;

    cjm::Backend make() const {
        if (kind == "serial") return cjm::Backend::serial();
        if (kind == "parallel") return cjm::Backend::parallel(workers, chunk);
        throw cjm::ConfigError("unknown backend '" + kind + "'");
    }
};

void add_backend_options(CLI::App* app, BackendOptions& b) {
    app->add_option("--backend", b.kind, "serial or parallel")->check(CLI::IsMember({"serial", "parallel"}));
    app->add_option("--workers", b.workers, "worker threads for the parallel backend")->check(CLI::PositiveNumber);
    app->add_option("--chunk", b.chunk, "rows per block, 0 = even split")->check(CLI::NonNegativeNumber);
}

template <class T, class F>
std::vector<T> parse_list(const std::vector<std::string>& items, F&& parse) {
    std::vector<T> out;
    for (const auto& s : items) out.push_back(parse(s));
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw cjm::IoError("cannot open " + path + " for writing");
    os << text;
    if (!os) throw cjm::IoError("write to " + path + " failed");
}

json record_json(const cjm::BenchRecord& r) {
    return {{"experiment", r.experiment}, {"n", r.n},
            {"method", r.method},         {"stencil", r.stencil},
            {"backend", r.backend},       {"workers", r.workers},
            {"status", r.status},         {"iterations", r.iterations},
            {"cycles", r.cycles},         {"m_count", r.m_count},
            {"wall_time", r.wall_time},   {"setup_time", r.setup_time},
            {"final_residual", r.final_residual},
            {"final_real_error", std::isfinite(r.final_real_error) ? json(r.final_real_error) : json(nullptr)}};
}

std::string trace_csv(const cjm::SolveReport& report) {
    std::string out = "# cycle,iterations,residual,real_error,elapsed_seconds\n";
    for (const auto& p : report.trace) {
        out += std::to_string(p.cycle) + ',' + std::to_string(p.iterations) + ',' + shortest(p.residual) +
               ',' + shortest(p.real_error) + ',' + shortest(p.elapsed) + '\n';
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chebyshev-Jacobi solver for the 2D Poisson test problem"};
    app.require_subcommand(1);

    // solve
    std::string stencil = "5";
    int n = 128;
    std::string method = "cjm";
    std::optional<double> tol;
    std::optional<double> real_err;
    std::optional<double> schedule_tol;
    std::optional<long> fixed_cycles;
    double jacobi_weight = 1.0;
    int check_every = 16;
    long max_cycles = 1'000'000;
    std::string source = "auto";
    BackendOptions backend;
    std::string out_path;
    std::string trace_path;

    auto* solve = app.add_subcommand("solve", "solve the test problem once");
    solve->add_option("--stencil", stencil, "5, 9 or 17")->check(CLI::IsMember({"5", "9", "17"}));
    solve->add_option("--n", n, "intervals per dimension")->check(CLI::Range(4, 1 << 16));
    solve->add_option("--method", method, "jacobi or cjm")->check(CLI::IsMember({"jacobi", "cjm"}));
    auto* tol_opt = solve->add_option("--tol", tol, "relative residual tolerance (default 1e-6 (128/N)^2)");
    auto* err_opt = solve->add_option("--real-error", real_err, "stop on max-norm error against the exact solution");
    auto* cyc_opt = solve->add_option("--cycles", fixed_cycles, "run exactly this many cycles");
    tol_opt->excludes(err_opt)->excludes(cyc_opt);
    err_opt->excludes(cyc_opt);
    solve->add_option("--schedule-tol", schedule_tol, "per-cycle Chebyshev damping (default 1e-6 (128/N)^2)");
    solve->add_option("--jacobi-weight", jacobi_weight, "weight of plain Jacobi");
    solve->add_option("--check-every", check_every, "Jacobi sweeps between stop checks");
    solve->add_option("--max-cycles", max_cycles, "cycle budget");
    solve->add_option("--source", source, "auto, pointwise or compact")
        ->check(CLI::IsMember({"auto", "pointwise", "compact"}));
    add_backend_options(solve, backend);
    solve->add_option("--out", out_path, "JSON report");
    solve->add_option("--trace", trace_path, "per-cycle CSV trace");

    // bench
    std::vector<std::string> stencils{"5"};
    std::vector<std::string> methods{"cjm"};
    std::vector<int> n_list;
    std::vector<std::string> backends{"serial"};
    std::string experiment_id = "bench";
    auto* bench = app.add_subcommand("bench", "run a grid of configurations and write CSV");
    bench->add_option("--stencils", stencils, "comma-separated stencils")->delimiter(',');
    bench->add_option("--methods", methods, "comma-separated methods")->delimiter(',');
    bench->add_option("--n-list", n_list, "comma-separated grid sizes")->delimiter(',')->required();
    bench->add_option("--backends", backends, "comma-separated backends")->delimiter(',');
    bench->add_option("--workers", backend.workers, "workers for the parallel backend")->check(CLI::PositiveNumber);
    auto* btol = bench->add_option("--tol", tol, "relative residual tolerance (default 1e-6 (128/N)^2)");
    auto* berr = bench->add_option("--real-error", real_err, "real-error tolerance");
    btol->excludes(berr);
    bench->add_option("--max-cycles", max_cycles, "cycle budget per run");
    bench->add_option("--source", source, "auto, pointwise or compact")
        ->check(CLI::IsMember({"auto", "pointwise", "compact"}));
    bench->add_option("--id", experiment_id, "experiment id column");
    bench->add_option("--out", out_path, "CSV output")->required();

    // bounds
    std::optional<int> ny;
    bool numeric = false;
    auto* bounds = app.add_subcommand("bounds", "print kappa_min and kappa_max");
    bounds->add_option("--stencil", stencil, "5, 9 or 17")->check(CLI::IsMember({"5", "9", "17"}));
    bounds->add_option("--n", n, "intervals per dimension")->check(CLI::Range(2, 1 << 20));
    bounds->add_option("--ny", ny, "intervals in y if different")->check(CLI::Range(2, 1 << 20));
    bounds->add_flag("--numeric", numeric, "also estimate the bounds by power iteration");

    // schedule
    bool applied_order = false;
    auto* sched = app.add_subcommand("schedule", "print M and the Chebyshev weights");
    sched->add_option("--stencil", stencil, "5, 9 or 17")->check(CLI::IsMember({"5", "9", "17"}));
    sched->add_option("--n", n, "intervals per dimension")->check(CLI::Range(2, 1 << 20));
    sched->add_option("--tol", tol, "per-cycle damping target (default 1e-6 (128/N)^2)");
    sched->add_flag("--applied", applied_order, "list weights in application order");

    // sweep-order
    double safety = 1e-2;
    auto* order = app.add_subcommand("sweep-order", "measure the convergence order");
    order->add_option("--stencil", stencil, "5, 9 or 17")->check(CLI::IsMember({"5", "9", "17"}));
    order->add_option("--n-list", n_list, "comma-separated grid sizes")->delimiter(',')->required();
    order->add_option("--safety", safety, "stop at eps(N) times this factor");
    order->add_option("--source", source, "auto, pointwise or compact")
        ->check(CLI::IsMember({"auto", "pointwise", "compact"}));
    order->add_option("--out", out_path, "CSV of per-n records");

    // ratios
    std::string in_path;
    auto* ratios = app.add_subcommand("ratios", "speed-up table from bench CSV");
    ratios->add_option("--in", in_path, "bench CSV")->required();
    ratios->add_option("--n", n, "grid size")->required();
    ratios->add_option("--stencil", stencil, "5, 9 or 17")->check(CLI::IsMember({"5", "9", "17"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*solve) {
            cjm::RunConfig cfg;
            cfg.stencil = cjm::parse_stencil(stencil);
            cfg.method = cjm::parse_method(method);
            cfg.n = n;
            if (real_err) {
                cfg.stop_mode = cjm::StopMode::RealErrorTol;
                cfg.tol = real_err;
            } else if (fixed_cycles) {
                cfg.stop_mode = cjm::StopMode::MaxIters;
                max_cycles = *fixed_cycles;
            } else {
                cfg.tol = tol;
            }
            cfg.schedule_tol = schedule_tol;
            cfg.jacobi_weight = jacobi_weight;
            cfg.jacobi_check = check_every;
            cfg.max_cycles = max_cycles;
            cfg.source = cjm::parse_source_rule(source);
            cfg.backend = backend.make();

            const cjm::RunOutcome run = cjm::run_single(cfg);
            const auto& r = run.record;
            std::cout << "status " << r.status << "\niterations " << r.iterations << "\ncycles " << r.cycles
                      << "\nM " << r.m_count << "\nfinal_residual " << shortest(r.final_residual)
                      << "\nfinal_real_error " << shortest(r.final_real_error) << "\nwall_time "
                      << shortest(r.wall_time) << "\nsetup_time " << shortest(r.setup_time) << '\n';
            if (!out_path.empty()) {
                json j = record_json(r);
                j["backend_detail"] = cfg.backend.describe();
                if (run.schedule) {
                    j["kappa_min"] = run.schedule->bounds.kappa_min;
                    j["kappa_max"] = run.schedule->bounds.kappa_max;
                    j["schedule_tol"] = run.schedule->tol;
                }
                json trace = json::array();
                for (const auto& p : run.report.trace) {
                    trace.push_back({{"cycle", p.cycle},
                                     {"iterations", p.iterations},
                                     {"residual", p.residual},
                                     {"real_error", p.real_error},
                                     {"elapsed_seconds", p.elapsed}});
                }
                j["trace"] = trace;
                write_text(out_path, j.dump(2) + "\n");
            }
            if (!trace_path.empty()) {
                write_text(trace_path, trace_csv(run.report));
            }
            return r.status == "ok" ? kExitOk : kExitNonConvergence;
        }

        if (*bench) {
            cjm::Experiment e;
            e.id = experiment_id;
            e.stencils = parse_list<cjm::StencilKind>(stencils, [](const std::string& s) { return cjm::parse_stencil(s); });
            e.methods = parse_list<cjm::MethodKind>(methods, [](const std::string& s) { return cjm::parse_method(s); });
            e.n_list = n_list;
            e.backends = parse_list<cjm::Backend>(backends, [&](const std::string& s) {
                BackendOptions b = backend;
                b.kind = s;
                return b.make();
            });
            if (real_err) {
                e.stop_mode = cjm::StopMode::RealErrorTol;
                e.tol = real_err;
            } else {
                e.tol = tol;
            }
            e.source = cjm::parse_source_rule(source);
            e.max_cycles = max_cycles;
            e.out = out_path;
            const auto records = cjm::run_experiment(e);
            bool all_ok = true;
            for (const auto& r : records) {
                std::cout << cjm::to_csv_line(r) << '\n';
                all_ok = all_ok && r.status == "ok";
            }
            return all_ok ? kExitOk : kExitNonConvergence;
        }

        if (*bounds) {
            const auto kind = cjm::parse_stencil(stencil);
            const int nyv = ny.value_or(n);
            const auto b = cjm::analytic_bounds(kind, n, nyv);
            std::cout << "kappa_min " << shortest(b.kappa_min) << "\nkappa_max " << shortest(b.kappa_max)
                      << "\nmu " << shortest(b.mu()) << '\n';
            if (numeric) {
                const auto grid = cjm::make_uniform_grid(n, cjm::CoordinateSystem::cartesian(), cjm::ghost_width(kind));
                if (ny && *ny != n) {
                    throw cjm::ConfigError("--numeric needs a square grid");
                }
                const auto s = cjm::compile(cjm::make_mask(kind), grid);
                const auto nb = cjm::bounds_numeric(s);
                std::cout << "numeric_kappa_min " << shortest(nb.kappa_min) << "\nnumeric_kappa_max "
                          << shortest(nb.kappa_max) << '\n';
            }
            return kExitOk;
        }

        if (*sched) {
            const auto kind = cjm::parse_stencil(stencil);
            const auto b = cjm::analytic_bounds(kind, n, n);
            const auto s = cjm::schedule(b, tol.value_or(cjm::tolerance_rule(n)));
            std::cout << "M " << s.m_count << "\ntol " << shortest(s.tol) << "\ndamping_bound "
                      << shortest(s.damping_bound()) << '\n';
            const auto w = applied_order ? s.applied() : s.weights;
            for (std::size_t k = 0; k < w.size(); ++k) {
                std::cout << (k + 1) << ' ' << shortest(w[k]) << '\n';
            }
            return kExitOk;
        }

        if (*order) {
            cjm::OrderOptions opts;
            opts.safety = safety;
            opts.source = cjm::parse_source_rule(source);
            const auto res = cjm::convergence_order(cjm::parse_stencil(stencil), n_list, opts);
            for (std::size_t k = 0; k < res.n.size(); ++k) {
                std::cout << res.n[k] << ' ' << shortest(res.errors[k]) << '\n';
            }
            std::cout << "slope " << shortest(res.slope) << '\n';
            if (!out_path.empty()) {
                cjm::write_records_csv(out_path, res.records);
            }
            return kExitOk;
        }

        if (*ratios) {
            const auto records = cjm::read_records_csv(in_path);
            std::cout << cjm::render(cjm::ratio_table(records, n, stencil));
            return kExitOk;
        }
    } catch (const cjm::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const cjm::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const cjm::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNonConvergence;
    } catch (const cjm::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNonConvergence;
    }
    return kExitOk;
}
