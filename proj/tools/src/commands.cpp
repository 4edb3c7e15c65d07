#include "mfptmdp/cli/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <CLI11.hpp>

#include "mfptmdp/cli/formats.hpp"

namespace mfptmdp::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::string& path) {
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UsageError("cannot open '" + path + "' for writing");
    return os;
}

SolverKind solver_kind(const std::string& name) {
    const auto kind = parse_solver_kind(name);
    if (!kind) throw UsageError("unknown solver '" + name + "' (expected vi, vi-ps, mfpt-vi, pi, pi-le or mfpt-pi)");
    return *kind;
}

void check_spec(const RunSpec& spec) {
    solver_kind(spec.solver);
    if (!(spec.clip > 0.0)) throw UsageError("--clip must be positive");
    if (!(spec.noise >= 0.0 && spec.noise < 1.0)) throw UsageError("--noise must be in [0, 1)");
    if (!(spec.gamma >= 0.0 && spec.gamma <= 1.0)) throw UsageError("--gamma must be in [0, 1]");
    if (spec.map_path.empty() && !spec.benchmark_side) throw UsageError("a map is required (--map or --grid)");
}

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const GridParseError& e) {
        err << "error: " << e.what();
        if (e.line()) err << " (line " << e.line() << ", column " << e.column() << ")";
        err << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return kExitUsage;
}

std::string layer_suffix(const GridMap& grid, std::size_t z) {
    return grid.is_3d() ? "_z" + std::to_string(z) : std::string();
}

std::size_t write_landscape_files(const std::string& stem, const GridMap& grid,
                                  const ReachabilityLandscape& landscape, double clip) {
    const auto pixels = landscape_pixels(landscape, clip);
    const std::size_t layer = grid.width() * grid.height();
    for (std::size_t z = 0; z < grid.depth(); ++z) {
        auto os = open_output(stem + layer_suffix(grid, z) + ".pgm");
        write_pgm(os, grid.width(), grid.height(),
                  std::span<const std::uint8_t>(pixels).subspan(z * layer, layer));
    }
    return grid.depth();
}

std::string iteration_tag(std::size_t iteration) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "it%04zu", iteration);
    return buf;
}

SolveResult run_solver(const RunSpec& spec, const Mdp& mdp, SolverConfig cfg) {
    return solve(solver_kind(spec.solver), mdp, cfg);
}

int exit_code(bool converged) { return converged ? kExitConverged : kExitNotConverged; }

void write_outputs(const RunSpec& spec, const GridMap& grid, const Mdp& mdp, const SolveResult& result) {
    if (!spec.trace_out.empty()) {
        auto os = open_output(spec.trace_out);
        write_trace_csv(os, result.trace);
    }
    if (!spec.policy_out.empty()) {
        auto os = open_output(spec.policy_out);
        write_policy_csv(os, grid, result.policy);
    }
    if (!spec.rollout_out.empty()) {
        const auto start = grid.start();
        if (!start) throw UsageError("--rollout-out needs a start cell 'S' in the map");
        const auto path = rollout_policy(mdp, result.policy, *start, spec.rollout_steps, spec.seed);
        auto os = open_output(spec.rollout_out);
        write_rollout_csv(os, grid, path);
    }
}

}  // namespace

LoadedMap load_map(const RunSpec& spec) {
    if (spec.benchmark_side) {
        const std::size_t side = *spec.benchmark_side;
        if (spec.benchmark_3d) return {"cube" + std::to_string(side), benchmark_grid_3d(side)};
        return {"grid" + std::to_string(side), benchmark_grid(side)};
    }
    std::ifstream is(spec.map_path, std::ios::binary);
    if (!is) throw UsageError("cannot read map '" + spec.map_path + "'");
    std::ostringstream text;
    text << is.rdbuf();
    return {std::filesystem::path(spec.map_path).stem().string(), parse_grid(text.str())};
}

Mdp build_model(const RunSpec& spec, const GridMap& grid) {
    return build_grid_mdp(grid, NoiseModel{spec.noise}, GridRewards{spec.goal_reward, spec.obstacle_penalty},
                          spec.gamma);
}

SolverConfig make_config(const RunSpec& spec) {
    SolverConfig cfg;
    cfg.epsilon = spec.epsilon;
    cfg.mfpt_period = spec.mfpt_period;
    cfg.max_iterations = spec.max_iterations;
    if (spec.fast_mfpt_tolerance) cfg.mfpt_accuracy = MfptAccuracy::fast(*spec.fast_mfpt_tolerance);
    cfg.validate();
    return cfg;
}

int cmd_solve(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        check_spec(spec);
        const LoadedMap map = load_map(spec);
        const Mdp mdp = build_model(spec, map.grid);
        const SolveResult result = run_solver(spec, mdp, make_config(spec));
        write_outputs(spec, map.grid, mdp, result);
        out << format_summary(result.trace, mdp.num_states()) << '\n';
        return exit_code(result.trace.converged());
    });
}

int cmd_landscape(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        check_spec(spec);
        if (spec.landscape_out.empty()) throw UsageError("--landscape-out is required");
        const LoadedMap map = load_map(spec);
        const Mdp mdp = build_model(spec, map.grid);
        SolverConfig cfg = make_config(spec);
        std::size_t files = 0;
        cfg.on_landscape = [&](std::size_t iteration, const ReachabilityLandscape& landscape) {
            files += write_landscape_files(spec.landscape_out + "_" + iteration_tag(iteration), map.grid,
                                           landscape, spec.clip);
        };
        const SolveResult result = run_solver(spec, mdp, cfg);
        const auto final_landscape = policy_landscape(mdp, result.policy, cfg.mfpt_accuracy);
        files += write_landscape_files(spec.landscape_out + "_final", map.grid, final_landscape, spec.clip);
        write_outputs(spec, map.grid, mdp, result);
        out << format_summary(result.trace, mdp.num_states()) << " images=" << files << '\n';
        return exit_code(result.trace.converged());
    });
}

int cmd_bench(const BenchSpec& spec, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        std::vector<SolverKind> kinds;
        for (const auto& name : spec.solvers) kinds.push_back(solver_kind(name));
        if (kinds.empty()) kinds.assign(all_solvers().begin(), all_solvers().end());

        std::vector<RunSpec> maps;
        for (const auto& path : spec.maps) {
            RunSpec s = spec.base;
            s.map_path = path;
            s.benchmark_side.reset();
            maps.push_back(s);
        }
        for (std::size_t side : spec.sides) {
            RunSpec s = spec.base;
            s.benchmark_side = side;
            maps.push_back(s);
        }
        if (maps.empty()) throw UsageError("bench needs at least one --map or --sizes entry");

        std::ofstream file;
        if (!spec.out.empty()) file = open_output(spec.out);
        std::ostream& os = spec.out.empty() ? out : file;
        os << "map,states,solver,iterations,total_ms,bellman_ms,pe_ms,pi_ms,mfpt_ms,sort_ms,converged\n";
        bool all_converged = true;
        for (const RunSpec& s : maps) {
            RunSpec checked = s;
            checked.solver = std::string(solver_name(kinds.front()));
            check_spec(checked);
            const LoadedMap map = load_map(s);
            const Mdp mdp = build_model(s, map.grid);
            const SolverConfig cfg = make_config(s);
            for (SolverKind kind : kinds) {
                const SolveResult r = solve(kind, mdp, cfg);
                const ComponentTimes t = r.trace.totals();
                char times[160];
                std::snprintf(times, sizeof times, "%.3f,%.3f,%.3f,%.3f,%.3f,%.3f", r.trace.total_ms(),
                              t.bellman_ms, t.policy_evaluation_ms, t.policy_improvement_ms, t.mfpt_ms,
                              t.sort_ms);
                os << map.name << ',' << mdp.num_states() << ',' << solver_name(kind) << ','
                   << r.trace.iterations() << ',' << times << ',' << (r.trace.converged() ? 1 : 0) << '\n';
                all_converged = all_converged && r.trace.converged();
            }
        }
        return exit_code(all_converged);
    });
}

int cmd_sweep(const SweepSpec& spec, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        RunSpec base = spec.base;
        base.solver = "mfpt-vi";
        check_spec(base);
        if (spec.periods.empty()) throw UsageError("--periods must not be empty");
        if (spec.repeats == 0) throw UsageError("--repeats must be >= 1");
        for (std::size_t p : spec.periods) {
            if (p == 0) throw UsageError("--periods entries must be positive");
        }
        const LoadedMap map = load_map(base);
        const Mdp mdp = build_model(base, map.grid);

        struct Row {
            std::size_t p;
            std::size_t iterations;
            double total_ms;
            std::uint64_t hash;
        };
        std::vector<Row> rows;
        bool all_converged = true;
        for (std::size_t p : spec.periods) {
            RunSpec run = base;
            run.mfpt_period = p;
            const SolverConfig cfg = make_config(run);
            Row row{p, 0, std::numeric_limits<double>::infinity(), 0};
            for (std::size_t rep = 0; rep < spec.repeats; ++rep) {
                const SolveResult r = mfpt_vi(mdp, cfg);
                row.iterations = r.trace.iterations();
                row.total_ms = std::min(row.total_ms, r.trace.total_ms());
                row.hash = policy_hash(greedy_policy(mdp, r.values, spec.tie_tolerance));
                all_converged = all_converged && r.trace.converged();
            }
            rows.push_back(row);
        }
        const auto best = std::min_element(rows.begin(), rows.end(),
                                           [](const Row& a, const Row& b) { return a.total_ms < b.total_ms; });

        std::ofstream file;
        if (!spec.out.empty()) file = open_output(spec.out);
        std::ostream& os = spec.out.empty() ? out : file;
        os << "p,iterations,total_ms,policy_hash,best\n";
        for (auto it = rows.begin(); it != rows.end(); ++it) {
            char ms[32];
            std::snprintf(ms, sizeof ms, "%.3f", it->total_ms);
            os << it->p << ',' << it->iterations << ',' << ms << ',' << hex64(it->hash) << ','
               << (it == best ? 1 : 0) << '\n';
        }
        if (!spec.out.empty()) out << "best_p=" << best->p << '\n';
        return exit_code(all_converged);
    });
}

namespace {

void add_map_options(CLI::App* app, RunSpec& spec) {
    app->add_option("--map", spec.map_path, "ASCII grid map file");
    app->add_option("--grid", spec.benchmark_side, "Use the generated benchmark map of this side");
    app->add_flag("--cube", spec.benchmark_3d, "With --grid, generate the 3D benchmark cube");
}

void add_model_options(CLI::App* app, RunSpec& spec) {
    app->add_option("--gamma", spec.gamma, "Discount factor")->capture_default_str();
    app->add_option("--noise", spec.noise, "Probability of slipping off the intended move")->capture_default_str();
    app->add_option("--goal-reward", spec.goal_reward)->capture_default_str();
    app->add_option("--obstacle-penalty", spec.obstacle_penalty)->capture_default_str();
}

void add_solver_options(CLI::App* app, RunSpec& spec, bool with_solver) {
    if (with_solver) app->add_option("--solver", spec.solver, "vi, vi-ps, mfpt-vi, pi, pi-le or mfpt-pi")->capture_default_str();
    app->add_option("--epsilon", spec.epsilon, "Convergence threshold")->capture_default_str();
    app->add_option("--mfpt-period", spec.mfpt_period, "Iterations between MFPT recomputations");
    app->add_option("--max-iters", spec.max_iterations)->capture_default_str();
    app->add_option("--fast-mfpt", spec.fast_mfpt_tolerance, "Solve MFPT systems iteratively to this residual");
}

void add_output_options(CLI::App* app, RunSpec& spec) {
    app->add_option("--seed", spec.seed, "Rollout seed")->capture_default_str();
    app->add_option("--clip", spec.clip, "Heatmap clip value")->capture_default_str();
    app->add_option("--trace-out", spec.trace_out, "Convergence trace CSV");
    app->add_option("--landscape-out", spec.landscape_out, "Prefix for PGM heatmaps");
    app->add_option("--policy-out", spec.policy_out, "Policy CSV");
    app->add_option("--rollout-out", spec.rollout_out, "Rollout trajectory CSV from the start cell");
    app->add_option("--rollout-steps", spec.rollout_steps)->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Absorbing MDP solvers with MFPT reachability landscapes"};
    app.require_subcommand(1);

    RunSpec solve_spec;
    auto* solve_cmd = app.add_subcommand("solve", "Solve a map and write the convergence trace");
    add_map_options(solve_cmd, solve_spec);
    add_model_options(solve_cmd, solve_spec);
    add_solver_options(solve_cmd, solve_spec, true);
    add_output_options(solve_cmd, solve_spec);

    RunSpec landscape_spec;
    auto* landscape_cmd = app.add_subcommand("landscape", "Write a PGM heatmap per MFPT recomputation");
    add_map_options(landscape_cmd, landscape_spec);
    add_model_options(landscape_cmd, landscape_spec);
    add_solver_options(landscape_cmd, landscape_spec, true);
    add_output_options(landscape_cmd, landscape_spec);

    BenchSpec bench_spec;
    auto* bench_cmd = app.add_subcommand("bench", "Run solvers over maps and print a CSV table");
    bench_cmd->add_option("--map", bench_spec.maps, "Map files")->take_all();
    bench_cmd->add_option("--sizes", bench_spec.sides, "Benchmark map sides")->delimiter(',');
    bench_cmd->add_flag("--cube", bench_spec.base.benchmark_3d, "Generate 3D benchmark cubes for --sizes");
    bench_cmd->add_option("--solvers", bench_spec.solvers, "Solver names")->delimiter(',');
    bench_cmd->add_option("--out", bench_spec.out, "CSV output file");
    add_model_options(bench_cmd, bench_spec.base);
    add_solver_options(bench_cmd, bench_spec.base, false);

    SweepSpec sweep_spec;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run MFPT-VI for several recomputation periods");
    add_map_options(sweep_cmd, sweep_spec.base);
    add_model_options(sweep_cmd, sweep_spec.base);
    add_solver_options(sweep_cmd, sweep_spec.base, false);
    sweep_cmd->add_option("--periods", sweep_spec.periods, "Periods to try")->delimiter(',');
    sweep_cmd->add_option("--repeats", sweep_spec.repeats, "Runs per period; the fastest is kept")->capture_default_str();
    sweep_cmd->add_option("--tie-tol", sweep_spec.tie_tolerance, "Tie tolerance for the policy hash")->capture_default_str();
    sweep_cmd->add_option("--out", sweep_spec.out, "CSV output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : kExitUsage;
    }

    if (*solve_cmd) return cmd_solve(solve_spec, out, err);
    if (*landscape_cmd) return cmd_landscape(landscape_spec, out, err);
    if (*bench_cmd) return cmd_bench(bench_spec, out, err);
    return cmd_sweep(sweep_spec, out, err);
}

}  // namespace mfptmdp::cli
