#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <mfptmdp/gridworld.hpp>
#include <mfptmdp/solvers.hpp>

namespace mfptmdp::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitConverged = 0;
inline constexpr int kExitNotConverged = 1;
inline constexpr int kExitUsage = 2;

struct RunSpec {
    std::string map_path;
    /// Used instead of map_path when set: generated benchmark map of this side.
    std::optional<std::size_t> benchmark_side;
    bool benchmark_3d = false;

    std::string solver = "mfpt-vi";
    double gamma = 0.95;
    double epsilon = 1e-6;
    std::optional<std::size_t> mfpt_period;
    std::size_t max_iterations = 1000;
    std::optional<double> fast_mfpt_tolerance;

    double noise = 0.1;
    double goal_reward = 100.0;
    double obstacle_penalty = -1.0;

    std::uint64_t seed = 0;
    double clip = 100.0;
    std::size_t rollout_steps = 10000;

    std::string trace_out;
    std::string landscape_out;
    std::string policy_out;
    std::string rollout_out;
};

struct BenchSpec {
    RunSpec base;
    std::vector<std::string> maps;
    std::vector<std::size_t> sides;
    /// Empty means all six.
    std::vector<std::string> solvers;
    std::string out;
};

struct SweepSpec {
    RunSpec base;
    std::vector<std::size_t> periods{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::size_t repeats = 1;
    /// Actions this close to the best count as tied when hashing the policy.
    double tie_tolerance = 1e-6;
    std::string out;
};

struct LoadedMap {
    std::string name;
    GridMap grid;
};

LoadedMap load_map(const RunSpec& spec);
Mdp build_model(const RunSpec& spec, const GridMap& grid);
SolverConfig make_config(const RunSpec& spec);

int cmd_solve(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_landscape(const RunSpec& spec, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchSpec& spec, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepSpec& spec, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mfptmdp::cli
