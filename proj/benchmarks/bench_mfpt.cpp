#include <benchmark/benchmark.h>

#include <mfptmdp/gridworld.hpp>
#include <mfptmdp/linsolve.hpp>
#include <mfptmdp/mfpt.hpp>
#include <mfptmdp/solvers.hpp>

using namespace mfptmdp;

namespace {

MarkovChain grid_chain(std::size_t side) {
    const Mdp m = build_grid_mdp(benchmark_grid(side), NoiseModel{0.1}, GridRewards{}, 0.95);
    SolverConfig cfg;
    cfg.epsilon = 0.1;
    return induced_chain(m, value_iteration(m, cfg).policy);
}

StateId goal_of(std::size_t side) { return benchmark_grid(side).goals().front(); }

void BM_MfptDirect(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const MarkovChain chain = grid_chain(side);
    const StateId goal = goal_of(side);
    for (auto _ : state) benchmark::DoNotOptimize(compute_mfpt(chain, goal, MfptAccuracy::direct()));
}

void BM_MfptFast(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const MarkovChain chain = grid_chain(side);
    const StateId goal = goal_of(side);
    for (auto _ : state) benchmark::DoNotOptimize(compute_mfpt(chain, goal, MfptAccuracy::fast(1e-6)));
}

void BM_RankStates(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const ReachabilityLandscape l = compute_mfpt(grid_chain(side), goal_of(side));
    for (auto _ : state) benchmark::DoNotOptimize(rank_states_by_mfpt(l));
}

void BM_SparseSolve(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const MfptSystem sys = build_mfpt_system(grid_chain(side), goal_of(side));
    for (auto _ : state) benchmark::DoNotOptimize(solve(sys.matrix, sys.rhs));
}

}  // namespace

BENCHMARK(BM_MfptDirect)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MfptFast)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RankStates)->Arg(20)->Arg(50);
BENCHMARK(BM_SparseSolve)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
