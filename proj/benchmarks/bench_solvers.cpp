#include <benchmark/benchmark.h>

#include <mfptmdp/gridworld.hpp>
#include <mfptmdp/solvers.hpp>

using namespace mfptmdp;

namespace {

Mdp grid_model(std::size_t side) {
    return build_grid_mdp(benchmark_grid(side), NoiseModel{0.1}, GridRewards{}, 0.95);
}

void run_solver(benchmark::State& state, SolverKind kind) {
    const Mdp m = grid_model(static_cast<std::size_t>(state.range(0)));
    SolverConfig cfg;
    cfg.epsilon = 0.1;
    std::size_t iterations = 0;
    for (auto _ : state) {
        SolveResult r = solve(kind, m, cfg);
        iterations = r.trace.iterations();
        benchmark::DoNotOptimize(r.values);
    }
    state.counters["iterations"] = static_cast<double>(iterations);
    state.counters["states"] = static_cast<double>(m.num_states());
}

void BM_VI(benchmark::State& s) { run_solver(s, SolverKind::ValueIteration); }
void BM_VIPS(benchmark::State& s) { run_solver(s, SolverKind::PrioritizedSweeping); }
void BM_MfptVI(benchmark::State& s) { run_solver(s, SolverKind::MfptValueIteration); }
void BM_PI(benchmark::State& s) { run_solver(s, SolverKind::PolicyIteration); }
void BM_PILE(benchmark::State& s) { run_solver(s, SolverKind::PolicyIterationLinear); }
void BM_MfptPI(benchmark::State& s) { run_solver(s, SolverKind::MfptPolicyIteration); }

void BM_BellmanSweep(benchmark::State& state) {
    const Mdp m = grid_model(static_cast<std::size_t>(state.range(0)));
    ValueFunction v(m.num_states(), 0.0);
    for (auto _ : state) {
        v = bellman_operator(m, v);
        benchmark::DoNotOptimize(v);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.num_states()));
}

}  // namespace

BENCHMARK(BM_VI)->Arg(10)->Arg(30)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VIPS)->Arg(10)->Arg(30)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MfptVI)->Arg(10)->Arg(30)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PI)->Arg(10)->Arg(30)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PILE)->Arg(10)->Arg(30)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MfptPI)->Arg(10)->Arg(30)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BellmanSweep)->Arg(50)->Arg(100);
