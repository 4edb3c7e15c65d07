// In-place (Gauss-Seidel) value iteration with three sweep orderings:
// index order, descending previous |ΔV|, and ascending MFPT to the goal.

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mfptmdp/errors.hpp"
#include "mfptmdp/solvers.hpp"
#include "timing.hpp"

namespace mfptmdp {

namespace {

ValueFunction starting_values(const Mdp& mdp, const SolverConfig& cfg) {
    if (!cfg.initial_values) return ValueFunction(mdp.num_states());
    if (cfg.initial_values->size() != mdp.num_states()) {
        throw DimensionError("initial values have the wrong length");
    }
    return *cfg.initial_values;
}

SolveResult sweep_solver(const Mdp& mdp, const SolverConfig& cfg, SolverKind kind) {
    cfg.validate();
    const auto started = detail::Clock::now();
    const std::size_t n = mdp.num_states();
    const std::size_t period = cfg.mfpt_period.value_or(3);

    SolveResult result;
    result.trace.solver = kind;
    result.values = starting_values(mdp, cfg);
    ValueFunction& values = result.values;

    std::vector<StateId> order(n);
    for (std::size_t s = 0; s < n; ++s) order[s] = state_id(s);
    std::vector<double> change(n, 0.0);

    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        IterationRecord record;
        record.iteration = it + 1;
        ComponentTimes& t = record.components;

        if (kind == SolverKind::PrioritizedSweeping && it > 0) {
            detail::ScopedTimer timer(t.sort_ms);
            std::stable_sort(order.begin(), order.end(), [&](StateId a, StateId b) {
                const double ca = change[index(a)];
                const double cb = change[index(b)];
                return ca != cb ? ca > cb : a < b;
            });
        }

        if (kind == SolverKind::MfptValueIteration && (it == 0 || (period != kNeverRecompute && it % period == 0))) {
            ReachabilityLandscape landscape;
            {
                detail::ScopedTimer timer(t.mfpt_ms);
                const Policy current = greedy_policy(mdp, values);
                landscape = policy_landscape(mdp, current, cfg.mfpt_accuracy);
            }
            if (cfg.on_landscape) cfg.on_landscape(record.iteration, landscape);
            detail::ScopedTimer timer(t.sort_ms);
            order = rank_states_by_mfpt(landscape);
        }

        double delta = 0.0;
        {
            detail::ScopedTimer timer(t.bellman_ms);
            for (StateId s : order) {
                const double updated = bellman_backup(mdp, values, s).value;
                const double d = std::abs(updated - values[s]);
                change[index(s)] = d;
                delta = std::max(delta, d);
                values[s] = updated;
            }
        }
        record.delta = delta;
        record.cumulative_ms = detail::elapsed_ms(started);
        result.trace.records.push_back(record);
        if (delta <= cfg.epsilon) {
            result.trace.status = TraceStatus::Converged;
            break;
        }
    }

    result.policy = greedy_policy(mdp, values);
    return result;
}

}  // namespace

SolveResult value_iteration(const Mdp& mdp, const SolverConfig& cfg) {
    return sweep_solver(mdp, cfg, SolverKind::ValueIteration);
}

SolveResult vi_prioritized_sweeping(const Mdp& mdp, const SolverConfig& cfg) {
    return sweep_solver(mdp, cfg, SolverKind::PrioritizedSweeping);
}

SolveResult mfpt_vi(const Mdp& mdp, const SolverConfig& cfg) {
    if (mdp.goal_states().empty()) throw InvalidModel("MFPT-VI needs at least one goal state");
    return sweep_solver(mdp, cfg, SolverKind::MfptValueIteration);
}

}  // namespace mfptmdp
