#include <algorithm>
#include <cmath>

#include "mfptmdp/errors.hpp"
#include "mfptmdp/solvers.hpp"
#include "timing.hpp"

namespace mfptmdp {

namespace {

Policy starting_policy(const Mdp& mdp, const SolverConfig& cfg) {
    if (!cfg.initial_policy) return Policy(mdp.num_states());
    if (cfg.initial_policy->size() != mdp.num_states()) {
        throw DimensionError("initial policy has the wrong length");
    }
    return *cfg.initial_policy;
}

// Keeps the current action unless another one is better by more than a
// rounding-level margin; exact ties otherwise flip between rounds.
Policy improve_policy(const Mdp& mdp, const ValueFunction& values, const Policy& current) {
    Policy next = current;
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        const StateId id = state_id(s);
        const Backup best = bellman_backup(mdp, values, id);
        const double kept = action_value(mdp, values.values(), id, current[id]);
        if (best.value > kept + 1e-9 * std::max(1.0, std::abs(kept))) next[id] = best.best_action;
    }
    return next;
}

// Evaluation error bound implied by a sweep residual of epsilon.
double evaluation_tolerance(const Mdp& mdp, const SolverConfig& cfg) {
    const double gamma = mdp.discount();
    return gamma < 1.0 ? cfg.epsilon * std::max(1.0, gamma / (1.0 - gamma)) : cfg.epsilon;
}

// v dominates previous up to tol and beats it somewhere by more than tol.
bool strictly_improves(const ValueFunction& v, const ValueFunction& previous, double tol) {
    bool gained = false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double diff = v.values()[i] - previous.values()[i];
        if (diff < -tol) return false;
        if (diff > tol) gained = true;
    }
    return gained;
}

SolveResult classic_policy_iteration(const Mdp& mdp, const SolverConfig& cfg, bool linear) {
    cfg.validate();
    const auto started = detail::Clock::now();

    SolveResult result;
    result.trace.solver = linear ? SolverKind::PolicyIterationLinear : SolverKind::PolicyIteration;
    Policy current = starting_policy(mdp, cfg);
    ValueFunction values = cfg.initial_values.value_or(ValueFunction(mdp.num_states()));

    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        IterationRecord record;
        record.iteration = it + 1;
        {
            detail::ScopedTimer timer(record.components.policy_evaluation_ms);
            values = linear ? policy_evaluation_linear(mdp, current)
                            : policy_evaluation_iterative(mdp, current, cfg, &values).values;
        }
        Policy improved;
        {
            detail::ScopedTimer timer(record.components.policy_improvement_ms);
            improved = improve_policy(mdp, values, current);
        }
        const std::size_t mismatch = policy_mismatch(current, improved);
        record.delta = static_cast<double>(mismatch);
        record.cumulative_ms = detail::elapsed_ms(started);
        result.trace.records.push_back(record);
        if (mismatch == 0) {
            result.trace.status = TraceStatus::Converged;
            break;
        }
        current = std::move(improved);
    }

    if (!result.trace.converged()) {
        values = linear ? policy_evaluation_linear(mdp, current)
                        : policy_evaluation_iterative(mdp, current, cfg, &values).values;
    }
    result.values = std::move(values);
    result.policy = std::move(current);
    return result;
}

}  // namespace

SolveResult policy_iteration(const Mdp& mdp, const SolverConfig& cfg) {
    return classic_policy_iteration(mdp, cfg, false);
}

SolveResult policy_iteration_le(const Mdp& mdp, const SolverConfig& cfg) {
    return classic_policy_iteration(mdp, cfg, true);
}

// Each round evaluates the carried policy, improves it greedily, and then
// replaces it with the MFPT-greedy policy of the improved policy's chain.
// The run stops once the evaluated policy is its own greedy improvement.
// MFPT guidance is dropped for the rest of the run as soon as a guided round
// fails to strictly improve the values, so the loop always ends in plain
// policy iteration at worst.
SolveResult mfpt_pi(const Mdp& mdp, const SolverConfig& cfg) {
    cfg.validate();
    if (mdp.goal_states().empty()) throw InvalidModel("MFPT-PI needs at least one goal state");
    const auto started = detail::Clock::now();
    const std::size_t period = cfg.mfpt_period.value_or(1);
    const double tol = evaluation_tolerance(mdp, cfg);

    SolveResult result;
    result.trace.solver = SolverKind::MfptPolicyIteration;
    Policy current = starting_policy(mdp, cfg);
    ValueFunction values = cfg.initial_values.value_or(ValueFunction(mdp.num_states()));
    ValueFunction previous_values;
    std::optional<ReachabilityLandscape> landscape;
    bool guided = true;

    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        IterationRecord record;
        record.iteration = it + 1;
        ComponentTimes& t = record.components;
        {
            detail::ScopedTimer timer(t.policy_evaluation_ms);
            values = policy_evaluation_iterative(mdp, current, cfg, &values).values;
        }
        Policy improved;
        {
            detail::ScopedTimer timer(t.policy_improvement_ms);
            improved = improve_policy(mdp, values, current);
        }

        Policy next = improved;
        if (improved != current && guided) {
            if (it > 0 && !strictly_improves(values, previous_values, tol)) {
                guided = false;
            } else {
                if (!landscape || period == 1 || (period != kNeverRecompute && it % period == 0)) {
                    {
                        detail::ScopedTimer timer(t.mfpt_ms);
                        landscape = policy_landscape(mdp, improved, cfg.mfpt_accuracy);
                    }
                    if (cfg.on_landscape) cfg.on_landscape(record.iteration, *landscape);
                }
                detail::ScopedTimer timer(t.policy_improvement_ms);
                next = mfpt_policy_update(mdp, *landscape);
            }
        }

        const std::size_t mismatch = policy_mismatch(current, next);
        record.delta = static_cast<double>(mismatch);
        record.cumulative_ms = detail::elapsed_ms(started);
        result.trace.records.push_back(record);
        if (improved == current) {
            result.trace.status = TraceStatus::Converged;
            break;
        }
        previous_values = values;
        current = std::move(next);
    }

    if (!result.trace.converged()) {
        values = policy_evaluation_iterative(mdp, current, cfg, &values).values;
    }
    result.values = std::move(values);
    result.policy = std::move(current);
    return result;
}

}  // namespace mfptmdp
