#include "mfptmdp/solvers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mfptmdp/errors.hpp"

namespace mfptmdp {

namespace {

constexpr std::array<SolverKind, 6> kAllSolvers{
    SolverKind::ValueIteration,  SolverKind::PrioritizedSweeping,
    SolverKind::MfptValueIteration, SolverKind::PolicyIteration,
    SolverKind::PolicyIterationLinear, SolverKind::MfptPolicyIteration,
};

void check_policy(const Mdp& mdp, const Policy& policy) {
    if (policy.size() != mdp.num_states()) {
        throw DimensionError("policy covers " + std::to_string(policy.size()) +
                             " states, model has " + std::to_string(mdp.num_states()));
    }
    for (ActionId a : policy.actions()) {
        if (index(a) >= mdp.num_actions()) {
            throw DimensionError("policy action " + std::to_string(index(a)) + " out of range");
        }
    }
}

}  // namespace

std::string_view solver_name(SolverKind kind) noexcept {
    switch (kind) {
        case SolverKind::ValueIteration: return "vi";
        case SolverKind::PrioritizedSweeping: return "vi-ps";
        case SolverKind::MfptValueIteration: return "mfpt-vi";
        case SolverKind::PolicyIteration: return "pi";
        case SolverKind::PolicyIterationLinear: return "pi-le";
        case SolverKind::MfptPolicyIteration: return "mfpt-pi";
    }
    return "unknown";
}

std::optional<SolverKind> parse_solver_kind(std::string_view name) noexcept {
    for (SolverKind kind : kAllSolvers) {
        if (solver_name(kind) == name) return kind;
    }
    return std::nullopt;
}

std::span<const SolverKind> all_solvers() noexcept { return kAllSolvers; }

bool is_policy_iteration_family(SolverKind kind) noexcept {
    return kind == SolverKind::PolicyIteration || kind == SolverKind::PolicyIterationLinear ||
           kind == SolverKind::MfptPolicyIteration;
}

void SolverConfig::validate() const {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (mfpt_period && *mfpt_period == 0) throw std::invalid_argument("mfpt_period must be >= 1");
    if (max_iterations == 0) throw std::invalid_argument("max_iterations must be >= 1");
    if (max_evaluation_sweeps == 0) throw std::invalid_argument("max_evaluation_sweeps must be >= 1");
    if (mfpt_accuracy.mode == MfptAccuracy::Mode::Fast && !(mfpt_accuracy.tolerance > 0.0)) {
        throw std::invalid_argument("fast MFPT tolerance must be positive");
    }
}

ComponentTimes& ComponentTimes::operator+=(const ComponentTimes& other) noexcept {
    bellman_ms += other.bellman_ms;
    policy_evaluation_ms += other.policy_evaluation_ms;
    policy_improvement_ms += other.policy_improvement_ms;
    mfpt_ms += other.mfpt_ms;
    sort_ms += other.sort_ms;
    return *this;
}

ComponentTimes ConvergenceTrace::totals() const noexcept {
    ComponentTimes sum;
    for (const auto& r : records) sum += r.components;
    return sum;
}

PolicyEvaluation policy_evaluation_iterative(const Mdp& mdp, const Policy& policy,
                                             const SolverConfig& cfg, const ValueFunction* start) {
    check_policy(mdp, policy);
    const std::size_t n = mdp.num_states();
    PolicyEvaluation out;
    out.values = start ? *start : ValueFunction(n);
    if (out.values.size() != n) throw DimensionError("start values have the wrong length");

    ValueFunction next(n);
    for (out.sweeps = 1; out.sweeps <= cfg.max_evaluation_sweeps; ++out.sweeps) {
        double change = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const StateId id = state_id(s);
            const double v = action_value(mdp, out.values.values(), id, policy[id]);
            change = std::max(change, std::abs(v - out.values[id]));
            next[id] = v;
        }
        std::swap(out.values, next);
        if (change <= cfg.epsilon) {
            out.converged = true;
            return out;
        }
    }
    out.sweeps = cfg.max_evaluation_sweeps;
    return out;
}

ValueFunction policy_evaluation_linear(const Mdp& mdp, const Policy& policy) {
    check_policy(mdp, policy);
    const std::size_t n = mdp.num_states();
    const double gamma = mdp.discount();
    std::vector<Triplet> entries;
    entries.reserve(n * 4);
    DenseVector rhs(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        entries.push_back({s, s, 1.0});
        for (const auto& t : mdp.transitions(state_id(s), policy[state_id(s)])) {
            rhs[s] += t.probability * t.reward;
            entries.push_back({s, index(t.successor), -gamma * t.probability});
        }
    }
    const auto a = SparseMatrix::from_triplets(n, n, std::move(entries));
    return ValueFunction(solve(a, rhs));
}

Policy mfpt_policy_update(const Mdp& mdp, const ReachabilityLandscape& landscape) {
    if (landscape.size() != mdp.num_states()) {
        throw DimensionError("landscape covers " + std::to_string(landscape.size()) +
                             " states, model has " + std::to_string(mdp.num_states()));
    }
    Policy policy(mdp.num_states());
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        const StateId id = state_id(s);
        if (mdp.is_goal(id)) continue;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
            double expected = 0.0;
            for (const auto& t : mdp.transitions(id, action_id(a))) {
                expected += t.probability * landscape[t.successor];
            }
            if (expected < best) {
                best = expected;
                policy[id] = action_id(a);
            }
        }
    }
    return policy;
}

ReachabilityLandscape policy_landscape(const Mdp& mdp, const Policy& policy,
                                       const MfptAccuracy& accuracy) {
    const MarkovChain chain = induced_chain(mdp, policy);
    const auto goals = mdp.goal_states();
    if (goals.size() == 1) return compute_mfpt(chain, goals.front(), accuracy);
    return multi_goal_landscape(chain, goals, accuracy);
}

SolveResult solve(SolverKind kind, const Mdp& mdp, const SolverConfig& cfg) {
    switch (kind) {
        case SolverKind::ValueIteration: return value_iteration(mdp, cfg);
        case SolverKind::PrioritizedSweeping: return vi_prioritized_sweeping(mdp, cfg);
        case SolverKind::MfptValueIteration: return mfpt_vi(mdp, cfg);
        case SolverKind::PolicyIteration: return policy_iteration(mdp, cfg);
        case SolverKind::PolicyIterationLinear: return policy_iteration_le(mdp, cfg);
        case SolverKind::MfptPolicyIteration: return mfpt_pi(mdp, cfg);
    }
    throw std::invalid_argument("unknown solver kind");
}

}  // namespace mfptmdp
