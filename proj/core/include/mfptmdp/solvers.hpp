#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mfptmdp/mdp.hpp"
#include "mfptmdp/mfpt.hpp"
#include "mfptmdp/types.hpp"

namespace mfptmdp {

enum class SolverKind {
    ValueIteration,
    PrioritizedSweeping,
    MfptValueIteration,
    PolicyIteration,
    PolicyIterationLinear,
    MfptPolicyIteration,
};

/// CLI spelling: vi, vi-ps, mfpt-vi, pi, pi-le, mfpt-pi.
std::string_view solver_name(SolverKind kind) noexcept;
std::optional<SolverKind> parse_solver_kind(std::string_view name) noexcept;
std::span<const SolverKind> all_solvers() noexcept;
bool is_policy_iteration_family(SolverKind kind) noexcept;

/// mfpt_period value meaning "compute the landscape once, then keep its order".
inline constexpr std::size_t kNeverRecompute = std::numeric_limits<std::size_t>::max();

struct SolverConfig {
    /// Stop when Δ_S ≤ epsilon (value change for VI-family, and the sweep
    /// tolerance of iterative policy evaluation).
    double epsilon = 1e-6;
    /// Iterations between landscape recomputations. Unset means 3 for
    /// MFPT-VI and 1 for MFPT-PI.
    std::optional<std::size_t> mfpt_period;
    MfptAccuracy mfpt_accuracy = MfptAccuracy::direct();
    std::size_t max_iterations = 1000;
    std::size_t max_evaluation_sweeps = 1000000;
    std::optional<ValueFunction> initial_values;
    /// Starting policy for the PI family; all action 0 when unset.
    std::optional<Policy> initial_policy;
    /// Called with the 1-based iteration index each time a landscape is computed.
    std::function<void(std::size_t, const ReachabilityLandscape&)> on_landscape;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

struct ComponentTimes {
    double bellman_ms = 0.0;
    double policy_evaluation_ms = 0.0;
    double policy_improvement_ms = 0.0;
    double mfpt_ms = 0.0;
    double sort_ms = 0.0;

    double total() const noexcept {
        return bellman_ms + policy_evaluation_ms + policy_improvement_ms + mfpt_ms + sort_ms;
    }
    ComponentTimes& operator+=(const ComponentTimes& other) noexcept;
};

struct IterationRecord {
    std::size_t iteration = 0;
    /// Max value change (VI-family) or policy mismatch count (PI-family).
    double delta = 0.0;
    double cumulative_ms = 0.0;
    ComponentTimes components;
};

enum class TraceStatus { Converged, IterationCapped };

struct ConvergenceTrace {
    SolverKind solver = SolverKind::ValueIteration;
    std::vector<IterationRecord> records;
    TraceStatus status = TraceStatus::IterationCapped;

    std::size_t iterations() const noexcept { return records.size(); }
    bool converged() const noexcept { return status == TraceStatus::Converged; }
    double total_ms() const noexcept { return records.empty() ? 0.0 : records.back().cumulative_ms; }
    ComponentTimes totals() const noexcept;
};

struct SolveResult {
    ValueFunction values;
    Policy policy;
    ConvergenceTrace trace;
};

struct PolicyEvaluation {
    ValueFunction values;
    std::size_t sweeps = 0;
    bool converged = false;
};

/// Synchronous fixed-policy sweeps V ← r^π + γ·P^π·V until the max change
/// is ≤ cfg.epsilon. Starts from `start` when given, zeros otherwise.
PolicyEvaluation policy_evaluation_iterative(const Mdp& mdp, const Policy& policy,
                                             const SolverConfig& cfg,
                                             const ValueFunction* start = nullptr);

/// Solves (I − γ·P^π)·V = r^π directly. Throws SingularMatrix.
ValueFunction policy_evaluation_linear(const Mdp& mdp, const Policy& policy);

/// π'(s) = argmin_a Σ_{s'} T_a(s,s')·μ(s'); ties and goal states take the
/// lowest ActionId.
Policy mfpt_policy_update(const Mdp& mdp, const ReachabilityLandscape& landscape);

/// Landscape of the chain induced by `policy`, over all goals of the model.
ReachabilityLandscape policy_landscape(const Mdp& mdp, const Policy& policy,
                                       const MfptAccuracy& accuracy);

SolveResult value_iteration(const Mdp& mdp, const SolverConfig& cfg);
SolveResult vi_prioritized_sweeping(const Mdp& mdp, const SolverConfig& cfg);
SolveResult mfpt_vi(const Mdp& mdp, const SolverConfig& cfg);
SolveResult policy_iteration(const Mdp& mdp, const SolverConfig& cfg);
SolveResult policy_iteration_le(const Mdp& mdp, const SolverConfig& cfg);
SolveResult mfpt_pi(const Mdp& mdp, const SolverConfig& cfg);

SolveResult solve(SolverKind kind, const Mdp& mdp, const SolverConfig& cfg);

}  // namespace mfptmdp
