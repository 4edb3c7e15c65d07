#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfptmdp/linsolve.hpp"
#include "mfptmdp/mdp.hpp"
#include "mfptmdp/types.hpp"

namespace mfptmdp {

/// Stand-in for an infinite mean first passage time.
inline constexpr double kMfptSentinel = 1e9;

/// How the first-passage system is solved. The ordering built on top of the
/// landscape tolerates a coarse answer, so a Gauss-Seidel path is offered.
struct MfptAccuracy {
    enum class Mode { Direct, Fast };
    Mode mode = Mode::Direct;
    double tolerance = 1e-3;
    std::size_t max_sweeps = 100000;

    static MfptAccuracy direct() { return {}; }
    static MfptAccuracy fast(double tol = 1e-3) { return {Mode::Fast, tol, 100000}; }
};

/// Expected number of transitions from every state to the goal set under a
/// fixed chain. Goal entries are 0; states that do not reach the goal almost
/// surely hold kMfptSentinel. Solved values are kept even when they are huge.
struct ReachabilityLandscape {
    std::vector<double> mfpt;
    std::vector<StateId> goals;
    double sentinel = kMfptSentinel;

    std::size_t size() const noexcept { return mfpt.size(); }
    double operator[](StateId s) const { return mfpt[index(s)]; }
    bool is_sentinel(StateId s) const { return mfpt[index(s)] == sentinel; }
};

/// First-passage system over the non-goal states:
/// (P̃ − I)·μ = −1, where P̃ is the chain with the goal row and column removed.
struct MfptSystem {
    SparseMatrix matrix;
    DenseVector rhs;
    /// Compressed row i corresponds to states[i].
    std::vector<StateId> states;
};

MfptSystem build_mfpt_system(const MarkovChain& chain, StateId goal);

ReachabilityLandscape compute_mfpt(const MarkovChain& chain, StateId goal,
                                   const MfptAccuracy& accuracy = MfptAccuracy::direct());

/// One landscape per goal, combined by taking the per-state minimum.
ReachabilityLandscape multi_goal_landscape(const MarkovChain& chain, std::span<const StateId> goals,
                                           const MfptAccuracy& accuracy = MfptAccuracy::direct());

/// Ascending μ, ties by StateId, sentinel states last.
std::vector<StateId> rank_states_by_mfpt(const ReachabilityLandscape& landscape);

/// Per-state min(μ, clip), sentinel mapped to clip. For visualisation only.
std::vector<double> clip_landscape(const ReachabilityLandscape& landscape, double clip);

}  // namespace mfptmdp
