#include "mfptmdp/mfpt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mfptmdp/errors.hpp"

namespace mfptmdp {

namespace {

std::vector<std::vector<std::size_t>> predecessor_lists(const MarkovChain& chain) {
    const std::size_t n = chain.num_states();
    std::vector<std::vector<std::size_t>> preds(n);
    for (std::size_t s = 0; s < n; ++s) {
        const auto cols = chain.successors(state_id(s));
        const auto probs = chain.probabilities(state_id(s));
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (probs[k] > 0.0 && cols[k] != s) preds[cols[k]].push_back(s);
        }
    }
    return preds;
}

// States that hit `goal` with probability one. A state qualifies iff it can
// reach the goal and cannot reach any state that cannot, with paths cut at
// the goal itself.
std::vector<unsigned char> almost_sure_states(const MarkovChain& chain, StateId goal) {
    const std::size_t n = chain.num_states();
    const auto preds = predecessor_lists(chain);
    const std::size_t g = index(goal);

    std::vector<unsigned char> reaches(n, 0);
    std::vector<std::size_t> stack{g};
    reaches[g] = 1;
    while (!stack.empty()) {
        const std::size_t s = stack.back();
        stack.pop_back();
        for (std::size_t p : preds[s]) {
            if (!reaches[p]) {
                reaches[p] = 1;
                stack.push_back(p);
            }
        }
    }

    std::vector<unsigned char> tainted(n, 0);
    for (std::size_t s = 0; s < n; ++s) {
        if (!reaches[s]) {
            tainted[s] = 1;
            stack.push_back(s);
        }
    }
    while (!stack.empty()) {
        const std::size_t s = stack.back();
        stack.pop_back();
        for (std::size_t p : preds[s]) {
            if (p != g && !tainted[p]) {
                tainted[p] = 1;
                stack.push_back(p);
            }
        }
    }

    std::vector<unsigned char> good(n, 0);
    for (std::size_t s = 0; s < n; ++s) good[s] = reaches[s] && !tainted[s];
    return good;
}

MfptSystem build_restricted_system(const MarkovChain& chain, StateId goal,
                                   const std::vector<unsigned char>& include) {
    const std::size_t n = chain.num_states();
    std::vector<std::size_t> compressed(n, n);
    MfptSystem sys;
    for (std::size_t s = 0; s < n; ++s) {
        if (s != index(goal) && include[s]) {
            compressed[s] = sys.states.size();
            sys.states.push_back(state_id(s));
        }
    }
    const std::size_t m = sys.states.size();
    std::vector<Triplet> entries;
    entries.reserve(m * 4);
    for (std::size_t row = 0; row < m; ++row) {
        const StateId s = sys.states[row];
        const auto cols = chain.successors(s);
        const auto probs = chain.probabilities(s);
        entries.push_back({row, row, -1.0});
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const std::size_t col = compressed[cols[k]];
            if (col < m) entries.push_back({row, col, probs[k]});
        }
    }
    sys.matrix = SparseMatrix::from_triplets(m, m, std::move(entries));
    sys.rhs.assign(m, -1.0);
    return sys;
}

void check_goal(const MarkovChain& chain, StateId goal) {
    if (index(goal) >= chain.num_states()) {
        throw DimensionError("goal state " + std::to_string(index(goal)) + " outside chain of " +
                             std::to_string(chain.num_states()) + " states");
    }
}

}  // namespace

MfptSystem build_mfpt_system(const MarkovChain& chain, StateId goal) {
    check_goal(chain, goal);
    return build_restricted_system(chain, goal,
                                   std::vector<unsigned char>(chain.num_states(), 1));
}

ReachabilityLandscape compute_mfpt(const MarkovChain& chain, StateId goal,
                                   const MfptAccuracy& accuracy) {
    check_goal(chain, goal);
    ReachabilityLandscape landscape;
    landscape.goals = {goal};
    landscape.mfpt.assign(chain.num_states(), kMfptSentinel);
    landscape.mfpt[index(goal)] = 0.0;

    const MfptSystem sys = build_restricted_system(chain, goal, almost_sure_states(chain, goal));
    if (sys.states.empty()) return landscape;

    DenseVector mu;
    try {
        if (accuracy.mode == MfptAccuracy::Mode::Fast) {
            try {
                mu = solve_iterative(sys.matrix, sys.rhs, accuracy.tolerance, accuracy.max_sweeps);
            } catch (const NoConvergence&) {
                mu = solve(sys.matrix, sys.rhs);
            } catch (const ZeroDiagonal&) {
                mu = solve(sys.matrix, sys.rhs);
            }
        } else {
            mu = solve(sys.matrix, sys.rhs);
        }
    } catch (const SingularMatrix&) {
        return landscape;
    }

    for (std::size_t i = 0; i < sys.states.size(); ++i) {
        const double v = mu[i];
        if (std::isfinite(v) && v >= 0.0) landscape.mfpt[index(sys.states[i])] = v;
    }
    return landscape;
}

ReachabilityLandscape multi_goal_landscape(const MarkovChain& chain, std::span<const StateId> goals,
                                           const MfptAccuracy& accuracy) {
    if (goals.empty()) throw std::invalid_argument("multi_goal_landscape: empty goal set");
    ReachabilityLandscape combined;
    combined.goals.assign(goals.begin(), goals.end());
    std::sort(combined.goals.begin(), combined.goals.end());
    combined.mfpt.assign(chain.num_states(), kMfptSentinel);
    for (StateId g : combined.goals) {
        const ReachabilityLandscape single = compute_mfpt(chain, g, accuracy);
        for (std::size_t s = 0; s < combined.mfpt.size(); ++s) {
            combined.mfpt[s] = std::min(combined.mfpt[s], single.mfpt[s]);
        }
    }
    return combined;
}

std::vector<StateId> rank_states_by_mfpt(const ReachabilityLandscape& landscape) {
    std::vector<std::size_t> order(landscape.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& mu = landscape.mfpt;
    const double sentinel = landscape.sentinel;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const bool sa = mu[a] == sentinel;
        const bool sb = mu[b] == sentinel;
        if (sa != sb) return sb;
        if (!sa && mu[a] != mu[b]) return mu[a] < mu[b];
        return a < b;
    });
    std::vector<StateId> ranked;
    ranked.reserve(order.size());
    for (std::size_t s : order) ranked.push_back(state_id(s));
    return ranked;
}

std::vector<double> clip_landscape(const ReachabilityLandscape& landscape, double clip) {
    if (!(clip > 0.0)) throw std::invalid_argument("clip_landscape: clip must be positive");
    std::vector<double> out(landscape.size());
    for (std::size_t s = 0; s < out.size(); ++s) {
        const double mu = landscape.mfpt[s];
        out[s] = mu == landscape.sentinel ? clip : std::min(mu, clip);
    }
    return out;
}

}  // namespace mfptmdp
