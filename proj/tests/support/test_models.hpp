#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <mfptmdp/gridworld.hpp>
#include <mfptmdp/linsolve.hpp>
#include <mfptmdp/mdp.hpp>
#include <mfptmdp/mfpt.hpp>
#include <mfptmdp/types.hpp>

namespace mfptmdp::testing {

using Dense = std::vector<std::vector<double>>;

// s0 <-> s1 -> g along a line. Action 0 = left, 1 = right; +10 for entering g.
inline Mdp chain3(double gamma = 0.9) {
    MdpBuilder b(3, 2, gamma);
    const StateId s0 = state_id(0), s1 = state_id(1), g = state_id(2);
    const ActionId left = action_id(0), right = action_id(1);
    b.add(s0, left, s0, 1.0);
    b.add(s0, right, s1, 1.0);
    b.add(s1, left, s0, 1.0);
    b.add(s1, right, g, 1.0, 10.0);
    b.add_goal(g);
    return b.build();
}

inline std::vector<double> random_probabilities(std::mt19937_64& rng, std::size_t k) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::vector<double> p(k);
    double sum = 0.0;
    for (double& x : p) sum += (x = u(rng));
    for (double& x : p) x /= sum;
    return p;
}

struct RandomMdpShape {
    std::size_t min_states = 2;
    std::size_t max_states = 100;
    std::size_t max_actions = 5;
    std::size_t max_successors = 4;
    std::size_t goals = 1;
    double gamma = 0.9;
};

// Every state gets, under its first action, an edge to a state that comes
// earlier in a random ordering whose head is a goal, so the model is absorbing.
inline Mdp random_absorbing_mdp(std::mt19937_64& rng, const RandomMdpShape& shape = {}) {
    std::uniform_int_distribution<std::size_t> pick_n(std::max(shape.min_states, shape.goals + 1),
                                                      shape.max_states);
    std::uniform_int_distribution<std::size_t> pick_m(1, shape.max_actions);
    const std::size_t n = pick_n(rng);
    const std::size_t m = pick_m(rng);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    MdpBuilder b(n, m, shape.gamma);
    for (std::size_t k = 0; k < shape.goals; ++k) b.add_goal(state_id(order[k]));
    std::uniform_int_distribution<std::size_t> any(0, n - 1);
    std::uniform_int_distribution<std::size_t> succ_count(1, shape.max_successors);
    std::uniform_real_distribution<double> reward(-1.0, 1.0);
    for (std::size_t pos = shape.goals; pos < n; ++pos) {
        const std::size_t s = order[pos];
        for (std::size_t a = 0; a < m; ++a) {
            std::vector<std::size_t> targets;
            if (a == 0) {
                std::uniform_int_distribution<std::size_t> earlier(0, pos - 1);
                targets.push_back(order[earlier(rng)]);
            }
            const std::size_t extra = succ_count(rng);
            while (targets.size() < extra) targets.push_back(any(rng));
            const auto probs = random_probabilities(rng, targets.size());
            for (std::size_t i = 0; i < targets.size(); ++i) {
                b.add(state_id(s), action_id(a), state_id(targets[i]), probs[i], reward(rng));
            }
        }
    }
    return b.build();
}

inline ValueFunction random_values(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    ValueFunction v(n);
    for (double& x : v.values()) x = u(rng);
    return v;
}

inline Policy random_policy(std::mt19937_64& rng, const Mdp& mdp) {
    std::uniform_int_distribution<std::size_t> pick(0, mdp.num_actions() - 1);
    Policy p(mdp.num_states());
    for (std::size_t s = 0; s < mdp.num_states(); ++s) p[state_id(s)] = action_id(pick(rng));
    return p;
}

struct RandomChain {
    MarkovChain chain;
    StateId goal;
};

// Absorbing-ish chain on at most max_states states. With `trap` one extra
// self-looping state is added that some states may fall into.
inline RandomChain random_chain(std::mt19937_64& rng, std::size_t max_states, bool trap) {
    std::uniform_int_distribution<std::size_t> pick_n(trap ? 3 : 2, max_states);
    const std::size_t n = pick_n(rng);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t goal = order[0];
    const std::size_t trap_state = trap ? order[n - 1] : n;

    std::vector<Triplet> entries;
    std::uniform_int_distribution<std::size_t> any(0, n - 1);
    std::uniform_int_distribution<std::size_t> succ_count(1, 3);
    std::bernoulli_distribution to_trap(0.3);
    for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t s = order[pos];
        if (s == goal || s == trap_state) {
            entries.push_back({s, s, 1.0});
            continue;
        }
        std::uniform_int_distribution<std::size_t> earlier(0, pos - 1);
        std::vector<std::size_t> targets{order[earlier(rng)]};
        const std::size_t extra = succ_count(rng);
        while (targets.size() < extra + 1) {
            const std::size_t t = any(rng);
            if (t != trap_state) targets.push_back(t);
        }
        if (trap && to_trap(rng)) targets.push_back(trap_state);
        const auto probs = random_probabilities(rng, targets.size());
        for (std::size_t i = 0; i < targets.size(); ++i) entries.push_back({s, targets[i], probs[i]});
    }
    return {MarkovChain(SparseMatrix::from_triplets(n, n, std::move(entries))), state_id(goal)};
}

// Plain Gaussian elimination with partial pivoting on a dense copy.
inline std::vector<double> dense_solve(Dense a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
        }
        if (std::abs(a[p][k]) < 1e-14) throw std::runtime_error("dense_solve: singular");
        std::swap(a[k], a[p]);
        std::swap(b[k], b[p]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= a[k][j] * x[j];
        x[k] = s / a[k][k];
    }
    return x;
}

inline Dense to_dense(const SparseMatrix& m) {
    Dense d(m.rows(), std::vector<double>(m.cols(), 0.0));
    for (const auto& t : m.triplets()) d[t.row][t.col] = t.value;
    return d;
}

// States from which the goal is hit with probability 1, by iterating the
// hitting probability h = P·h (h[goal] = 1) to convergence.
inline std::vector<bool> hits_surely(const MarkovChain& chain, StateId goal) {
    const std::size_t n = chain.num_states();
    std::vector<double> h(n, 0.0);
    h[index(goal)] = 1.0;
    for (int it = 0; it < 200000; ++it) {
        double change = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            if (s == index(goal)) continue;
            double v = 0.0;
            const auto cols = chain.successors(state_id(s));
            const auto probs = chain.probabilities(state_id(s));
            for (std::size_t k = 0; k < cols.size(); ++k) v += probs[k] * h[cols[k]];
            change = std::max(change, std::abs(v - h[s]));
            h[s] = v;
        }
        if (change < 1e-15) break;
    }
    std::vector<bool> out(n);
    for (std::size_t s = 0; s < n; ++s) out[s] = h[s] > 1.0 - 1e-9;
    return out;
}

// Sampled mean number of steps to reach the goal.
inline double monte_carlo_hitting_time(const MarkovChain& chain, StateId start, StateId goal,
                                       std::size_t episodes, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double total = 0.0;
    for (std::size_t e = 0; e < episodes; ++e) {
        std::size_t s = index(start);
        std::size_t steps = 0;
        while (s != index(goal)) {
            const auto cols = chain.successors(state_id(s));
            const auto probs = chain.probabilities(state_id(s));
            double r = u(rng);
            std::size_t k = 0;
            while (k + 1 < cols.size() && r >= probs[k]) r -= probs[k++];
            s = cols[k];
            ++steps;
        }
        total += static_cast<double>(steps);
    }
    return total / static_cast<double>(episodes);
}

// Value of a fixed policy by a dense linear solve of (I - γP)V = r.
inline std::vector<double> dense_policy_values(const Mdp& mdp, const Policy& policy) {
    const std::size_t n = mdp.num_states();
    Dense a(n, std::vector<double>(n, 0.0));
    std::vector<double> r(n, 0.0);
    for (std::size_t s = 0; s < n; ++s) {
        a[s][s] += 1.0;
        for (const auto& t : mdp.transitions(state_id(s), policy[state_id(s)])) {
            a[s][index(t.successor)] -= mdp.discount() * t.probability;
            r[s] += t.probability * t.reward;
        }
    }
    return dense_solve(std::move(a), std::move(r));
}

// Synchronous value iteration run until the values stop moving in double precision.
inline std::vector<double> brute_force_values(const Mdp& mdp) {
    const std::size_t n = mdp.num_states();
    std::vector<double> v(n, 0.0), next(n, 0.0);
    for (int it = 0; it < 100000; ++it) {
        double change = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
                double q = 0.0;
                for (const auto& t : mdp.transitions(state_id(s), action_id(a))) {
                    q += t.probability * (t.reward + mdp.discount() * v[index(t.successor)]);
                }
                best = std::max(best, q);
            }
            next[s] = best;
            change = std::max(change, std::abs(best - v[s]));
        }
        v.swap(next);
        if (change <= 1e-13) break;
    }
    return v;
}

// Rounding allowance for ||BV1 - BV2|| <= gamma ||V1 - V2||.
inline double contraction_slack(const Mdp& m, const ValueFunction& v1, const ValueFunction& v2) {
    double scale = 1.0;
    for (std::size_t s = 0; s < m.num_states(); ++s) {
        for (std::size_t a = 0; a < m.num_actions(); ++a) {
            for (const auto& t : m.transitions(state_id(s), action_id(a))) scale = std::max(scale, std::abs(t.reward));
        }
    }
    for (double x : v1.values()) scale = std::max(scale, std::abs(x));
    for (double x : v2.values()) scale = std::max(scale, std::abs(x));
    return 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

// Two regions split by a vertical wall with one gap; the goal sits in the
// right half.
inline const char* kWalledMap =
    "S.........#.........\n"
    "..........#.........\n"
    "..........#.........\n"
    "..........#.........\n"
    "..........#.........\n"
    "....................\n"
    "..........#.........\n"
    "..........#.........\n"
    "..........#.........\n"
    "..........#........G\n";

}  // namespace mfptmdp::testing
