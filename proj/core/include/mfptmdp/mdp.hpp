#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mfptmdp/linsolve.hpp"
#include "mfptmdp/types.hpp"

namespace mfptmdp {

/// Row sums must be within this of 1.
inline constexpr double kProbabilityTolerance = 1e-9;
/// Builders renormalise rows whose sum is off by less than this.
inline constexpr double kRenormalizeTolerance = 1e-6;

/// One outgoing edge of a (state, action) pair.
struct Transition {
    StateId successor;
    double probability;
    double reward;
};

/// Finite absorbing MDP with sparse per-(state, action) successor lists and
/// rewards on (state, action, successor) triples.
///
/// Instances are immutable. Use MdpBuilder to assemble one; the builder
/// forces goal states absorbing and validates the result.
class Mdp {
public:
    Mdp() = default;

    std::size_t num_states() const noexcept { return num_states_; }
    std::size_t num_actions() const noexcept { return num_actions_; }
    double discount() const noexcept { return discount_; }
    std::span<const StateId> goal_states() const noexcept { return goals_; }
    bool is_goal(StateId s) const { return goal_mask_[index(s)] != 0; }

    std::span<const Transition> transitions(StateId s, ActionId a) const {
        const std::size_t row = index(s) * num_actions_ + index(a);
        return std::span<const Transition>(edges_).subspan(offsets_[row],
                                                           offsets_[row + 1] - offsets_[row]);
    }

    /// Same transitions, different discount.
    Mdp with_discount(double gamma) const;

private:
    friend class MdpBuilder;

    std::size_t num_states_ = 0;
    std::size_t num_actions_ = 0;
    double discount_ = 1.0;
    std::vector<std::size_t> offsets_{0};
    std::vector<Transition> edges_;
    std::vector<StateId> goals_;
    std::vector<unsigned char> goal_mask_;
};

/// Collects raw transitions. build() merges repeated (s, a, s') entries by
/// summing probability and averaging reward weighted by probability.
class MdpBuilder {
public:
    MdpBuilder(std::size_t num_states, std::size_t num_actions, double discount);

    MdpBuilder& add(StateId s, ActionId a, StateId successor, double probability,
                    double reward = 0.0);
    MdpBuilder& add_goal(StateId g);

    /// Forces goals absorbing, renormalises rows within kRenormalizeTolerance,
    /// and throws InvalidModel listing every violation that remains.
    Mdp build() const;

    /// Assembles the model as given, without goal forcing or checks. Meant
    /// for exercising validate_mdp.
    Mdp build_unchecked() const;

private:
    Mdp assemble(bool normalize) const;

    std::size_t num_states_;
    std::size_t num_actions_;
    double discount_;
    std::vector<std::vector<Transition>> rows_;
    std::vector<StateId> goals_;
};

enum class ViolationKind {
    RowSumViolation,
    NegativeProbability,
    ProbabilityAboveOne,
    ZeroProbabilityEntry,
    DuplicateSuccessor,
    SuccessorOutOfRange,
    NonFiniteReward,
    GoalNotAbsorbing,
    NoGoalStates,
    InvalidDiscount,
};

struct Violation {
    ViolationKind kind;
    std::size_t state = 0;
    std::size_t action = 0;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const noexcept { return violations.empty(); }
    bool contains(ViolationKind kind) const noexcept;
    std::string describe() const;
};

const char* to_string(ViolationKind kind) noexcept;

ValidationReport validate_mdp(const Mdp& mdp);

/// True iff every state has a positive-probability path to some goal, using
/// the union of all action edges.
bool check_absorbing(const Mdp& mdp);

/// Row-stochastic sparse chain induced by fixing a policy.
class MarkovChain {
public:
    MarkovChain() = default;
    /// Throws InvalidModel if a row is not stochastic within kProbabilityTolerance.
    explicit MarkovChain(SparseMatrix probs);

    std::size_t num_states() const noexcept { return probs_.rows(); }
    const SparseMatrix& matrix() const noexcept { return probs_; }
    std::span<const std::size_t> successors(StateId s) const { return probs_.row_columns(index(s)); }
    std::span<const double> probabilities(StateId s) const { return probs_.row_values(index(s)); }
    double probability(StateId from, StateId to) const { return probs_.at(index(from), index(to)); }

private:
    SparseMatrix probs_;
};

struct Backup {
    double value;
    ActionId best_action;
};

/// Expected one-step return Σ T_a(s,s')·(R_a(s,s') + γ·V(s')).
double action_value(const Mdp& mdp, std::span<const double> values, StateId s, ActionId a);

/// Max over actions of action_value; ties go to the lowest ActionId.
Backup bellman_backup(const Mdp& mdp, std::span<const double> values, StateId s);
inline Backup bellman_backup(const Mdp& mdp, const ValueFunction& values, StateId s) {
    return bellman_backup(mdp, values.values(), s);
}

/// Full synchronous Bellman operator applied to every state.
ValueFunction bellman_operator(const Mdp& mdp, const ValueFunction& values);

Policy greedy_policy(const Mdp& mdp, const ValueFunction& values);
/// Lowest action whose value is within tie_tolerance of the best. Gives the
/// same policy for value functions that differ only by small errors.
Policy greedy_policy(const Mdp& mdp, const ValueFunction& values, double tie_tolerance);

MarkovChain induced_chain(const Mdp& mdp, const Policy& policy);

/// max_s |v(s) − w(s)|. Throws DimensionError on length mismatch.
double value_residual(const ValueFunction& v, const ValueFunction& w);

/// Number of states where the policies disagree. Throws DimensionError.
std::size_t policy_mismatch(const Policy& p, const Policy& q);

}  // namespace mfptmdp
