#include "mfptmdp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "mfptmdp/errors.hpp"

namespace mfptmdp {

Mdp Mdp::with_discount(double gamma) const {
    Mdp copy = *this;
    copy.discount_ = gamma;
    return copy;
}

MdpBuilder::MdpBuilder(std::size_t num_states, std::size_t num_actions, double discount)
    : num_states_(num_states),
      num_actions_(num_actions),
      discount_(discount),
      rows_(num_states * num_actions) {}

MdpBuilder& MdpBuilder::add(StateId s, ActionId a, StateId successor, double probability,
                            double reward) {
    if (index(s) >= num_states_ || index(a) >= num_actions_) {
        throw DimensionError("MdpBuilder::add: (state " + std::to_string(index(s)) +
                             ", action " + std::to_string(index(a)) + ") out of range");
    }
    rows_[index(s) * num_actions_ + index(a)].push_back({successor, probability, reward});
    return *this;
}

MdpBuilder& MdpBuilder::add_goal(StateId g) {
    if (index(g) >= num_states_) {
        throw DimensionError("MdpBuilder::add_goal: state " + std::to_string(index(g)) +
                             " out of range");
    }
    if (std::find(goals_.begin(), goals_.end(), g) == goals_.end()) goals_.push_back(g);
    return *this;
}

Mdp MdpBuilder::assemble(bool normalize) const {
    Mdp mdp;
    mdp.num_states_ = num_states_;
    mdp.num_actions_ = num_actions_;
    mdp.discount_ = discount_;
    mdp.goals_ = goals_;
    std::sort(mdp.goals_.begin(), mdp.goals_.end());
    mdp.goal_mask_.assign(num_states_, 0);
    for (StateId g : mdp.goals_) mdp.goal_mask_[index(g)] = 1;

    mdp.offsets_.assign(rows_.size() + 1, 0);
    mdp.edges_.clear();
    std::vector<Transition> row;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        const std::size_t s = r / num_actions_;
        if (!normalize) {
            row = rows_[r];
        } else if (mdp.goal_mask_[s]) {
            row.assign(1, Transition{state_id(s), 1.0, 0.0});
        } else {
            row = rows_[r];
            std::stable_sort(row.begin(), row.end(), [](const Transition& x, const Transition& y) {
                return x.successor < y.successor;
            });
            std::vector<Transition> merged;
            for (const auto& t : row) {
                if (!merged.empty() && merged.back().successor == t.successor) {
                    auto& m = merged.back();
                    const double total = m.probability + t.probability;
                    m.reward = total != 0.0
                                   ? (m.reward * m.probability + t.reward * t.probability) / total
                                   : t.reward;
                    m.probability = total;
                } else {
                    merged.push_back(t);
                }
            }
            std::erase_if(merged, [](const Transition& t) { return t.probability == 0.0; });
            double sum = 0.0;
            for (const auto& t : merged) sum += t.probability;
            const double gap = std::abs(sum - 1.0);
            if (gap > 0.0 && gap < kRenormalizeTolerance) {
                for (auto& t : merged) t.probability /= sum;
            }
            row = std::move(merged);
        }
        mdp.edges_.insert(mdp.edges_.end(), row.begin(), row.end());
        mdp.offsets_[r + 1] = mdp.edges_.size();
    }
    return mdp;
}

Mdp MdpBuilder::build() const {
    Mdp mdp = assemble(true);
    const ValidationReport report = validate_mdp(mdp);
    if (!report.ok()) throw InvalidModel(report.describe());
    return mdp;
}

Mdp MdpBuilder::build_unchecked() const { return assemble(false); }

const char* to_string(ViolationKind kind) noexcept {
    switch (kind) {
        case ViolationKind::RowSumViolation: return "RowSumViolation";
        case ViolationKind::NegativeProbability: return "NegativeProbability";
        case ViolationKind::ProbabilityAboveOne: return "ProbabilityAboveOne";
        case ViolationKind::ZeroProbabilityEntry: return "ZeroProbabilityEntry";
        case ViolationKind::DuplicateSuccessor: return "DuplicateSuccessor";
        case ViolationKind::SuccessorOutOfRange: return "SuccessorOutOfRange";
        case ViolationKind::NonFiniteReward: return "NonFiniteReward";
        case ViolationKind::GoalNotAbsorbing: return "GoalNotAbsorbing";
        case ViolationKind::NoGoalStates: return "NoGoalStates";
        case ViolationKind::InvalidDiscount: return "InvalidDiscount";
    }
    return "Unknown";
}

bool ValidationReport::contains(ViolationKind kind) const noexcept {
    return std::any_of(violations.begin(), violations.end(),
                       [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::describe() const {
    if (ok()) return "ok";
    std::ostringstream out;
    out << violations.size() << " violation(s):";
    for (const auto& v : violations) {
        out << "\n  " << to_string(v.kind) << " at (state " << v.state << ", action " << v.action
            << ")";
        if (!v.detail.empty()) out << ": " << v.detail;
    }
    return out.str();
}

ValidationReport validate_mdp(const Mdp& mdp) {
    ValidationReport report;
    auto flag = [&report](ViolationKind kind, std::size_t s, std::size_t a, std::string detail) {
        report.violations.push_back({kind, s, a, std::move(detail)});
    };

    // Zero is accepted as a degenerate discount (pure immediate reward).
    if (!(mdp.discount() >= 0.0 && mdp.discount() <= 1.0)) {
        flag(ViolationKind::InvalidDiscount, 0, 0, "discount " + std::to_string(mdp.discount()));
    }
    if (mdp.goal_states().empty()) flag(ViolationKind::NoGoalStates, 0, 0, {});

    const std::size_t n = mdp.num_states();
    std::vector<std::size_t> seen(n, std::numeric_limits<std::size_t>::max());
    std::size_t stamp = 0;
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t a = 0; a < mdp.num_actions(); ++a, ++stamp) {
            double sum = 0.0;
            for (const auto& t : mdp.transitions(state_id(s), action_id(a))) {
                const std::size_t next = index(t.successor);
                if (next >= n) {
                    flag(ViolationKind::SuccessorOutOfRange, s, a, "successor " + std::to_string(next));
                    continue;
                }
                if (seen[next] == stamp) {
                    flag(ViolationKind::DuplicateSuccessor, s, a, "successor " + std::to_string(next));
                }
                seen[next] = stamp;
                if (t.probability < 0.0) {
                    flag(ViolationKind::NegativeProbability, s, a, std::to_string(t.probability));
                } else if (t.probability > 1.0) {
                    flag(ViolationKind::ProbabilityAboveOne, s, a, std::to_string(t.probability));
                } else if (t.probability == 0.0) {
                    flag(ViolationKind::ZeroProbabilityEntry, s, a, "successor " + std::to_string(next));
                }
                if (!std::isfinite(t.reward)) flag(ViolationKind::NonFiniteReward, s, a, {});
                sum += t.probability;
            }
            if (!(std::abs(sum - 1.0) <= kProbabilityTolerance)) {
                flag(ViolationKind::RowSumViolation, s, a, "sum " + std::to_string(sum));
            }
        }
    }

    for (StateId g : mdp.goal_states()) {
        if (index(g) >= n) continue;
        for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
            const auto row = mdp.transitions(g, action_id(a));
            const bool absorbing = row.size() == 1 && row[0].successor == g &&
                                   std::abs(row[0].probability - 1.0) <= kProbabilityTolerance;
            if (!absorbing) flag(ViolationKind::GoalNotAbsorbing, index(g), a, {});
        }
    }
    return report;
}

bool check_absorbing(const Mdp& mdp) {
    const std::size_t n = mdp.num_states();
    std::vector<std::vector<std::size_t>> predecessors(n);
    for (std::size_t s = 0; s < n; ++s) {
        for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
            for (const auto& t : mdp.transitions(state_id(s), action_id(a))) {
                if (t.probability > 0.0 && index(t.successor) != s) {
                    predecessors[index(t.successor)].push_back(s);
                }
            }
        }
    }
    std::vector<unsigned char> reached(n, 0);
    std::vector<std::size_t> frontier;
    for (StateId g : mdp.goal_states()) {
        if (!reached[index(g)]) {
            reached[index(g)] = 1;
            frontier.push_back(index(g));
        }
    }
    while (!frontier.empty()) {
        const std::size_t s = frontier.back();
        frontier.pop_back();
        for (std::size_t p : predecessors[s]) {
            if (!reached[p]) {
                reached[p] = 1;
                frontier.push_back(p);
            }
        }
    }
    return std::all_of(reached.begin(), reached.end(), [](unsigned char r) { return r != 0; });
}

MarkovChain::MarkovChain(SparseMatrix probs) : probs_(std::move(probs)) {
    if (probs_.rows() != probs_.cols()) throw InvalidModel("Markov chain matrix must be square");
    for (std::size_t r = 0; r < probs_.rows(); ++r) {
        double sum = 0.0;
        for (double p : probs_.row_values(r)) {
            if (p < 0.0 || p > 1.0) {
                throw InvalidModel("chain row " + std::to_string(r) + " has probability " +
                                   std::to_string(p));
            }
            sum += p;
        }
        if (!(std::abs(sum - 1.0) <= kProbabilityTolerance)) {
            throw InvalidModel("chain row " + std::to_string(r) + " sums to " + std::to_string(sum));
        }
    }
}

double action_value(const Mdp& mdp, std::span<const double> values, StateId s, ActionId a) {
    const double gamma = mdp.discount();
    double q = 0.0;
    for (const auto& t : mdp.transitions(s, a)) {
        q += t.probability * (t.reward + gamma * values[index(t.successor)]);
    }
    return q;
}

Backup bellman_backup(const Mdp& mdp, std::span<const double> values, StateId s) {
    Backup best{-std::numeric_limits<double>::infinity(), ActionId{0}};
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
        const double q = action_value(mdp, values, s, action_id(a));
        if (q > best.value) best = {q, action_id(a)};
    }
    return best;
}

ValueFunction bellman_operator(const Mdp& mdp, const ValueFunction& values) {
    ValueFunction next(mdp.num_states());
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        next[state_id(s)] = bellman_backup(mdp, values, state_id(s)).value;
    }
    return next;
}

Policy greedy_policy(const Mdp& mdp, const ValueFunction& values) {
    Policy policy(mdp.num_states());
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        policy[state_id(s)] = bellman_backup(mdp, values, state_id(s)).best_action;
    }
    return policy;
}

Policy greedy_policy(const Mdp& mdp, const ValueFunction& values, double tie_tolerance) {
    if (!(tie_tolerance >= 0.0)) throw std::invalid_argument("tie tolerance must be non-negative");
    Policy policy(mdp.num_states());
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        const StateId id = state_id(s);
        const double best = bellman_backup(mdp, values, id).value;
        for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
            if (action_value(mdp, values.values(), id, action_id(a)) >= best - tie_tolerance) {
                policy[id] = action_id(a);
                break;
            }
        }
    }
    return policy;
}

MarkovChain induced_chain(const Mdp& mdp, const Policy& policy) {
    if (policy.size() != mdp.num_states()) {
        throw DimensionError("policy covers " + std::to_string(policy.size()) + " states, model has " +
                             std::to_string(mdp.num_states()));
    }
    std::vector<Triplet> entries;
    entries.reserve(mdp.num_states() * 2);
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        const ActionId a = policy[state_id(s)];
        if (index(a) >= mdp.num_actions()) {
            throw DimensionError("policy action " + std::to_string(index(a)) + " out of range");
        }
        for (const auto& t : mdp.transitions(state_id(s), a)) {
            entries.push_back({s, index(t.successor), t.probability});
        }
    }
    return MarkovChain(
        SparseMatrix::from_triplets(mdp.num_states(), mdp.num_states(), std::move(entries)));
}

double value_residual(const ValueFunction& v, const ValueFunction& w) {
    if (v.size() != w.size()) {
        throw DimensionError("value_residual: lengths " + std::to_string(v.size()) + " and " +
                             std::to_string(w.size()));
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        worst = std::max(worst, std::abs(v.values()[i] - w.values()[i]));
    }
    return worst;
}

std::size_t policy_mismatch(const Policy& p, const Policy& q) {
    if (p.size() != q.size()) {
        throw DimensionError("policy_mismatch: lengths " + std::to_string(p.size()) + " and " +
                             std::to_string(q.size()));
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p.actions()[i] != q.actions()[i]) ++count;
    }
    return count;
}

}  // namespace mfptmdp
