#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mfptmdp {

// Dense indices into the owning model. Kept as distinct enum types so a
// state can never be passed where an action is expected.
enum class StateId : std::uint32_t {};
enum class ActionId : std::uint32_t {};

constexpr std::size_t index(StateId s) noexcept { return static_cast<std::size_t>(s); }
constexpr std::size_t index(ActionId a) noexcept { return static_cast<std::size_t>(a); }
constexpr StateId state_id(std::size_t i) noexcept { return static_cast<StateId>(i); }
constexpr ActionId action_id(std::size_t i) noexcept { return static_cast<ActionId>(i); }

/// One action per state.
class Policy {
public:
    Policy() = default;
    explicit Policy(std::size_t num_states, ActionId fill = ActionId{0})
        : actions_(num_states, fill) {}
    explicit Policy(std::vector<ActionId> actions) : actions_(std::move(actions)) {}

    std::size_t size() const noexcept { return actions_.size(); }
    ActionId operator[](StateId s) const { return actions_[index(s)]; }
    ActionId& operator[](StateId s) { return actions_[index(s)]; }
    std::span<const ActionId> actions() const noexcept { return actions_; }

    friend bool operator==(const Policy&, const Policy&) = default;

private:
    std::vector<ActionId> actions_;
};

/// Per-state value estimate; starts at zero.
class ValueFunction {
public:
    ValueFunction() = default;
    explicit ValueFunction(std::size_t num_states, double fill = 0.0)
        : values_(num_states, fill) {}
    explicit ValueFunction(std::vector<double> values) : values_(std::move(values)) {}

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](StateId s) const { return values_[index(s)]; }
    double& operator[](StateId s) { return values_[index(s)]; }
    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    bool all_finite() const noexcept {
        for (double v : values_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    friend bool operator==(const ValueFunction&, const ValueFunction&) = default;

private:
    std::vector<double> values_;
};

}  // namespace mfptmdp
