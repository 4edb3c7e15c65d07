#pragma once

#include <chrono>

namespace mfptmdp::detail {

using Clock = std::chrono::steady_clock;

inline double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Adds the lifetime of the scope to `bucket`.
class ScopedTimer {
public:
    explicit ScopedTimer(double& bucket) : bucket_(bucket), start_(Clock::now()) {}
    ~ScopedTimer() { bucket_ += elapsed_ms(start_); }
    ScopedTimer(const ScopedTimer&) = delete;
    ScopedTimer& operator=(const ScopedTimer&) = delete;

private:
    double& bucket_;
    Clock::time_point start_;
};

}  // namespace mfptmdp::detail
