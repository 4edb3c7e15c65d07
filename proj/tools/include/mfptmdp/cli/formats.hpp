#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <mfptmdp/gridworld.hpp>
#include <mfptmdp/mfpt.hpp>
#include <mfptmdp/solvers.hpp>

namespace mfptmdp::cli {

inline constexpr const char* kTraceHeader =
    "iteration,delta,cumulative_ms,bellman_ms,pe_ms,pi_ms,mfpt_ms,sort_ms";

/// Columns 2 onwards of the trace CSV hold wall-clock times.
inline constexpr std::size_t kTraceTimingFirstColumn = 2;

void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace);

/// `solver=vi states=2 iterations=1 total_ms=0.004 converged=true`
std::string format_summary(const ConvergenceTrace& trace, std::size_t num_states);

/// round(255 · min(μ, clip) / clip) per state, sentinel as 255.
std::vector<std::uint8_t> landscape_pixels(const ReachabilityLandscape& landscape, double clip);

/// Plain P2 image, one text row per image row.
void write_pgm(std::ostream& os, std::size_t width, std::size_t height,
               std::span<const std::uint8_t> pixels);

/// 64-bit FNV-1a over the action indices, each fed as four little-endian bytes.
std::uint64_t policy_hash(const Policy& policy);
std::string hex64(std::uint64_t value);

void write_policy_csv(std::ostream& os, const GridMap& grid, const Policy& policy);
void write_rollout_csv(std::ostream& os, const GridMap& grid, std::span<const StateId> path);

}  // namespace mfptmdp::cli
