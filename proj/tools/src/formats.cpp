#include "mfptmdp/cli/formats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace mfptmdp::cli {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace) {
    os << kTraceHeader << '\n';
    for (const auto& r : trace.records) {
        const auto& c = r.components;
        os << r.iteration << ',' << fmt("%.17g", r.delta) << ',' << fmt("%.6f", r.cumulative_ms) << ','
           << fmt("%.6f", c.bellman_ms) << ',' << fmt("%.6f", c.policy_evaluation_ms) << ','
           << fmt("%.6f", c.policy_improvement_ms) << ',' << fmt("%.6f", c.mfpt_ms) << ','
           << fmt("%.6f", c.sort_ms) << '\n';
    }
}

std::string format_summary(const ConvergenceTrace& trace, std::size_t num_states) {
    return "solver=" + std::string(solver_name(trace.solver)) + " states=" + std::to_string(num_states) +
           " iterations=" + std::to_string(trace.iterations()) + " total_ms=" + fmt("%.3f", trace.total_ms()) +
           " converged=" + (trace.converged() ? "true" : "false");
}

std::vector<std::uint8_t> landscape_pixels(const ReachabilityLandscape& landscape, double clip) {
    const auto clipped = clip_landscape(landscape, clip);
    std::vector<std::uint8_t> pixels(clipped.size());
    for (std::size_t i = 0; i < clipped.size(); ++i) {
        const double level = std::round(255.0 * clipped[i] / clip);
        pixels[i] = static_cast<std::uint8_t>(std::clamp(level, 0.0, 255.0));
    }
    return pixels;
}

void write_pgm(std::ostream& os, std::size_t width, std::size_t height,
               std::span<const std::uint8_t> pixels) {
    os << "P2\n" << width << ' ' << height << "\n255\n";
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            if (x) os << ' ';
            os << static_cast<unsigned>(pixels[y * width + x]);
        }
        os << '\n';
    }
}

std::uint64_t policy_hash(const Policy& policy) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (ActionId a : policy.actions()) {
        const auto v = static_cast<std::uint32_t>(index(a));
        for (int byte = 0; byte < 4; ++byte) {
            h ^= (v >> (8 * byte)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::string hex64(std::uint64_t value) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
    return buf;
}

void write_policy_csv(std::ostream& os, const GridMap& grid, const Policy& policy) {
    os << "state,x,y,z,action,name\n";
    for (std::size_t s = 0; s < policy.size(); ++s) {
        const StateId id = state_id(s);
        const GridCoord c = grid.coord(id);
        os << s << ',' << c.x << ',' << c.y << ',' << c.z << ',' << index(policy[id]) << ','
           << action_name(grid, policy[id]) << '\n';
    }
}

void write_rollout_csv(std::ostream& os, const GridMap& grid, std::span<const StateId> path) {
    os << "step,state,x,y,z\n";
    for (std::size_t i = 0; i < path.size(); ++i) {
        const GridCoord c = grid.coord(path[i]);
        os << i << ',' << index(path[i]) << ',' << c.x << ',' << c.y << ',' << c.z << '\n';
    }
}

}  // namespace mfptmdp::cli
