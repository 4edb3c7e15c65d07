#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mfptmdp/errors.hpp"
#include "mfptmdp/mdp.hpp"
#include "mfptmdp/types.hpp"

namespace mfptmdp {

enum class CellKind : std::uint8_t { Free, Obstacle, Goal, Start };

struct GridCoord {
    std::size_t x = 0;
    std::size_t y = 0;
    std::size_t z = 0;
    friend bool operator==(const GridCoord&, const GridCoord&) = default;
};

/// Rectangular 2D (depth 1) or 3D occupancy map. Row y = 0 is the first text
/// line; layer z = 0 is the first block. States are numbered
/// z·width·height + y·width + x.
class GridMap {
public:
    GridMap(std::size_t width, std::size_t height, std::size_t depth, bool three_d,
            std::vector<CellKind> cells);

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t depth() const noexcept { return depth_; }
    bool is_3d() const noexcept { return three_d_; }
    std::size_t num_cells() const noexcept { return cells_.size(); }

    CellKind at(const GridCoord& c) const { return cells_[state_index(c)]; }
    CellKind at(StateId s) const { return cells_[index(s)]; }
    std::size_t state_index(const GridCoord& c) const noexcept {
        return (c.z * height_ + c.y) * width_ + c.x;
    }
    StateId state(const GridCoord& c) const noexcept { return state_id(state_index(c)); }
    GridCoord coord(StateId s) const noexcept;

    std::vector<StateId> goals() const;
    std::optional<StateId> start() const;

    /// Inverse of parse_grid.
    std::string to_text() const;

private:
    std::size_t width_;
    std::size_t height_;
    std::size_t depth_;
    bool three_d_;
    std::vector<CellKind> cells_;
};

class GridParseError : public Error {
public:
    enum class Kind { RaggedGrid, NoGoal, UnknownCell, MultipleStarts, EmptyGrid };

    GridParseError(Kind kind, std::string message, char character = '\0', std::size_t line = 0,
                   std::size_t column = 0)
        : Error(std::move(message)), kind_(kind), character_(character), line_(line), column_(column) {}

    Kind kind() const noexcept { return kind_; }
    char character() const noexcept { return character_; }
    /// 1-based text position of the offending character.
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    Kind kind_;
    char character_;
    std::size_t line_;
    std::size_t column_;
};

/// '.' free, '#' obstacle, 'G' goal, 'S' start. Blank lines separate the
/// layers of a 3D map. Throws GridParseError.
GridMap parse_grid(std::string_view text);

/// Probability eta leaves the intended move and is spread uniformly over the
/// other feasible moves of the state.
struct NoiseModel {
    double eta = 0.1;
};

struct GridRewards {
    double goal_reward = 100.0;
    double obstacle_penalty = -1.0;
};

// 2D: N, NE, E, SE, S, SW, W, NW, idle. 3D: N, E, S, W, TOP, BOTTOM, idle.
inline constexpr std::size_t kActions2d = 9;
inline constexpr std::size_t kActions3d = 7;
const char* action_name(const GridMap& grid, ActionId a);

/// Throws DimensionError if the map is 3D.
Mdp build_mdp_2d(const GridMap& grid, NoiseModel noise, double goal_reward = 100.0,
                 double obstacle_penalty = -1.0, double gamma = 0.95);
/// Throws DimensionError if the map is 2D.
Mdp build_mdp_3d(const GridMap& grid, NoiseModel noise, double goal_reward = 100.0,
                 double obstacle_penalty = -1.0, double gamma = 0.95);
/// Dispatches on grid.is_3d().
Mdp build_grid_mdp(const GridMap& grid, NoiseModel noise, GridRewards rewards, double gamma);

/// Samples the chain of `policy` from `start` until a goal or max_steps
/// transitions. The first element is `start`.
std::vector<StateId> rollout_policy(const Mdp& mdp, const Policy& policy, StateId start,
                                    std::size_t max_steps, std::uint64_t seed);

/// Deterministic square benchmark map: obstacle bars, start near the top-left
/// corner, goal near the bottom-right corner.
GridMap benchmark_grid(std::size_t side);

/// Deterministic cube map for 3D benchmarks.
GridMap benchmark_grid_3d(std::size_t side);

}  // namespace mfptmdp
