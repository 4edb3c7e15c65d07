#include "mfptmdp/gridworld.hpp"

#include <array>
#include <random>
#include <string>

namespace mfptmdp {

namespace {

struct Move {
    int dx;
    int dy;
    int dz;
    const char* name;
};

constexpr std::array<Move, kActions2d> kMoves2d{{
    {0, -1, 0, "N"},
    {1, -1, 0, "NE"},
    {1, 0, 0, "E"},
    {1, 1, 0, "SE"},
    {0, 1, 0, "S"},
    {-1, 1, 0, "SW"},
    {-1, 0, 0, "W"},
    {-1, -1, 0, "NW"},
    {0, 0, 0, "idle"},
}};

constexpr std::array<Move, kActions3d> kMoves3d{{
    {0, -1, 0, "N"},
    {1, 0, 0, "E"},
    {0, 1, 0, "S"},
    {-1, 0, 0, "W"},
    {0, 0, 1, "TOP"},
    {0, 0, -1, "BOTTOM"},
    {0, 0, 0, "idle"},
}};

char cell_char(CellKind k) {
    switch (k) {
        case CellKind::Free: return '.';
        case CellKind::Obstacle: return '#';
        case CellKind::Goal: return 'G';
        case CellKind::Start: return 'S';
    }
    return '?';
}

std::optional<GridCoord> shifted(const GridMap& grid, const GridCoord& c, const Move& m) {
    const auto nx = static_cast<long long>(c.x) + m.dx;
    const auto ny = static_cast<long long>(c.y) + m.dy;
    const auto nz = static_cast<long long>(c.z) + m.dz;
    if (nx < 0 || ny < 0 || nz < 0) return std::nullopt;
    if (nx >= static_cast<long long>(grid.width()) || ny >= static_cast<long long>(grid.height()) ||
        nz >= static_cast<long long>(grid.depth())) {
        return std::nullopt;
    }
    return GridCoord{static_cast<std::size_t>(nx), static_cast<std::size_t>(ny),
                     static_cast<std::size_t>(nz)};
}

template <std::size_t N>
Mdp build_with_moves(const GridMap& grid, const std::array<Move, N>& moves, NoiseModel noise,
                     GridRewards rewards, double gamma) {
    if (!(noise.eta >= 0.0 && noise.eta < 1.0)) {
        throw std::invalid_argument("noise eta must lie in [0, 1)");
    }
    const std::size_t n = grid.num_cells();
    MdpBuilder builder(n, N, gamma);
    for (StateId g : grid.goals()) builder.add_goal(g);

    auto reward_for = [&](StateId from, StateId to) {
        if (grid.at(to) == CellKind::Obstacle) return rewards.obstacle_penalty;
        if (grid.at(to) == CellKind::Goal && to != from) return rewards.goal_reward;
        return 0.0;
    };

    std::array<std::optional<StateId>, N> targets;
    for (std::size_t s = 0; s < n; ++s) {
        const StateId here = state_id(s);
        if (grid.at(here) == CellKind::Goal) continue;
        const GridCoord c = grid.coord(here);
        std::size_t feasible = 0;
        for (std::size_t m = 0; m < N; ++m) {
            const auto t = shifted(grid, c, moves[m]);
            targets[m] = t ? std::optional<StateId>(grid.state(*t)) : std::nullopt;
            if (targets[m]) ++feasible;
        }
        for (std::size_t a = 0; a < N; ++a) {
            const ActionId action = action_id(a);
            StateId intended = here;
            if (targets[a] && grid.at(*targets[a]) != CellKind::Obstacle) intended = *targets[a];
            const std::size_t others = feasible - (targets[a] ? 1 : 0);
            if (noise.eta == 0.0 || others == 0) {
                builder.add(here, action, intended, 1.0, reward_for(here, intended));
                continue;
            }
            builder.add(here, action, intended, 1.0 - noise.eta, reward_for(here, intended));
            const double share = noise.eta / static_cast<double>(others);
            for (std::size_t m = 0; m < N; ++m) {
                if (m == a || !targets[m]) continue;
                builder.add(here, action, *targets[m], share, reward_for(here, *targets[m]));
            }
        }
    }
    return builder.build();
}

}  // namespace

GridMap::GridMap(std::size_t width, std::size_t height, std::size_t depth, bool three_d,
                 std::vector<CellKind> cells)
    : width_(width), height_(height), depth_(depth), three_d_(three_d), cells_(std::move(cells)) {
    if (cells_.size() != width_ * height_ * depth_) {
        throw DimensionError("grid cell count does not match its dimensions");
    }
}

GridCoord GridMap::coord(StateId s) const noexcept {
    const std::size_t i = index(s);
    return {i % width_, (i / width_) % height_, i / (width_ * height_)};
}

std::vector<StateId> GridMap::goals() const {
    std::vector<StateId> out;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i] == CellKind::Goal) out.push_back(state_id(i));
    }
    return out;
}

std::optional<StateId> GridMap::start() const {
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        if (cells_[i] == CellKind::Start) return state_id(i);
    }
    return std::nullopt;
}

std::string GridMap::to_text() const {
    std::string out;
    for (std::size_t z = 0; z < depth_; ++z) {
        if (z > 0) out += '\n';
        for (std::size_t y = 0; y < height_; ++y) {
            for (std::size_t x = 0; x < width_; ++x) out += cell_char(at(GridCoord{x, y, z}));
            out += '\n';
        }
    }
    return out;
}

GridMap parse_grid(std::string_view text) {
    using Kind = GridParseError::Kind;

    struct Line {
        std::string_view content;
        std::size_t number;
    };
    std::vector<std::vector<Line>> blocks(1);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (line.empty()) {
            if (!blocks.back().empty()) blocks.emplace_back();
        } else {
            for (std::size_t col = 0; col < line.size(); ++col) {
                const char ch = line[col];
                if (ch != '.' && ch != '#' && ch != 'G' && ch != 'S') {
                    throw GridParseError(Kind::UnknownCell,
                                         std::string("unknown cell '") + ch + "' at line " +
                                             std::to_string(line_no) + ", column " +
                                             std::to_string(col + 1),
                                         ch, line_no, col + 1);
                }
            }
            blocks.back().push_back({line, line_no});
        }
        if (end == text.size()) break;
        pos = end + 1;
    }
    if (blocks.back().empty()) blocks.pop_back();
    if (blocks.empty()) throw GridParseError(Kind::EmptyGrid, "grid is empty");

    const std::size_t height = blocks.front().size();
    const std::size_t width = blocks.front().front().content.size();
    std::vector<CellKind> cells;
    cells.reserve(width * height * blocks.size());
    std::size_t starts = 0;
    std::size_t goals = 0;
    for (const auto& block : blocks) {
        if (block.size() != height) {
            throw GridParseError(Kind::RaggedGrid,
                                 "layer starting at line " + std::to_string(block.front().number) +
                                     " has " + std::to_string(block.size()) + " rows, expected " +
                                     std::to_string(height),
                                 '\0', block.front().number);
        }
        for (const auto& line : block) {
            if (line.content.size() != width) {
                throw GridParseError(Kind::RaggedGrid,
                                     "line " + std::to_string(line.number) + " has " +
                                         std::to_string(line.content.size()) + " cells, expected " +
                                         std::to_string(width),
                                     '\0', line.number);
            }
            for (char ch : line.content) {
                switch (ch) {
                    case '.': cells.push_back(CellKind::Free); break;
                    case '#': cells.push_back(CellKind::Obstacle); break;
                    case 'G': cells.push_back(CellKind::Goal); ++goals; break;
                    default: cells.push_back(CellKind::Start); ++starts; break;
                }
            }
        }
    }
    if (goals == 0) throw GridParseError(Kind::NoGoal, "grid has no goal cell");
    if (starts > 1) throw GridParseError(Kind::MultipleStarts, "grid has more than one start cell");
    return GridMap(width, height, blocks.size(), blocks.size() > 1, std::move(cells));
}

const char* action_name(const GridMap& grid, ActionId a) {
    const std::size_t i = index(a);
    if (grid.is_3d()) return i < kActions3d ? kMoves3d[i].name : "?";
    return i < kActions2d ? kMoves2d[i].name : "?";
}

Mdp build_mdp_2d(const GridMap& grid, NoiseModel noise, double goal_reward,
                 double obstacle_penalty, double gamma) {
    if (grid.is_3d()) throw DimensionError("build_mdp_2d called with a 3D map");
    return build_with_moves(grid, kMoves2d, noise, {goal_reward, obstacle_penalty}, gamma);
}

Mdp build_mdp_3d(const GridMap& grid, NoiseModel noise, double goal_reward,
                 double obstacle_penalty, double gamma) {
    if (!grid.is_3d()) throw DimensionError("build_mdp_3d called with a 2D map");
    return build_with_moves(grid, kMoves3d, noise, {goal_reward, obstacle_penalty}, gamma);
}

Mdp build_grid_mdp(const GridMap& grid, NoiseModel noise, GridRewards rewards, double gamma) {
    return grid.is_3d()
               ? build_mdp_3d(grid, noise, rewards.goal_reward, rewards.obstacle_penalty, gamma)
               : build_mdp_2d(grid, noise, rewards.goal_reward, rewards.obstacle_penalty, gamma);
}

std::vector<StateId> rollout_policy(const Mdp& mdp, const Policy& policy, StateId start,
                                    std::size_t max_steps, std::uint64_t seed) {
    if (index(start) >= mdp.num_states()) throw DimensionError("rollout start out of range");
    if (policy.size() != mdp.num_states()) throw DimensionError("policy has the wrong length");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<StateId> path{start};
    StateId here = start;
    for (std::size_t step = 0; step < max_steps && !mdp.is_goal(here); ++step) {
        const auto row = mdp.transitions(here, policy[here]);
        double u = uniform(rng);
        StateId next = row.back().successor;
        for (const auto& t : row) {
            if (u < t.probability) {
                next = t.successor;
                break;
            }
            u -= t.probability;
        }
        path.push_back(next);
        here = next;
    }
    return path;
}

GridMap benchmark_grid(std::size_t side) {
    if (side < 4) throw std::invalid_argument("benchmark_grid needs side >= 4");
    std::vector<CellKind> cells(side * side, CellKind::Free);
    auto set = [&](std::size_t x, std::size_t y, CellKind k) { cells[y * side + x] = k; };
    // Two staggered horizontal bars and one vertical bar, each leaving a gap.
    if (side >= 8) {
        const std::size_t row1 = side / 3;
        const std::size_t row2 = 2 * side / 3;
        for (std::size_t x = 0; x < side * 3 / 5; ++x) set(x, row1, CellKind::Obstacle);
        for (std::size_t x = side * 2 / 5; x < side; ++x) set(x, row2, CellKind::Obstacle);
        for (std::size_t y = row1 + 2; y + 2 < row2; ++y) set(side / 2, y, CellKind::Obstacle);
    }
    set(1, 1, CellKind::Start);
    set(side - 2, side - 2, CellKind::Goal);
    return GridMap(side, side, 1, false, std::move(cells));
}

GridMap benchmark_grid_3d(std::size_t side) {
    if (side < 3) throw std::invalid_argument("benchmark_grid_3d needs side >= 3");
    std::vector<CellKind> cells(side * side * side, CellKind::Free);
    auto idx = [side](std::size_t x, std::size_t y, std::size_t z) { return (z * side + y) * side + x; };
    // A slab through the middle layer with one opening in a corner.
    if (side >= 4) {
        const std::size_t z = side / 2;
        for (std::size_t y = 0; y < side; ++y) {
            for (std::size_t x = 0; x < side; ++x) {
                if (!(x + 1 == side && y == 0)) cells[idx(x, y, z)] = CellKind::Obstacle;
            }
        }
    }
    cells[idx(0, 0, 0)] = CellKind::Start;
    cells[idx(side - 1, side - 1, side - 1)] = CellKind::Goal;
    return GridMap(side, side, side, true, std::move(cells));
}

}  // namespace mfptmdp
