#include <doctest.h>

#include <random>

#include <mfptmdp/gridworld.hpp>
#include <mfptmdp/solvers.hpp>

#include "test_models.hpp"

using namespace mfptmdp;

namespace {

constexpr std::size_t kN = 0, kNE = 1, kE = 2, kS = 4, kIdle2d = 8;
constexpr std::size_t kTop = 4, kIdle3d = 6;

double mass_to(const Mdp& m, StateId s, std::size_t a, StateId target) {
    double p = 0.0;
    for (const auto& t : m.transitions(s, action_id(a))) {
        if (t.successor == target) p += t.probability;
    }
    return p;
}

GridParseError::Kind parse_error_kind(const std::string& text) {
    try {
        parse_grid(text);
    } catch (const GridParseError& e) {
        return e.kind();
    }
    FAIL("expected a parse error");
    return GridParseError::Kind::EmptyGrid;
}

std::string open_grid(std::size_t w, std::size_t h, GridCoord goal) {
    std::string text;
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) text += (x == goal.x && y == goal.y) ? 'G' : '.';
        text += '\n';
    }
    return text;
}

}  // namespace

TEST_CASE("parse_grid: SG") {
    const GridMap g = parse_grid("SG");
    CHECK(g.width() == 2);
    CHECK(g.height() == 1);
    CHECK_FALSE(g.is_3d());
    REQUIRE(g.start().has_value());
    CHECK(g.coord(*g.start()) == GridCoord{0, 0, 0});
    REQUIRE(g.goals().size() == 1);
    CHECK(g.coord(g.goals()[0]) == GridCoord{1, 0, 0});
}

TEST_CASE("parse_grid: errors") {
    try {
        parse_grid("S.\n.G\n..x");
        FAIL("expected UnknownCell");
    } catch (const GridParseError& e) {
        CHECK(e.kind() == GridParseError::Kind::UnknownCell);
        CHECK(e.character() == 'x');
        CHECK(e.line() == 3);
        CHECK(e.column() == 3);
    }
    CHECK(parse_error_kind("S.\n..") == GridParseError::Kind::NoGoal);
    CHECK(parse_error_kind("S..\n.G") == GridParseError::Kind::RaggedGrid);
    CHECK(parse_error_kind("SG\nS.") == GridParseError::Kind::MultipleStarts);
    CHECK(parse_error_kind("") == GridParseError::Kind::EmptyGrid);
    CHECK(parse_error_kind("S.\n.G\n\n..\n...") == GridParseError::Kind::RaggedGrid);
}

TEST_CASE("parse_grid: layers, CRLF and round trip") {
    const GridMap g = parse_grid("S.\r\n..\r\n\r\n.#\r\n.G\r\n");
    CHECK(g.is_3d());
    CHECK(g.depth() == 2);
    CHECK(g.at(GridCoord{1, 0, 1}) == CellKind::Obstacle);
    CHECK(g.coord(g.goals()[0]) == GridCoord{1, 1, 1});
    CHECK(g.state_index(GridCoord{1, 1, 1}) == 7);
    CHECK(parse_grid(g.to_text()).to_text() == g.to_text());
    const GridMap flat = parse_grid("S.#\n..G\n");
    CHECK(parse_grid(flat.to_text()).to_text() == flat.to_text());
}

TEST_CASE("build_mdp_2d: SG, east reaches the goal") {
    const GridMap g = parse_grid("SG");
    const Mdp m = build_mdp_2d(g, NoiseModel{0.0});
    CHECK(m.num_states() == 2);
    CHECK(m.num_actions() == 9);
    const auto row = m.transitions(state_id(0), action_id(kE));
    REQUIRE(row.size() == 1);
    CHECK(row[0].successor == state_id(1));
    CHECK(row[0].probability == 1.0);
    CHECK(row[0].reward == 100.0);
    CHECK(m.is_goal(state_id(1)));
    CHECK_THROWS_AS(build_mdp_3d(g, NoiseModel{0.0}), DimensionError);
}

TEST_CASE("build_mdp_2d: 3x3 open grid without noise") {
    const GridMap g = parse_grid("...\n...\n..G");
    const Mdp m = build_mdp_2d(g, NoiseModel{0.0});
    const StateId centre = g.state(GridCoord{1, 1, 0});
    const int dx[] = {0, 1, 1, 1, 0, -1, -1, -1, 0};
    const int dy[] = {-1, -1, 0, 1, 1, 1, 0, -1, 0};
    for (std::size_t a = 0; a < 9; ++a) {
        const StateId target = g.state(GridCoord{static_cast<std::size_t>(1 + dx[a]),
                                                 static_cast<std::size_t>(1 + dy[a]), 0});
        CHECK(mass_to(m, centre, a, target) == 1.0);
    }
}

TEST_CASE("build_mdp_2d: noisy north from the centre") {
    const GridMap g = parse_grid("...\n...\n..G");
    const Mdp m = build_mdp_2d(g, NoiseModel{0.2});
    const StateId centre = g.state(GridCoord{1, 1, 0});
    CHECK(mass_to(m, centre, kN, g.state(GridCoord{1, 0, 0})) == doctest::Approx(0.8));
    double sum = 0.0;
    for (const auto& t : m.transitions(centre, action_id(kN))) {
        sum += t.probability;
        if (t.successor != g.state(GridCoord{1, 0, 0})) CHECK(t.probability == doctest::Approx(0.2 / 8));
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.transitions(centre, action_id(kN)).size() == 9);
}

TEST_CASE("build_mdp_2d: blocked moves stay, noise can enter obstacles") {
    const GridMap g = parse_grid("S#\n.G");
    const Mdp clean = build_mdp_2d(g, NoiseModel{0.0});
    const StateId s = state_id(0);
    CHECK(mass_to(clean, s, kE, s) == 1.0);
    CHECK(mass_to(clean, s, kN, s) == 1.0);
    for (std::size_t a = 0; a < 9; ++a) CHECK(mass_to(clean, s, a, state_id(1)) == 0.0);

    const Mdp noisy = build_mdp_2d(g, NoiseModel{0.3});
    bool penalised = false;
    for (const auto& t : noisy.transitions(s, action_id(kS))) {
        if (t.successor == state_id(1)) {
            penalised = true;
            CHECK(t.reward == -1.0);
        }
    }
    CHECK(penalised);
}

TEST_CASE("build_mdp_3d") {
    const GridMap column = parse_grid("S\n\nG");
    const Mdp m = build_mdp_3d(column, NoiseModel{0.0});
    CHECK(m.num_actions() == 7);
    CHECK(mass_to(m, state_id(0), kTop, state_id(1)) == 1.0);
    CHECK(action_name(column, action_id(kTop)) == std::string("TOP"));
    CHECK_THROWS_AS(build_mdp_2d(column, NoiseModel{0.0}), DimensionError);

    std::string cube;
    for (int z = 0; z < 3; ++z) cube += z == 2 ? "...\n...\n..G\n" : "...\n...\n...\n\n";
    const GridMap g = parse_grid(cube);
    const Mdp open = build_mdp_3d(g, NoiseModel{0.3});
    const StateId centre = g.state(GridCoord{1, 1, 1});
    for (std::size_t a = 0; a < 7; ++a) {
        double sum = 0.0;
        for (const auto& t : open.transitions(centre, action_id(a))) sum += t.probability;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(mass_to(open, centre, kTop, g.state(GridCoord{1, 1, 2})) == doctest::Approx(0.7));
    CHECK(mass_to(open, centre, kTop, g.state(GridCoord{1, 1, 0})) == doctest::Approx(0.05));
    CHECK(mass_to(open, centre, kTop, centre) == doctest::Approx(0.05));
    CHECK(mass_to(open, centre, kIdle3d, centre) == doctest::Approx(0.7));
}

TEST_CASE("property: built models are valid and absorbing") {
    for (std::size_t side : {5, 12, 30}) {
        for (double eta : {0.0, 0.1, 0.4}) {
            const Mdp m = build_grid_mdp(benchmark_grid(side), NoiseModel{eta}, GridRewards{}, 0.95);
            CHECK(validate_mdp(m).ok());
            CHECK(check_absorbing(m));
        }
    }
    const Mdp cube = build_grid_mdp(benchmark_grid_3d(6), NoiseModel{0.1}, GridRewards{}, 0.95);
    CHECK(validate_mdp(cube).ok());
    CHECK(check_absorbing(cube));
}

TEST_CASE("property: noise-free builders are deterministic and avoid obstacles") {
    const GridMap g = benchmark_grid(20);
    const Mdp m = build_mdp_2d(g, NoiseModel{0.0});
    for (std::size_t s = 0; s < m.num_states(); ++s) {
        for (std::size_t a = 0; a < m.num_actions(); ++a) {
            const auto row = m.transitions(state_id(s), action_id(a));
            CHECK(row.size() == 1);
            if (g.at(state_id(s)) != CellKind::Obstacle && row[0].successor != state_id(s)) {
                CHECK(g.at(row[0].successor) != CellKind::Obstacle);
            }
        }
    }
}

TEST_CASE("rollout_policy") {
    const GridMap g = parse_grid("SG");
    const Mdp m = build_mdp_2d(g, NoiseModel{0.0});
    const SolveResult r = value_iteration(m, SolverConfig{});
    CHECK(rollout_policy(m, r.policy, state_id(0), 100, 1).size() == 2);
    CHECK(rollout_policy(m, r.policy, state_id(1), 100, 1) == std::vector<StateId>{state_id(1)});

    const Mdp noisy = build_mdp_2d(benchmark_grid(12), NoiseModel{0.2});
    const Policy p = value_iteration(noisy, SolverConfig{}).policy;
    CHECK(rollout_policy(noisy, p, state_id(13), 500, 9) == rollout_policy(noisy, p, state_id(13), 500, 9));
    CHECK(rollout_policy(noisy, Policy(noisy.num_states(), action_id(kIdle2d)), state_id(13), 5, 3).size() == 6);
}

TEST_CASE("shortest paths on open grids without noise") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> side(3, 12);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t w = side(rng), h = side(rng);
        std::uniform_int_distribution<std::size_t> px(0, w - 1), py(0, h - 1);
        const GridCoord goal{px(rng), py(rng), 0};
        const GridMap g = parse_grid(open_grid(w, h, goal));
        const Mdp m = build_mdp_2d(g, NoiseModel{0.0});
        const Policy p = value_iteration(m, SolverConfig{}).policy;
        const GridCoord start{px(rng), py(rng), 0};
        const std::size_t dist = std::max(start.x > goal.x ? start.x - goal.x : goal.x - start.x,
                                          start.y > goal.y ? start.y - goal.y : goal.y - start.y);
        CHECK(rollout_policy(m, p, g.state(start), 1000, 1).size() == dist + 1);
    }
}

TEST_CASE("shortest paths in an open cube follow 6-connected moves") {
    std::string text;
    for (int z = 0; z < 4; ++z) {
        for (int y = 0; y < 4; ++y) text += (z == 3 && y == 3) ? "...G\n" : "....\n";
        if (z < 3) text += '\n';
    }
    const GridMap g = parse_grid(text);
    const Mdp m = build_mdp_3d(g, NoiseModel{0.0});
    const Policy p = value_iteration(m, SolverConfig{}).policy;
    const std::size_t steps = rollout_policy(m, p, g.state(GridCoord{0, 0, 0}), 100, 1).size() - 1;
    CHECK(steps == 9);
}

TEST_CASE("benchmark maps") {
    const GridMap g = benchmark_grid(50);
    CHECK(g.num_cells() == 2500);
    CHECK(g.start().has_value());
    CHECK(g.goals().size() == 1);
    CHECK(benchmark_grid(50).to_text() == g.to_text());
    const GridMap c = benchmark_grid_3d(8);
    CHECK(c.is_3d());
    CHECK(c.num_cells() == 512);
}
