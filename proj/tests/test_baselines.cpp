#include <doctest.h>

#include <cmath>
#include <set>

#include "readc/baselines.hpp"
#include "readc/grid_env.hpp"
#include "readc/parking_env.hpp"

using namespace readc;

TEST_SUITE_BEGIN("baselines");

namespace {
const std::string kBoards = READC_BOARDS_DIR;
}

TEST_CASE("overhead identity holds for arbitrary parameterizations") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const int n_steps = 1 + static_cast<int>(rng.uniform_index(5));
        const long prior = 1 + static_cast<long>(rng.uniform_index(100000));
        const long per_task = 1 + static_cast<long>(rng.uniform_index(20000));
        const int n_tasks = 1 + static_cast<int>(rng.uniform_index(30));
        CHECK(mpc_overhead(n_steps, prior, per_task, n_tasks) ==
              n_steps * (prior + n_tasks * per_task) - per_task);
    }
    CHECK(mpc_overhead(2, 50000, 5000, 15) == 245000);  // full-scale accounting
    CHECK(mpc_overhead(2, 5000, 500, 15) == 24500);     // desk-scale instance
}

TEST_CASE("random curriculum draws stay in the terminal neighbourhood") {
    GridEnv env(load_board(kBoards + "/keylock10.txt"));
    const GridState goal = std::get<GridState>(env.positive_terminals()[0]);
    Rng rng(5);
    const std::vector<EnvState> starts = random_curriculum(env, 1000, rng, 2);
    CHECK(starts.size() == 1000);
    for (const EnvState& s : starts) {
        const GridState g = std::get<GridState>(s);
        CHECK(std::abs(g.x - goal.x) <= 2);  // Chebyshev radius 2 support
        CHECK(std::abs(g.y - goal.y) <= 2);
        CHECK(g.keys_mask == goal.keys_mask);  // prerequisites inherited
        CHECK_NOTHROW(env.validate_start(s));
    }
}

TEST_CASE("random curriculum is reproducible under a seed") {
    GridEnv env(load_board(kBoards + "/keylock10.txt"));
    Rng a(17), b(17);
    const auto first = random_curriculum(env, 8, a);
    const auto second = random_curriculum(env, 8, b);
    REQUIRE(first.size() == second.size());
    for (std::size_t i = 0; i < first.size(); ++i)
        CHECK(std::get<GridState>(first[i]) == std::get<GridState>(second[i]));
}

TEST_CASE("a walled-in terminal forces the single open neighbour") {
    // Lock surrounded by obstacles except one approach cell at (1,2).
    GridSpec spec;
    spec.width = 5;
    spec.height = 5;
    spec.keys = {Cell{4, 4}};
    spec.locks = {Cell{1, 1}};
    spec.obstacles = {Cell{0, 0}, Cell{1, 0}, Cell{2, 0}, Cell{0, 1}, Cell{2, 1},
                      Cell{0, 2}, Cell{1, 2}, Cell{2, 2}, Cell{3, 0}, Cell{3, 1},
                      Cell{3, 2}, Cell{0, 3}, Cell{2, 3}, Cell{3, 3}};
    spec.default_start = Cell{4, 0};
    GridEnv env(spec);
    Rng rng(7);
    const auto starts = random_curriculum(env, 50, rng, 2);
    for (const EnvState& s : starts) {
        const GridState g = std::get<GridState>(s);
        CHECK(g.x == 1);
        CHECK(g.y == 3);
    }
}

TEST_CASE("random curriculum widens the radius when the neighbourhood is blocked") {
    // Everything within Chebyshev distance 1 of the lock is an obstacle; the
    // nearest valid start sits at distance 2.
    GridSpec spec;
    spec.width = 7;
    spec.height = 7;
    spec.keys = {Cell{6, 6}};
    spec.locks = {Cell{3, 3}};
    spec.obstacles = {Cell{2, 2}, Cell{3, 2}, Cell{4, 2}, Cell{2, 3},
                      Cell{4, 3}, Cell{2, 4}, Cell{3, 4}, Cell{4, 4}};
    spec.default_start = Cell{0, 0};
    GridEnv env(spec);
    Rng rng(9);
    const auto starts = random_curriculum(env, 20, rng, 1);
    for (const EnvState& s : starts) {
        const GridState g = std::get<GridState>(s);
        const int cheb = std::max(std::abs(g.x - 3), std::abs(g.y - 3));
        CHECK(cheb == 2);
    }
}

TEST_CASE("parking random starts stay near a spot with its goal attached") {
    ParkingSpec pspec;
    pspec.n_spots = 8;
    ParkingEnv env(pspec, 11);
    Rng rng(13);
    const auto starts = random_curriculum(env, 200, rng, 2);
    for (const EnvState& s : starts) {
        const ParkingState p = std::get<ParkingState>(s);
        CHECK(std::fabs(p.x - p.goal_x) <= 2.0 + 1e-9);
        CHECK(std::fabs(p.y - p.goal_y) <= 2.0 + 1e-9);
        CHECK_FALSE(env.is_terminal_state(s));
    }
}

TEST_CASE("source tasks are distinct, valid, stratified starts") {
    GridEnv env(load_board(kBoards + "/keylock10.txt"));
    Rng rng(15);
    const std::vector<SourceTask> tasks = make_source_tasks(env, 15, rng);
    REQUIRE(tasks.size() == 15);
    std::set<std::string> keys;
    for (const SourceTask& t : tasks) {
        CHECK_NOTHROW(env.validate_start(t.start));
        keys.insert(env.state_key(t.start));
    }
    CHECK(keys.size() == 15);  // all distinct on a 10x10 board
}

TEST_CASE("max policy change with frozen learning ties to task zero") {
    GridEnv env(load_board(kBoards + "/keylock3.txt"));
    AgentConfig cfg;
    cfg.hidden_width = 8;
    cfg.lr = 1e-300;  // updates cannot move the greedy policy
    Rng init(17);
    std::unique_ptr<Agent> agent =
        std::make_unique<DqnAgent>(env.observation_dim(), env.action_size(), cfg, init);
    StateBuffer sb;
    ReplayBuffer rb(1000);
    Rng rng(19);
    const std::vector<SourceTask> tasks = make_source_tasks(env, 4, rng);
    const MpcResult result =
        max_policy_change_curriculum(env, tasks, agent, 100, 50, 2, sb, rb, rng);
    REQUIRE(result.curriculum.size() == 2);
    CHECK(result.curriculum[0] == 0);
    CHECK(result.curriculum[1] == 0);
    CHECK(result.overhead_steps == mpc_overhead(2, 100, 50, 4));
    CHECK(result.agent_steps == 2 * (100 + 50));
}

TEST_CASE("max policy change adopts the winning clone's buffers and model") {
    GridEnv env(load_board(kBoards + "/keylock3.txt"));
    AgentConfig cfg;
    cfg.hidden_width = 16;
    Rng init(21);
    std::unique_ptr<Agent> agent =
        std::make_unique<DqnAgent>(env.observation_dim(), env.action_size(), cfg, init);
    const std::uint64_t before = agent->weights_hash();
    StateBuffer sb;
    ReplayBuffer rb(5000);
    Rng rng(23);
    const std::vector<SourceTask> tasks = make_source_tasks(env, 3, rng);
    const MpcResult result =
        max_policy_change_curriculum(env, tasks, agent, 200, 80, 1, sb, rb, rng);
    CHECK(agent->weights_hash() != before);
    CHECK(rb.size() == 280);  // prior training plus the retained winner episode steps
    CHECK(result.overhead_steps == mpc_overhead(1, 200, 80, 3));
}

TEST_SUITE_END();
