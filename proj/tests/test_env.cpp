#include <doctest.h>

#include <cmath>
#include <map>
#include <queue>
#include <set>

#include "readc/grid_env.hpp"
#include "readc/parking_env.hpp"

using namespace readc;

TEST_SUITE_BEGIN("env");

namespace {

const std::string kBoards = READC_BOARDS_DIR;

GridEnv load_env(const std::string& name) { return GridEnv(load_board(kBoards + "/" + name)); }

// All non-terminal states reachable from the default start.
std::vector<GridState> reachable_states(GridEnv& env) {
    std::vector<GridState> out;
    std::set<std::string> seen;
    std::queue<GridState> frontier;
    env.set_start(std::nullopt);
    env.reset();
    frontier.push(std::get<GridState>(env.current_state()));
    seen.insert(env.state_key(env.current_state()));
    while (!frontier.empty()) {
        const GridState s = frontier.front();
        frontier.pop();
        out.push_back(s);
        for (int a = 0; a < kGridActions; ++a) {
            GridEnv probe = env;
            probe.set_start(EnvState{s});
            probe.reset();
            const StepResult r = probe.step(a);
            if (r.terminal) continue;
            const GridState next = std::get<GridState>(probe.current_state());
            const std::string key = probe.state_key(EnvState{next});
            if (seen.insert(key).second) frontier.push(next);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("board parsing validates structure") {
    CHECK_THROWS_AS(parse_board("S.\n.."), std::invalid_argument);          // no items
    CHECK_THROWS_AS(parse_board("SK\nL2"), std::invalid_argument);          // mixed domains
    CHECK_THROWS_AS(parse_board("SK.\nL..\n..X"), std::invalid_argument);   // unknown char
    CHECK_THROWS_AS(parse_board("KL.\n...\n..."), std::invalid_argument);   // missing start
    CHECK_THROWS_AS(parse_board("S0.\n.2.\n..."), std::invalid_argument);   // flag gap
    const GridSpec ok = parse_board("S0.\n.1.\n..2");
    CHECK(ok.flags.size() == 3);
    CHECK(ok.default_start.x == 0);
}

TEST_CASE("default reset starts clean at the board start") {
    GridEnv env = load_env("keylock10.txt");
    env.reset();
    const GridState s = std::get<GridState>(env.current_state());
    CHECK(s.x == 0);
    CHECK(s.y == 0);
    CHECK(s.keys_mask == 0);
    CHECK(s.locks_mask == 0);
    CHECK(env.step_index() == 0);
}

TEST_CASE("stepping onto an adjacent key pays the key reward") {
    GridEnv env = load_env("keylock3.txt");  // S K L in the top row
    env.reset();
    const StepResult r = env.step(1);  // east onto the key
    CHECK(r.reward == kKeyReward);
    CHECK(std::get<GridState>(env.current_state()).keys_mask == 1);
}

TEST_CASE("scripted optimal trajectory reproduces the reward table exactly") {
    GridEnv env = load_env("keylock10.txt");
    env.reset();
    // E E E S S S(key) S S E E E E S S(lock)
    const int path[] = {1, 1, 1, 2, 2, 2, 2, 2, 1, 1, 1, 1, 2, 2};
    double ret = 0.0;
    StepResult last;
    for (std::size_t i = 0; i < std::size(path); ++i) {
        last = env.step(path[i]);
        ret += last.reward;
        if (i == 5) CHECK(last.reward == kKeyReward);
        else if (i == 13) CHECK(last.reward == kLockReward);
        else CHECK(last.reward == kStepReward);
    }
    CHECK(last.terminal);
    CHECK(ret == 1380.0);  // 1500 - 12 * 10
}

TEST_CASE("moving into an obstacle or off the board leaves the state unchanged") {
    GridEnv env = load_env("keylock10.txt");
    env.reset();
    const StepResult off = env.step(0);  // north off the board
    CHECK(off.reward == kStepReward);
    CHECK(std::get<GridState>(env.current_state()).x == 0);
    CHECK(std::get<GridState>(env.current_state()).y == 0);

    GridState by_wall{4, 0, 0, 0, 0};
    env.set_start(EnvState{by_wall});
    env.reset();
    const StepResult blocked = env.step(1);  // east into the wall at (5,0)
    CHECK(blocked.reward == kStepReward);
    CHECK(std::get<GridState>(env.current_state()).x == 4);
}

TEST_CASE("falling into a pit ends the episode at the pit penalty") {
    GridEnv env = load_env("keylock10.txt");
    env.set_start(EnvState{GridState{2, 5, 0, 0, 0}});
    env.reset();
    const StepResult r = env.step(2);  // south into the pit at (2,6)
    CHECK(r.reward == kPitReward);
    CHECK(r.terminal);
    CHECK_THROWS_AS(env.step(0), std::logic_error);
}

TEST_CASE("unlocking requires the key first") {
    GridEnv env = load_env("keylock3.txt");
    env.set_start(EnvState{GridState{2, 1, 0, 0, 0}});  // below the lock, no key
    env.reset();
    const StepResult r = env.step(0);  // north onto the lock cell
    CHECK(r.reward == kStepReward);
    CHECK_FALSE(r.terminal);
    CHECK(std::get<GridState>(env.current_state()).locks_mask == 0);
}

TEST_CASE("flags pay 10, 20, 30 in order and -10 out of order") {
    GridEnv env = load_env("flags3.txt");
    env.reset();

    // Wrong order first: approach flag 1 before flag 0.
    StepResult r = env.step(2);  // south
    CHECK(r.reward == kStepReward);
    r = env.step(1);  // east onto flag 1 (out of order)
    CHECK(r.reward == kStepReward);
    CHECK(std::get<GridState>(env.current_state()).flags_captured == 0);

    // Now in order: 0 at (1,0), 1 at (1,1), 2 at (2,2).
    env.reset();
    r = env.step(1);
    CHECK(r.reward == 10.0);
    r = env.step(2);
    CHECK(r.reward == 20.0);
    r = env.step(2);
    CHECK(r.reward == kStepReward);
    r = env.step(1);
    CHECK(r.reward == 30.0);
    CHECK(r.terminal);
}

TEST_CASE("episodes are cut at the step cap") {
    GridEnv env = load_env("keylock3.txt");
    env.set_start(EnvState{GridState{0, 1, 0, 0, 0}});
    env.reset();
    StepResult r;
    int steps = 0;
    while (true) {
        r = env.step(steps % 2 == 0 ? 2 : 0);  // bounce south/north below the items
        ++steps;
        if (r.terminal || r.truncated) break;
    }
    CHECK(steps == kStepCap);
    CHECK(r.truncated);
    CHECK_FALSE(r.terminal);
}

TEST_CASE("grid transitions are deterministic") {
    GridEnv env = load_env("keylock10.txt");
    for (int a = 0; a < kGridActions; ++a) {
        GridEnv one = env;
        GridEnv two = env;
        one.set_start(EnvState{GridState{4, 4, 0, 0, 0}});
        two.set_start(EnvState{GridState{4, 4, 0, 0, 0}});
        one.reset();
        two.reset();
        CHECK(one.step(a).observation == two.step(a).observation);
        CHECK(one.state_key(one.current_state()) == two.state_key(two.current_state()));
    }
}

TEST_CASE("invalid starts are rejected") {
    GridEnv env = load_env("keylock10.txt");
    CHECK_THROWS_AS(env.set_start(EnvState{GridState{5, 0, 0, 0, 0}}), std::invalid_argument);  // obstacle
    CHECK_THROWS_AS(env.set_start(EnvState{GridState{2, 6, 0, 0, 0}}), std::invalid_argument);  // pit
    CHECK_THROWS_AS(env.set_start(EnvState{GridState{-1, 0, 0, 0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(env.set_start(EnvState{GridState{0, 0, 1, 1, 0}}), std::invalid_argument);  // terminal
    CHECK_THROWS_AS(env.set_start(EnvState{GridState{0, 0, 0, 1, 0}}), std::invalid_argument);  // lock before key
    // Placement on the lock cell with the key collected completes at reset.
    CHECK_THROWS_AS(env.set_start(EnvState{GridState{7, 7, 1, 0, 0}}), std::invalid_argument);
}

TEST_CASE("key-lock encoding matches the hand-computed fixture") {
    GridSpec spec;
    spec.width = 10;
    spec.height = 10;
    spec.keys = {Cell{3, 4}};
    spec.locks = {Cell{7, 8}};
    spec.default_start = Cell{0, 0};
    GridEnv env(spec);

    const StateVector v = env.encode_state(EnvState{GridState{0, 0, 0, 0, 0}});
    REQUIRE(v.size() == 26);
    // Key displacement (+3, +4) splits into slots [N, E, S, W] = [0, 3, 4, 0].
    CHECK(v[0] == 0.0);
    CHECK(v[1] == 3.0);
    CHECK(v[2] == 4.0);
    CHECK(v[3] == 0.0);
    // Lock displacement (+7, +8).
    CHECK(v[5] == 7.0);
    CHECK(v[6] == 8.0);
    // Obstacle bits: north and west are off-board at the corner.
    CHECK(v[8] == 1.0);
    CHECK(v[9] == 0.0);
    CHECK(v[10] == 0.0);
    CHECK(v[11] == 1.0);
    // No adjacency, no pits, nothing collected.
    for (int i = 12; i < 24; ++i) CHECK(v[i] == 0.0);
    CHECK(v[24] == 0.0);
    CHECK(v[25] == 0.0);

    // Key collected: key features zero out, counter ticks.
    const StateVector after = env.encode_state(EnvState{GridState{3, 4, 1, 0, 0}});
    CHECK(after[0] == 0.0);
    CHECK(after[1] == 0.0);
    CHECK(after[2] == 0.0);
    CHECK(after[3] == 0.0);
    CHECK(after[24] == 1.0);
}

TEST_CASE("an enclosed cell reports obstacles in every direction") {
    GridSpec spec;
    spec.width = 3;
    spec.height = 3;
    spec.keys = {Cell{0, 0}};
    spec.locks = {Cell{2, 2}};
    spec.obstacles = {Cell{1, 0}, Cell{0, 1}, Cell{2, 1}, Cell{1, 2}};
    spec.default_start = Cell{1, 1};
    GridEnv env(spec);
    const StateVector v = env.encode_state(EnvState{GridState{1, 1, 0, 0, 0}});
    CHECK(v[8] == 1.0);
    CHECK(v[9] == 1.0);
    CHECK(v[10] == 1.0);
    CHECK(v[11] == 1.0);
}

TEST_CASE("encoding is injective on the reachable states of the fixtures") {
    for (const char* board : {"keylock10.txt", "flags10.txt"}) {
        GridEnv env = load_env(board);
        const std::vector<GridState> states = reachable_states(env);
        CHECK(states.size() > 50);
        std::map<StateVector, GridState> index;
        for (const GridState& s : states) {
            const StateVector v = env.encode_state(EnvState{s});
            const auto [it, fresh] = index.emplace(v, s);
            if (!fresh) {
                CAPTURE(board);
                CHECK(fresh);  // collision: two states encode identically
            }
        }
    }
}

TEST_CASE("positive terminals describe the goal-completing states") {
    GridEnv keylock = load_env("keylock10.txt");
    const auto kl = keylock.positive_terminals();
    REQUIRE(kl.size() == 1);
    const GridState g = std::get<GridState>(kl[0]);
    CHECK(g.x == 7);
    CHECK(g.y == 7);
    CHECK(g.keys_mask == 1);
    CHECK(g.locks_mask == 0);

    GridEnv flags = load_env("flags10.txt");
    const auto fl = flags.positive_terminals();
    REQUIRE(fl.size() == 1);
    const GridState f = std::get<GridState>(fl[0]);
    CHECK(f.x == 3);
    CHECK(f.y == 0);
    CHECK(f.flags_captured == 2);

    ParkingSpec pspec;
    pspec.n_spots = 8;
    ParkingEnv parking(pspec, 1);
    const auto pt = parking.positive_terminals();
    CHECK(pt.size() == 8);
    for (const EnvState& t : pt) CHECK(parking.is_terminal_state(t));
}

TEST_CASE("parking resets are reproducible under the same seed") {
    ParkingSpec spec;
    spec.n_spots = 8;
    ParkingEnv a(spec, 99);
    ParkingEnv b(spec, 99);
    a.reset();
    b.reset();
    CHECK(std::get<ParkingState>(a.current_state()) == std::get<ParkingState>(b.current_state()));

    ParkingEnv c(spec, 100);
    c.reset();
    CHECK(std::get<ParkingState>(c.current_state()).heading !=
          std::get<ParkingState>(a.current_state()).heading);
}

TEST_CASE("parking reward grows toward zero on a straight approach") {
    ParkingSpec spec;
    spec.n_spots = 8;
    ParkingEnv env(spec, 3);
    const SpotPose goal = env.spots()[0];  // top row, heading pi/2
    ParkingState start;
    start.x = goal.x;
    start.y = 0.0;
    start.heading = M_PI / 2.0;
    start.goal_x = goal.x;
    start.goal_y = goal.y;
    start.goal_heading = goal.heading;
    env.set_start(EnvState{start});
    env.reset();

    double prev = -1e9;
    bool done = false;
    for (int i = 0; i < 20 && !done; ++i) {
        const StepResult r = env.step(std::vector<double>{1.0, 0.0});
        CHECK(r.reward > prev);  // strictly less negative while approaching
        prev = r.reward;
        done = r.terminal;
    }
    CHECK(done);
}

TEST_CASE("parking actions are clamped to the unit box") {
    ParkingSpec spec;
    spec.n_spots = 4;
    ParkingEnv env(spec, 5);
    ParkingState start;
    start.heading = 0.0;
    start.goal_x = env.spots()[0].x;
    start.goal_y = env.spots()[0].y;
    start.goal_heading = env.spots()[0].heading;
    env.set_start(EnvState{start});
    env.reset();
    env.step(std::vector<double>{25.0, 0.0});  // clamps to v = 1
    const ParkingState s = std::get<ParkingState>(env.current_state());
    CHECK(s.x == doctest::Approx(spec.speed_scale * spec.dt));  // one full-speed tick
}

TEST_CASE("parking step cap truncates the episode") {
    ParkingSpec spec;
    spec.n_spots = 4;
    ParkingEnv env(spec, 6);
    ParkingState start;
    start.x = -10.0;
    start.heading = M_PI;  // driving away from the lot
    start.goal_x = env.spots()[0].x;
    start.goal_y = env.spots()[0].y;
    start.goal_heading = env.spots()[0].heading;
    env.set_start(EnvState{start});
    env.reset();
    StepResult r;
    int steps = 0;
    do {
        r = env.step(std::vector<double>{1.0, 0.0});
        ++steps;
    } while (!r.terminal && !r.truncated);
    CHECK(steps == kStepCap);
    CHECK(r.truncated);
}

TEST_SUITE_END();
