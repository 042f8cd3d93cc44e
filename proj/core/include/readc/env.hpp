#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "readc/rng.hpp"

namespace readc {

using StateVector = std::vector<double>;

// Discrete action index for grids, 2-vector (velocity, angular velocity)
// for the parking domain.
using Action = std::variant<int, std::vector<double>>;

struct StepResult {
    StateVector observation;
    double reward = 0.0;
    bool terminal = false;   // task-level termination (goal or pit)
    bool truncated = false;  // step cap reached
};

// Full domain state for a grid environment. Masks hold collected items.
struct GridState {
    int x = 0;
    int y = 0;
    std::uint32_t keys_mask = 0;
    std::uint32_t locks_mask = 0;
    int flags_captured = 0;  // in-order captures so far
    bool operator==(const GridState&) const = default;
};

struct ParkingState {
    double x = 0.0, y = 0.0;
    double heading = 0.0;
    double vx = 0.0, vy = 0.0;
    double ang_vel = 0.0;
    double goal_x = 0.0, goal_y = 0.0, goal_heading = 0.0;
    bool operator==(const ParkingState&) const = default;
};

using EnvState = std::variant<GridState, ParkingState>;

inline constexpr int kStepCap = 100;

class Env {
public:
    virtual ~Env() = default;

    virtual std::string domain_name() const = 0;
    virtual bool discrete_actions() const = 0;
    // Number of discrete actions, or the dimension of the action box.
    virtual int action_size() const = 0;
    virtual int observation_dim() const = 0;
    int step_cap() const { return kStepCap; }

    // Overrides the start state used by subsequent resets; nullopt restores
    // the default start. Throws std::invalid_argument on invalid starts.
    virtual void set_start(const std::optional<EnvState>& start) = 0;
    virtual StateVector reset() = 0;
    // Throws std::logic_error when stepping an episode that already ended.
    virtual StepResult step(const Action& action) = 0;

    virtual EnvState current_state() const = 0;
    virtual int step_index() const = 0;
    virtual bool episode_over() const = 0;

    virtual StateVector encode_state(const EnvState& s) const = 0;
    virtual bool is_terminal_state(const EnvState& s) const = 0;
    virtual void validate_start(const EnvState& s) const = 0;

    // Goal-completing states used by the proximity heuristic and the random
    // curriculum baseline.
    virtual std::vector<EnvState> positive_terminals() const = 0;

    // Deduplication key for the state buffer; exact for grids, lattice
    // discretized for the parking domain.
    virtual std::string state_key(const EnvState& s) const = 0;

    virtual std::unique_ptr<Env> clone() const = 0;
};

}  // namespace readc
