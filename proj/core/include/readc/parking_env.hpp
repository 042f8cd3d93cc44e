#pragma once

#include "readc/env.hpp"

namespace readc {

struct ParkingSpec {
    int n_spots = 30;
    double row_offset = 4.0;    // |y| of the two spot rows
    double spot_spacing = 1.2;  // x distance between neighbouring spots
    double speed_scale = 5.0;   // units/s at full commanded velocity
    double dt = 0.1;
    double distance_cost = 1.0;  // reward = -cost * distance to goal
    double goal_pos_tol = 0.5;
    double goal_heading_tol = 0.26;  // radians
};

struct SpotPose {
    double x = 0.0, y = 0.0, heading = 0.0;
};

// Continuous lot with two rows of spots. The agent starts at the origin with
// a random heading; a goal spot is drawn per episode. Actions are
// (velocity, angular velocity), each clamped to [-1, 1].
class ParkingEnv final : public Env {
public:
    ParkingEnv(ParkingSpec spec, std::uint64_t seed);

    std::string domain_name() const override { return "parking"; }
    bool discrete_actions() const override { return false; }
    int action_size() const override { return 2; }
    int observation_dim() const override { return 9; }

    void set_start(const std::optional<EnvState>& start) override;
    StateVector reset() override;
    StepResult step(const Action& action) override;

    EnvState current_state() const override { return cur_; }
    int step_index() const override { return step_index_; }
    bool episode_over() const override { return terminal_ || truncated_; }

    StateVector encode_state(const EnvState& s) const override;
    bool is_terminal_state(const EnvState& s) const override;
    void validate_start(const EnvState& s) const override;
    std::vector<EnvState> positive_terminals() const override;
    std::string state_key(const EnvState& s) const override;
    std::unique_ptr<Env> clone() const override;

    const ParkingSpec& spec() const { return spec_; }
    const std::vector<SpotPose>& spots() const { return spots_; }

private:
    ParkingSpec spec_;
    std::vector<SpotPose> spots_;
    Rng rng_;
    std::optional<ParkingState> start_override_;
    ParkingState cur_;
    int step_index_ = 0;
    bool terminal_ = false;
    bool truncated_ = false;
    bool episode_started_ = false;

    double goal_distance(const ParkingState& s) const;
};

double wrap_angle(double a);  // to (-pi, pi]

}  // namespace readc
