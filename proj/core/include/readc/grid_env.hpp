#pragma once

#include "readc/board.hpp"
#include "readc/env.hpp"

namespace readc {

// Rewards shared by both grid domains.
inline constexpr double kKeyReward = 500.0;
inline constexpr double kLockReward = 1000.0;
inline constexpr double kPitReward = -400.0;
inline constexpr double kStepReward = -10.0;
inline constexpr double kFlagRewardUnit = 10.0;  // k-th in-order capture pays 10*k

// Actions: 0 = north, 1 = east, 2 = south, 3 = west. North is y-1.
inline constexpr int kGridActions = 4;

enum class GridDomain { KeyLock, Flags };

// Deterministic grid world covering the key-lock and flags domains. Items are
// collected when the agent moves onto (or is reset onto) their cell; locks
// require every key first and flags must be taken in the board's hidden order.
class GridEnv final : public Env {
public:
    explicit GridEnv(GridSpec spec);

    std::string domain_name() const override;
    bool discrete_actions() const override { return true; }
    int action_size() const override { return kGridActions; }
    int observation_dim() const override;

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

    const GridSpec& spec() const { return spec_; }
    GridDomain domain() const { return domain_; }

    // Greedy path length (moves) from the default start through all items in
    // the cheapest order, ignoring item-collection side effects on distance.
    // Used by tooling to pick reward thresholds for a board.
    int optimal_moves_lower_bound() const;

private:
    GridSpec spec_;
    GridDomain domain_;
    std::optional<GridState> start_override_;
    GridState cur_;
    int step_index_ = 0;
    bool terminal_ = false;
    bool truncated_ = false;
    bool episode_started_ = false;

    bool obstacle_at(int x, int y) const;
    bool pit_at(int x, int y) const;
    int key_index_at(int x, int y) const;
    int lock_index_at(int x, int y) const;
    int flag_index_at(int x, int y) const;
    bool all_keys(const GridState& s) const;
    bool all_locks(const GridState& s) const;
    // Applies pick-up-on-contact to a freshly placed state.
    void collect_at(GridState& s) const;
    StateVector encode_grid(const GridState& s) const;
};

}  // namespace readc
