#pragma once

#include <climits>
#include <functional>
#include <ostream>
#include <span>
#include <string>

#include "readc/agents.hpp"
#include "readc/buffers.hpp"
#include "readc/env.hpp"

namespace readc {

// Raised when a batch update produces a non-finite loss or parameters.
class TrainingDiverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TrainLogRow {
    long global_step = 0;  // cumulative environment steps at episode end
    int episode = 0;       // cumulative episode index
    std::string phase;
    double episode_return = 0.0;
    double epsilon = 0.0;
    double mean_loss = 0.0;
};

struct TrainLog {
    std::vector<TrainLogRow> rows;
    void write_csv(std::ostream& out) const;
};

// True when the last `window` entries produced no running-minimum
// improvement after the first of them, i.e. the most recent strict new
// minimum is at least `window - 1` entries old.
bool entropy_converged(std::span<const double> trace, int window = 10);

struct ConvergenceCriterion {
    enum class Kind { FixedIterations, EntropyNoReduction, HighestReward };

    Kind kind = Kind::FixedIterations;
    long fixed_iterations = 0;
    int window = 10;
    double reward_threshold = 0.0;
    // Queried once before training and after every episode under
    // EntropyNoReduction; typically the selected state's relative entropy.
    std::function<double(const Agent&)> entropy_probe;

    static ConvergenceCriterion fixed(long iterations);
    static ConvergenceCriterion entropy_no_reduction(std::function<double(const Agent&)> probe,
                                                     int window = 10);
    static ConvergenceCriterion highest_reward(double threshold, int window = 10);
};

struct TrainOptions {
    long step_budget = LONG_MAX;  // cap on environment steps for this call
    std::string phase = "train";
    long global_step_offset = 0;
    int episode_offset = 0;
};

struct TrainResult {
    long steps = 0;
    long optimizer_steps = 0;
    int episodes = 0;  // completed episodes
    bool converged = false;
    std::vector<double> episode_returns;
    std::vector<double> entropy_trace;
};

// Episode loop: reset, act epsilon-greedily, store the transition, record the
// pre-action state in the state buffer, sample a minibatch and take one
// optimizer step per environment step, sync targets at episode end.
TrainResult train(Agent& agent, Env& env, ConvergenceCriterion conv, StateBuffer& sb,
                  ReplayBuffer& rb, Rng& rng, TrainLog* log = nullptr,
                  const TrainOptions& options = {});

}  // namespace readc
