#pragma once

#include "readc/curriculum.hpp"

namespace readc {

// Start states drawn uniformly from valid, non-terminal neighbourhoods of the
// positive-reward terminals (Chebyshev radius `radius` for grids, a position
// box of the same half-width for parking). The radius widens until a valid
// neighbour exists.
std::vector<EnvState> random_curriculum(const Env& env, int length, Rng& rng, int radius = 2);

// Derived source tasks for the max-policy-change baseline: the target
// environment with programmatically varied start states (grids) or
// start-heading/goal pairs (parking).
struct SourceTask {
    int id = 0;
    EnvState start;
};

std::vector<SourceTask> make_source_tasks(const Env& env, int count, Rng& rng);

// overhead = n_steps * (steps_prior + n_tasks * steps_per_task) - steps_per_task
long mpc_overhead(int n_steps, long steps_prior, long steps_per_task, int n_tasks);

struct MpcResult {
    std::vector<int> curriculum;  // chosen task ids, in order
    long overhead_steps = 0;
    long agent_steps = 0;  // steps the surviving agent actually trained
};

// Task sequencing by maximal greedy-policy change: per curriculum step, train
// the agent on the target for steps_prior, train a clone of it on every
// source task for steps_per_task, and keep the task whose clone changed the
// greedy action on the most probe states. The winning clone's training is
// retained rather than re-done; agent and buffers are replaced by the
// winner's copies.
MpcResult max_policy_change_curriculum(Env& target_env, std::span<const SourceTask> tasks,
                                       std::unique_ptr<Agent>& agent, long steps_prior,
                                       long steps_per_task, int n_steps, StateBuffer& sb,
                                       ReplayBuffer& rb, Rng& rng, TrainLog* log = nullptr);

}  // namespace readc
