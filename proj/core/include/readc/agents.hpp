#pragma once

#include <memory>
#include <span>

#include "readc/buffers.hpp"
#include "readc/nn.hpp"
#include "readc/policy_math.hpp"

namespace readc {

struct AgentConfig {
    double epsilon = 1.0;
    double epsilon_decay = 0.995;  // applied once per episode
    double epsilon_min = 0.01;
    double lr = 0.005;
    double gamma = 0.99;
    int batch_size = 16;
    int hidden_width = 128;  // 256 for the parking domain
};

struct LossInfo {
    double loss = 0.0;  // DQN loss, or actor+critic total
    double actor_loss = 0.0;
    double critic_loss = 0.0;
};

class Agent {
public:
    virtual ~Agent() = default;

    virtual Action select_action(const StateVector& s, Rng& rng) = 0;
    // One optimizer step on the given minibatch.
    virtual LossInfo update(std::span<const Transition* const> batch) = 0;
    // Target sync plus epsilon decay; call when an episode finishes.
    virtual void end_episode() = 0;

    virtual PolicyDistribution policy(const StateVector& s) const = 0;
    // Raw head values used for uncertainty features: Q-vector for DQN,
    // concatenated (mean, stddev) for the actor-critic.
    virtual Vec head_values(const StateVector& s) const = 0;

    virtual double epsilon() const = 0;
    virtual const AgentConfig& config() const = 0;
    virtual std::uint64_t weights_hash() const = 0;
    virtual bool weights_finite() const = 0;
    virtual std::unique_ptr<Agent> clone() const = 0;
};

// Dual deep Q-network over a discrete action set. The target network is a
// snapshot of the learned network, refreshed at episode end.
class DqnAgent final : public Agent {
public:
    DqnAgent(int observation_dim, int n_actions, const AgentConfig& cfg, Rng& init_rng);

    Action select_action(const StateVector& s, Rng& rng) override;
    LossInfo update(std::span<const Transition* const> batch) override;
    void end_episode() override;

    PolicyDistribution policy(const StateVector& s) const override;
    Vec head_values(const StateVector& s) const override { return q_values(s); }
    Vec q_values(const StateVector& s) const { return learned_.forward(s); }

    double epsilon() const override { return epsilon_; }
    const AgentConfig& config() const override { return cfg_; }
    std::uint64_t weights_hash() const override { return learned_.content_hash(); }
    bool weights_finite() const override { return learned_.all_finite(); }
    std::unique_ptr<Agent> clone() const override;

    const Mlp& learned_net() const { return learned_; }
    const Mlp& target_net() const { return target_; }
    int greedy_action(const StateVector& s) const;
    // Replaces both networks and resets the optimizer state.
    void restore_networks(const Mlp& learned);

private:
    AgentConfig cfg_;
    int n_actions_;
    Mlp learned_;
    Mlp target_;
    Adamax optimizer_;
    double epsilon_;
};

// Advantage actor-critic over a continuous action box [-1, 1]^d. The actor
// head emits means and raw stddevs; stddevs pass through softplus with a
// floor so sampling stays well defined.
class A2cAgent final : public Agent {
public:
    A2cAgent(int observation_dim, int action_dim, const AgentConfig& cfg, Rng& init_rng);

    Action select_action(const StateVector& s, Rng& rng) override;
    LossInfo update(std::span<const Transition* const> batch) override;
    void end_episode() override;

    PolicyDistribution policy(const StateVector& s) const override;
    Vec head_values(const StateVector& s) const override;

    double epsilon() const override { return epsilon_; }
    const AgentConfig& config() const override { return cfg_; }
    std::uint64_t weights_hash() const override;
    bool weights_finite() const override { return actor_.all_finite() && critic_.all_finite(); }
    std::unique_ptr<Agent> clone() const override;

    GaussianDist action_distribution(const StateVector& s) const;
    double value(const StateVector& s) const { return critic_.forward(s)[0]; }

    const Mlp& actor_net() const { return actor_; }
    const Mlp& critic_net() const { return critic_; }
    const Mlp& target_critic_net() const { return target_critic_; }
    void restore_networks(const Mlp& actor, const Mlp& critic);

private:
    AgentConfig cfg_;
    int action_dim_;
    Mlp actor_;
    Mlp critic_;
    Mlp target_critic_;
    Adamax actor_opt_;
    Adamax critic_opt_;
    double epsilon_;
};

// Free-function batch-update entry points.
LossInfo dqn_update(DqnAgent& agent, std::span<const Transition* const> batch);
LossInfo a2c_update(A2cAgent& agent, std::span<const Transition* const> batch);

// Gaussian log-density, summed over dimensions.
double gaussian_log_density(std::span<const double> action, const GaussianDist& dist);

}  // namespace readc
