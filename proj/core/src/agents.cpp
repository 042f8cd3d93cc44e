#include "readc/agents.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace readc {

namespace {

std::vector<int> four_layer(int in, int hidden, int out) {
    return {in, hidden, hidden, hidden, out};
}

}  // namespace

DqnAgent::DqnAgent(int observation_dim, int n_actions, const AgentConfig& cfg, Rng& init_rng)
    : cfg_(cfg),
      n_actions_(n_actions),
      learned_(four_layer(observation_dim, cfg.hidden_width, n_actions), init_rng),
      target_(learned_),
      optimizer_(learned_),
      epsilon_(cfg.epsilon) {
    if (n_actions < 2) throw std::invalid_argument("DqnAgent: need at least two actions");
}

int DqnAgent::greedy_action(const StateVector& s) const {
    const Vec q = learned_.forward(s);
    int best = 0;
    for (int a = 1; a < n_actions_; ++a)
        if (q[a] > q[best]) best = a;  // ties keep the lowest index
    return best;
}

Action DqnAgent::select_action(const StateVector& s, Rng& rng) {
    if (rng.uniform() < epsilon_) return static_cast<int>(rng.uniform_index(n_actions_));
    return greedy_action(s);
}

LossInfo DqnAgent::update(std::span<const Transition* const> batch) {
    if (batch.empty()) throw std::invalid_argument("dqn_update: empty batch");

    Mlp::Gradients grads = learned_.zero_gradients();
    Mlp::Cache cache;
    Vec upstream(n_actions_);
    double loss = 0.0;

    for (const Transition* t : batch) {
        const int action = std::get<int>(t->action);
        double target = t->reward;
        if (!t->terminal) {
            const Vec next_q = target_.forward(t->next_state);
            target += cfg_.gamma * *std::max_element(next_q.begin(), next_q.end());
        }
        const Vec q = learned_.forward(t->state, cache);
        const double diff = q[action] - target;
        loss += 0.5 * diff * diff;

        std::fill(upstream.begin(), upstream.end(), 0.0);
        upstream[action] = diff;  // d(0.5*(q - target)^2)/dq
        learned_.backward(cache, upstream, grads);
    }

    const double inv = 1.0 / static_cast<double>(batch.size());
    grads.scale(inv);
    optimizer_.step(learned_, grads, cfg_.lr);
    return LossInfo{loss * inv, 0.0, 0.0};
}

void DqnAgent::end_episode() {
    target_ = learned_;
    epsilon_ = std::max(cfg_.epsilon_min, epsilon_ * cfg_.epsilon_decay);
}

PolicyDistribution DqnAgent::policy(const StateVector& s) const {
    return q_to_probs(learned_.forward(s));
}

std::unique_ptr<Agent> DqnAgent::clone() const {
    return std::make_unique<DqnAgent>(*this);
}

void DqnAgent::restore_networks(const Mlp& learned) {
    if (learned.input_dim() != learned_.input_dim() ||
        learned.output_dim() != learned_.output_dim())
        throw std::invalid_argument("DqnAgent::restore_networks: shape mismatch");
    learned_ = learned;
    target_ = learned;
    optimizer_ = Adamax(learned_);
}

A2cAgent::A2cAgent(int observation_dim, int action_dim, const AgentConfig& cfg, Rng& init_rng)
    : cfg_(cfg),
      action_dim_(action_dim),
      actor_(four_layer(observation_dim, cfg.hidden_width, 2 * action_dim), init_rng),
      critic_(four_layer(observation_dim, cfg.hidden_width, 1), init_rng),
      target_critic_(critic_),
      actor_opt_(actor_),
      critic_opt_(critic_),
      epsilon_(cfg.epsilon) {
    if (action_dim < 1) throw std::invalid_argument("A2cAgent: action dimension must be positive");
}

GaussianDist A2cAgent::action_distribution(const StateVector& s) const {
    const Vec raw = actor_.forward(s);
    Vec mean(raw.begin(), raw.begin() + action_dim_);
    Vec stddev(action_dim_);
    for (int d = 0; d < action_dim_; ++d) stddev[d] = softplus(raw[action_dim_ + d]) + kStddevFloor;
    return GaussianDist{std::move(mean), std::move(stddev)};
}

Action A2cAgent::select_action(const StateVector& s, Rng& rng) {
    Vec a(action_dim_);
    if (rng.uniform() < epsilon_) {
        for (double& v : a) v = rng.uniform(-1.0, 1.0);
        return a;
    }
    const GaussianDist dist = action_distribution(s);
    for (int d = 0; d < action_dim_; ++d) a[d] = rng.normal(dist.mean[d], dist.stddev[d]);
    return a;
}

double gaussian_log_density(std::span<const double> action, const GaussianDist& dist) {
    if (action.size() != dist.mean.size())
        throw std::invalid_argument("gaussian_log_density: dimension mismatch");
    double logp = 0.0;
    for (std::size_t d = 0; d < action.size(); ++d) {
        const double s = dist.stddev[d];
        const double z = (action[d] - dist.mean[d]) / s;
        logp += -0.5 * std::log(2.0 * M_PI) - std::log(s) - 0.5 * z * z;
    }
    return logp;
}

LossInfo A2cAgent::update(std::span<const Transition* const> batch) {
    if (batch.empty()) throw std::invalid_argument("a2c_update: empty batch");
    const double inv = 1.0 / static_cast<double>(batch.size());

    Mlp::Gradients actor_grads = actor_.zero_gradients();
    Mlp::Gradients critic_grads = critic_.zero_gradients();
    Mlp::Cache cache;
    double actor_loss = 0.0;
    double critic_loss = 0.0;

    for (const Transition* t : batch) {
        const auto& action = std::get<std::vector<double>>(t->action);

        // Critic target per the squared TD error; bootstrap dropped on
        // terminal transitions.
        double critic_target = t->reward;
        if (!t->terminal) critic_target += cfg_.gamma * critic_.forward(t->next_state)[0];
        const Vec v = critic_.forward(t->state, cache);
        const double delta = v[0] - critic_target;
        critic_loss += 0.5 * delta * delta;
        const Vec critic_upstream{delta};
        critic_.backward(cache, critic_upstream, critic_grads);

        // Advantage uses the target critic for the bootstrap and is treated
        // as a constant in the actor step.
        double advantage = t->reward - v[0];
        if (!t->terminal) advantage += cfg_.gamma * target_critic_.forward(t->next_state)[0];

        const Vec raw = actor_.forward(t->state, cache);
        Vec upstream(2 * action_dim_, 0.0);
        double logp = 0.0;
        for (int d = 0; d < action_dim_; ++d) {
            const double mu = raw[d];
            const double raw_sigma = raw[action_dim_ + d];
            const double sigma = softplus(raw_sigma) + kStddevFloor;
            const double z = (action[d] - mu) / sigma;
            logp += -0.5 * std::log(2.0 * M_PI) - std::log(sigma) - 0.5 * z * z;
            // loss = -logp * advantage
            const double dlogp_dmu = z / sigma;
            const double dlogp_dsigma = (z * z - 1.0) / sigma;
            upstream[d] = -advantage * dlogp_dmu;
            upstream[action_dim_ + d] = -advantage * dlogp_dsigma * sigmoid(raw_sigma);
        }
        actor_loss += -logp * advantage;
        actor_.backward(cache, upstream, actor_grads);
    }

    actor_grads.scale(inv);
    critic_grads.scale(inv);
    actor_opt_.step(actor_, actor_grads, cfg_.lr);
    critic_opt_.step(critic_, critic_grads, cfg_.lr);

    actor_loss *= inv;
    critic_loss *= inv;
    return LossInfo{actor_loss + critic_loss, actor_loss, critic_loss};
}

void A2cAgent::end_episode() {
    target_critic_ = critic_;
    epsilon_ = std::max(cfg_.epsilon_min, epsilon_ * cfg_.epsilon_decay);
}

PolicyDistribution A2cAgent::policy(const StateVector& s) const {
    return action_distribution(s);
}

Vec A2cAgent::head_values(const StateVector& s) const {
    const GaussianDist dist = action_distribution(s);
    Vec out = dist.mean;
    out.insert(out.end(), dist.stddev.begin(), dist.stddev.end());
    return out;
}

std::uint64_t A2cAgent::weights_hash() const {
    const std::uint64_t a = actor_.content_hash();
    const std::uint64_t c = critic_.content_hash();
    return a ^ (c << 1 | c >> 63);
}

std::unique_ptr<Agent> A2cAgent::clone() const {
    return std::make_unique<A2cAgent>(*this);
}

void A2cAgent::restore_networks(const Mlp& actor, const Mlp& critic) {
    if (actor.input_dim() != actor_.input_dim() || actor.output_dim() != actor_.output_dim() ||
        critic.input_dim() != critic_.input_dim())
        throw std::invalid_argument("A2cAgent::restore_networks: shape mismatch");
    actor_ = actor;
    critic_ = critic;
    target_critic_ = critic;
    actor_opt_ = Adamax(actor_);
    critic_opt_ = Adamax(critic_);
}

LossInfo dqn_update(DqnAgent& agent, std::span<const Transition* const> batch) {
    return agent.update(batch);
}

LossInfo a2c_update(A2cAgent& agent, std::span<const Transition* const> batch) {
    return agent.update(batch);
}

}  // namespace readc
