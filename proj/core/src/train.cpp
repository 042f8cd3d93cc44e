#include "readc/train.hpp"

#include <cmath>
#include <cstdio>

namespace readc {

void TrainLog::write_csv(std::ostream& out) const {
    out << "global_step,episode,phase,return,epsilon,loss\n";
    char buf[160];
    for (const TrainLogRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%ld,%d,%s,%.6f,%.6f,%.6f\n", r.global_step, r.episode,
                      r.phase.c_str(), r.episode_return, r.epsilon, r.mean_loss);
        out << buf;
    }
}

bool entropy_converged(std::span<const double> trace, int window) {
    if (static_cast<int>(trace.size()) < window) return false;
    double best = trace[0];
    std::size_t last_improvement = 0;
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i] < best) {
            best = trace[i];
            last_improvement = i;
        }
    }
    return trace.size() - 1 - last_improvement >= static_cast<std::size_t>(window - 1);
}

ConvergenceCriterion ConvergenceCriterion::fixed(long iterations) {
    ConvergenceCriterion c;
    c.kind = Kind::FixedIterations;
    c.fixed_iterations = iterations;
    return c;
}

ConvergenceCriterion ConvergenceCriterion::entropy_no_reduction(
    std::function<double(const Agent&)> probe, int window) {
    ConvergenceCriterion c;
    c.kind = Kind::EntropyNoReduction;
    c.window = window;
    c.entropy_probe = std::move(probe);
    return c;
}

ConvergenceCriterion ConvergenceCriterion::highest_reward(double threshold, int window) {
    ConvergenceCriterion c;
    c.kind = Kind::HighestReward;
    c.window = window;
    c.reward_threshold = threshold;
    return c;
}

TrainResult train(Agent& agent, Env& env, ConvergenceCriterion conv, StateBuffer& sb,
                  ReplayBuffer& rb, Rng& rng, TrainLog* log, const TrainOptions& options) {
    TrainResult result;
    const int batch_size = agent.config().batch_size;
    int reward_streak = 0;

    if (conv.kind == ConvergenceCriterion::Kind::EntropyNoReduction) {
        if (!conv.entropy_probe)
            throw std::invalid_argument("train: entropy criterion without a probe");
        result.entropy_trace.push_back(conv.entropy_probe(agent));
    }
    if (conv.kind == ConvergenceCriterion::Kind::FixedIterations && conv.fixed_iterations <= 0) {
        result.converged = true;
        return result;
    }

    bool stop = false;
    while (!stop) {
        StateVector obs = env.reset();
        double episode_return = 0.0;
        double loss_sum = 0.0;
        long loss_count = 0;
        bool episode_done = false;

        while (!episode_done) {
            sb.record(env, env.current_state());
            const Action action = agent.select_action(obs, rng);
            const StepResult sr = env.step(action);
            rb.push(Transition{obs, action, sr.reward, sr.terminal, sr.observation});
            episode_return += sr.reward;

            if (rb.size() >= static_cast<std::size_t>(batch_size)) {
                const auto batch = rb.sample(batch_size, rng);
                const LossInfo info = agent.update(batch);
                ++result.optimizer_steps;
                loss_sum += info.loss;
                ++loss_count;
                if (!std::isfinite(info.loss))
                    throw TrainingDiverged("non-finite loss at step " +
                                           std::to_string(result.steps));
            }

            obs = sr.observation;
            ++result.steps;
            episode_done = sr.terminal || sr.truncated;

            if (conv.kind == ConvergenceCriterion::Kind::FixedIterations &&
                result.steps >= conv.fixed_iterations) {
                result.converged = true;
                stop = true;
                break;  // stops mid-episode: exactly the requested step count
            }
            if (result.steps >= options.step_budget) {
                stop = true;
                break;
            }
        }

        if (!episode_done) break;  // budget or iteration cut mid-episode

        agent.end_episode();
        ++result.episodes;
        result.episode_returns.push_back(episode_return);
        if (log) {
            log->rows.push_back(TrainLogRow{options.global_step_offset + result.steps,
                                            options.episode_offset + result.episodes,
                                            options.phase, episode_return, agent.epsilon(),
                                            loss_count ? loss_sum / loss_count : 0.0});
        }

        switch (conv.kind) {
            case ConvergenceCriterion::Kind::FixedIterations:
                break;
            case ConvergenceCriterion::Kind::EntropyNoReduction:
                result.entropy_trace.push_back(conv.entropy_probe(agent));
                if (entropy_converged(result.entropy_trace, conv.window)) {
                    result.converged = true;
                    stop = true;
                }
                break;
            case ConvergenceCriterion::Kind::HighestReward:
                reward_streak = episode_return >= conv.reward_threshold ? reward_streak + 1 : 0;
                if (reward_streak >= conv.window) {
                    result.converged = true;
                    stop = true;
                }
                break;
        }
    }
    return result;
}

}  // namespace readc
