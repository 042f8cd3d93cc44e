#include "readc/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "readc/grid_env.hpp"
#include "readc/parking_env.hpp"

namespace readc {

namespace {

std::vector<EnvState> grid_neighbourhood(const GridEnv& env, const GridState& anchor,
                                         int radius) {
    std::vector<EnvState> valid;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            GridState s = anchor;
            s.x = anchor.x + dx;
            s.y = anchor.y + dy;
            try {
                env.validate_start(EnvState{s});
            } catch (const std::invalid_argument&) {
                continue;
            }
            valid.emplace_back(s);
        }
    }
    return valid;
}

EnvState draw_parking_start(const ParkingEnv& env, const ParkingState& anchor, int radius,
                            Rng& rng) {
    for (int attempt = 0; attempt < 256; ++attempt) {
        ParkingState s;
        s.x = anchor.x + rng.uniform(-radius, radius);
        s.y = anchor.y + rng.uniform(-radius, radius);
        s.heading = rng.uniform(-M_PI, M_PI);
        s.goal_x = anchor.goal_x;
        s.goal_y = anchor.goal_y;
        s.goal_heading = anchor.goal_heading;
        try {
            env.validate_start(EnvState{s});
            return EnvState{s};
        } catch (const std::invalid_argument&) {
        }
    }
    throw std::runtime_error("random_curriculum: no valid parking start found");
}

}  // namespace

std::vector<EnvState> random_curriculum(const Env& env, int length, Rng& rng, int radius) {
    if (length < 1) throw std::invalid_argument("random_curriculum: length must be >= 1");
    const std::vector<EnvState> anchors = env.positive_terminals();
    if (anchors.empty()) throw std::invalid_argument("random_curriculum: no positive terminals");

    std::vector<EnvState> starts;
    starts.reserve(length);
    for (int i = 0; i < length; ++i) {
        const EnvState& anchor = anchors[rng.uniform_index(anchors.size())];
        if (const auto* g = std::get_if<GridState>(&anchor)) {
            const auto* grid = dynamic_cast<const GridEnv*>(&env);
            int r = radius;
            std::vector<EnvState> valid = grid_neighbourhood(*grid, *g, r);
            while (valid.empty() && r < std::max(grid->spec().width, grid->spec().height)) {
                ++r;  // widen until a valid neighbour exists
                valid = grid_neighbourhood(*grid, *g, r);
            }
            if (valid.empty()) throw std::runtime_error("random_curriculum: no valid grid start");
            starts.push_back(valid[rng.uniform_index(valid.size())]);
        } else {
            const auto* parking = dynamic_cast<const ParkingEnv*>(&env);
            starts.push_back(
                draw_parking_start(*parking, std::get<ParkingState>(anchor), radius, rng));
        }
    }
    return starts;
}

std::vector<SourceTask> make_source_tasks(const Env& env, int count, Rng& rng) {
    std::vector<SourceTask> tasks;
    tasks.reserve(count);
    if (const auto* grid = dynamic_cast<const GridEnv*>(&env)) {
        // Stratify start cells over the valid cells in row-major order.
        std::vector<GridState> valid;
        for (int y = 0; y < grid->spec().height; ++y) {
            for (int x = 0; x < grid->spec().width; ++x) {
                GridState s{x, y, 0, 0, 0};
                try {
                    grid->validate_start(EnvState{s});
                    valid.push_back(s);
                } catch (const std::invalid_argument&) {
                }
            }
        }
        if (valid.empty()) throw std::runtime_error("make_source_tasks: no valid cells");
        for (int i = 0; i < count; ++i) {
            const std::size_t idx =
                static_cast<std::size_t>((static_cast<double>(i) + 0.5) * valid.size() / count);
            tasks.push_back(SourceTask{i, EnvState{valid[std::min(idx, valid.size() - 1)]}});
        }
    } else if (const auto* parking = dynamic_cast<const ParkingEnv*>(&env)) {
        const auto& spots = parking->spots();
        for (int i = 0; i < count; ++i) {
            ParkingState s;
            s.heading = -M_PI + 2.0 * M_PI * (static_cast<double>(i) + 0.5) / count;
            const SpotPose& goal = spots[i % spots.size()];
            s.goal_x = goal.x;
            s.goal_y = goal.y;
            s.goal_heading = goal.heading;
            tasks.push_back(SourceTask{i, EnvState{s}});
        }
    } else {
        throw std::invalid_argument("make_source_tasks: unknown environment kind");
    }
    (void)rng;
    return tasks;
}

long mpc_overhead(int n_steps, long steps_prior, long steps_per_task, int n_tasks) {
    return static_cast<long>(n_steps) * (steps_prior + static_cast<long>(n_tasks) * steps_per_task) -
           steps_per_task;
}

namespace {

// Greedy action fingerprint; for continuous policies the actor mean is the
// fingerprint and a component shift above 0.1 counts as a change.
bool action_changed(const Agent& before_agent, const Agent& after_agent, const StateVector& obs) {
    const PolicyDistribution before = before_agent.policy(obs);
    if (std::holds_alternative<DiscreteDist>(before)) {
        const auto& b = std::get<DiscreteDist>(before).probs;
        const auto& a = std::get<DiscreteDist>(after_agent.policy(obs)).probs;
        const auto argmax = [](const Vec& v) {
            return std::distance(v.begin(), std::max_element(v.begin(), v.end()));
        };
        return argmax(b) != argmax(a);
    }
    const auto& b = std::get<GaussianDist>(before).mean;
    const auto& a = std::get<GaussianDist>(after_agent.policy(obs)).mean;
    for (std::size_t d = 0; d < b.size(); ++d)
        if (std::fabs(b[d] - a[d]) > 0.1) return true;
    return false;
}

}  // namespace

MpcResult max_policy_change_curriculum(Env& target_env, std::span<const SourceTask> tasks,
                                       std::unique_ptr<Agent>& agent, long steps_prior,
                                       long steps_per_task, int n_steps, StateBuffer& sb,
                                       ReplayBuffer& rb, Rng& rng, TrainLog* log) {
    if (tasks.empty()) throw std::invalid_argument("max_policy_change: no source tasks");
    if (steps_prior <= 0 || steps_per_task <= 0)
        throw std::invalid_argument("max_policy_change: step counts must be positive");

    MpcResult result;
    int episodes = 0;
    for (int step = 0; step < n_steps; ++step) {
        target_env.set_start(std::nullopt);
        TrainOptions prior_opt;
        prior_opt.phase = "mpc_prior_" + std::to_string(step + 1);
        prior_opt.global_step_offset = result.agent_steps;
        prior_opt.episode_offset = episodes;
        const TrainResult prior = train(*agent, target_env, ConvergenceCriterion::fixed(steps_prior),
                                        sb, rb, rng, log, prior_opt);
        result.agent_steps += prior.steps;
        episodes += prior.episodes;

        // Probe set: parking limits itself to 500 sampled states, grids use
        // the whole state buffer.
        std::vector<StateVector> probe;
        if (target_env.discrete_actions()) {
            probe.reserve(sb.size());
            for (std::size_t i = 0; i < sb.size(); ++i) probe.push_back(sb.entry(i).observation);
        } else {
            const auto idx = rng.sample_without_replacement(sb.size(), std::min<std::size_t>(500, sb.size()));
            for (std::size_t i : idx) probe.push_back(sb.entry(i).observation);
        }

        int best_task = 0;
        long best_changes = -1;
        std::unique_ptr<Agent> best_clone;
        StateBuffer best_sb;
        ReplayBuffer best_rb(rb.capacity());
        for (const SourceTask& task : tasks) {
            std::unique_ptr<Agent> clone = agent->clone();
            std::unique_ptr<Env> env_copy = target_env.clone();
            env_copy->set_start(task.start);
            StateBuffer sb_copy = sb;
            ReplayBuffer rb_copy = rb;
            Rng task_rng = rng.split(1000 + task.id);
            train(*clone, *env_copy, ConvergenceCriterion::fixed(steps_per_task), sb_copy,
                  rb_copy, task_rng, nullptr, {});

            long changes = 0;
            for (const StateVector& obs : probe)
                if (action_changed(*agent, *clone, obs)) ++changes;

            if (changes > best_changes) {  // ties keep the lowest task id
                best_changes = changes;
                best_task = task.id;
                best_clone = std::move(clone);
                best_sb = std::move(sb_copy);
                best_rb = std::move(rb_copy);
            }
        }

        result.curriculum.push_back(best_task);
        agent = std::move(best_clone);  // winner training retained, not re-done
        sb = std::move(best_sb);
        rb = std::move(best_rb);
        result.agent_steps += steps_per_task;
    }

    result.overhead_steps =
        mpc_overhead(n_steps, steps_prior, steps_per_task, static_cast<int>(tasks.size()));
    target_env.set_start(std::nullopt);
    return result;
}

}  // namespace readc
