#include "readc/experiment.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

#include "readc/grid_env.hpp"
#include "readc/parking_env.hpp"

namespace readc {

std::unique_ptr<Env> make_env(const ExperimentConfig& cfg, long seed) {
    if (cfg.domain == "parking") {
        ParkingSpec spec;
        spec.n_spots = cfg.n_spots;
        spec.row_offset = cfg.row_offset;
        return std::make_unique<ParkingEnv>(spec, static_cast<std::uint64_t>(seed));
    }
    auto env = std::make_unique<GridEnv>(load_board(cfg.board));
    if (env->domain_name() != cfg.domain)
        throw std::invalid_argument("config: board '" + cfg.board + "' is a " +
                                    env->domain_name() + " board, not " + cfg.domain);
    return env;
}

AgentConfig agent_config_from(const ExperimentConfig& cfg, const Env& env) {
    AgentConfig a;
    a.epsilon = cfg.epsilon;
    a.epsilon_decay = cfg.epsilon_decay;
    a.epsilon_min = cfg.epsilon_min;
    a.lr = cfg.alpha;
    a.gamma = cfg.gamma;
    a.batch_size = cfg.batch_size;
    a.hidden_width = cfg.hidden_width > 0 ? cfg.hidden_width
                                          : (env.discrete_actions() ? 128 : 256);
    return a;
}

std::unique_ptr<Agent> make_agent(const ExperimentConfig& cfg, const Env& env, Rng& init_rng) {
    const AgentConfig a = agent_config_from(cfg, env);
    if (env.discrete_actions())
        return std::make_unique<DqnAgent>(env.observation_dim(), env.action_size(), a, init_rng);
    return std::make_unique<A2cAgent>(env.observation_dim(), env.action_size(), a, init_rng);
}

CurriculumConfig curriculum_config_from(const ExperimentConfig& cfg) {
    CurriculumConfig c;
    c.variant = cfg.algorithm == "readc-sa" ? Variant::SelfAssessed : Variant::TeacherDependent;
    c.max_length = cfg.max_length;
    c.eta = cfg.eta;
    c.beta = cfg.beta;
    if (cfg.heuristic == "proximity") c.heuristic = Heuristic::Proximity;
    else if (cfg.heuristic == "max-distance") c.heuristic = Heuristic::MaxDistance;
    else c.heuristic = Heuristic::MaxEntropy;
    if (cfg.clustering == "cutoff") c.clustering.mode = ClusterSettings::Mode::Cutoff;
    else if (cfg.clustering == "count") c.clustering.mode = ClusterSettings::Mode::Count;
    else c.clustering.mode = ClusterSettings::Mode::Off;
    c.clustering.cutoff = cfg.cluster_cutoff;
    c.clustering.count = static_cast<std::size_t>(cfg.cluster_count);
    c.candidate_cap = static_cast<std::size_t>(cfg.candidate_subset);
    c.entropy_window = cfg.entropy_window;
    c.reward_threshold = cfg.convergence_reward;
    c.reward_window = cfg.convergence_window;
    c.step_budget = cfg.step_budget;
    c.gaussian_drop_half_term = cfg.gaussian_kl_drop_constant;
    return c;
}

namespace {

double tail_mean(const std::vector<TrainLogRow>& rows, std::size_t tail) {
    if (rows.empty()) return 0.0;
    const std::size_t n = std::min(tail, rows.size());
    double sum = 0.0;
    for (std::size_t i = rows.size() - n; i < rows.size(); ++i) sum += rows[i].episode_return;
    return sum / static_cast<double>(n);
}

}  // namespace

RunOutput execute_run(const ExperimentConfig& cfg, int run_index, const Agent* teacher,
                      const UncertaintyPredictor* regressor) {
    const long seed = cfg.base_seed + run_index;
    RunOutput out;
    out.summary.run_id = run_index;
    out.summary.seed = seed;
    out.summary.algorithm = cfg.algorithm;

    std::unique_ptr<Env> env = make_env(cfg, seed);
    Rng master(static_cast<std::uint64_t>(seed));
    Rng init_rng = master.split(1);  // weights depend on the seed alone
    Rng run_rng = master.split(2);

    std::unique_ptr<Agent> agent = make_agent(cfg, *env, init_rng);
    out.summary.init_weight_hash = agent->weights_hash();

    TrainLog log;
    StateBuffer sb;
    ReplayBuffer rb(static_cast<std::size_t>(cfg.buffer_size));
    long overhead = 0;

    try {
        if (cfg.algorithm == "none") {
            TrainOptions opt;
            opt.step_budget = cfg.step_budget;
            opt.phase = "target";
            train(*agent, *env,
                  ConvergenceCriterion::highest_reward(cfg.convergence_reward,
                                                       cfg.convergence_window),
                  sb, rb, run_rng, &log, opt);
        } else if (cfg.algorithm == "readc-td" || cfg.algorithm == "readc-sa") {
            if (cfg.algorithm == "readc-td" && !teacher)
                throw std::invalid_argument("readc-td requires a teacher model");
            if (cfg.algorithm == "readc-sa" && !regressor)
                throw std::invalid_argument("readc-sa requires a regressor model");
            ReadcContext ctx;
            ctx.teacher = teacher;
            ctx.regressor = regressor;
            out.plan = run_readc(*env, *agent, curriculum_config_from(cfg), ctx, sb, rb, run_rng,
                                 &log, &out.selections);
        } else if (cfg.algorithm == "random") {
            long used = 0;
            int episodes = 0;
            TrainOptions opt;
            opt.phase = "warmup";
            opt.step_budget = cfg.step_budget;
            TrainResult warm = train(*agent, *env, ConvergenceCriterion::fixed(cfg.eta), sb, rb,
                                     run_rng, &log, opt);
            used += warm.steps;
            episodes += warm.episodes;

            const std::vector<EnvState> starts =
                random_curriculum(*env, cfg.max_length, run_rng, cfg.random_radius);
            const long per_step = cfg.random_step_iters > 0 ? cfg.random_step_iters : cfg.beta;
            for (std::size_t i = 0; i < starts.size() && used < cfg.step_budget; ++i) {
                env->set_start(starts[i]);
                TrainOptions sopt;
                sopt.phase = "curriculum_" + std::to_string(i + 1);
                sopt.step_budget = cfg.step_budget - used;
                sopt.global_step_offset = used;
                sopt.episode_offset = episodes;
                TrainResult step = train(*agent, *env, ConvergenceCriterion::fixed(per_step), sb,
                                         rb, run_rng, &log, sopt);
                used += step.steps;
                episodes += step.episodes;
            }
            env->set_start(std::nullopt);
            if (used < cfg.step_budget) {
                TrainOptions fopt;
                fopt.phase = "final";
                fopt.step_budget = cfg.step_budget - used;
                fopt.global_step_offset = used;
                fopt.episode_offset = episodes;
                train(*agent, *env,
                      ConvergenceCriterion::highest_reward(cfg.convergence_reward,
                                                           cfg.convergence_window),
                      sb, rb, run_rng, &log, fopt);
            }
        } else if (cfg.algorithm == "max-policy-change") {
            const std::vector<SourceTask> tasks =
                make_source_tasks(*env, cfg.n_source_tasks, run_rng);
            const MpcResult mpc = max_policy_change_curriculum(
                *env, tasks, agent, cfg.steps_prior, cfg.steps_per_task, cfg.mpc_steps, sb, rb,
                run_rng, &log);
            overhead = mpc.overhead_steps;
            if (mpc.agent_steps < cfg.step_budget) {
                TrainOptions fopt;
                fopt.phase = "final";
                fopt.step_budget = cfg.step_budget - mpc.agent_steps;
                fopt.global_step_offset = mpc.agent_steps;
                fopt.episode_offset = static_cast<int>(log.rows.size());
                train(*agent, *env,
                      ConvergenceCriterion::highest_reward(cfg.convergence_reward,
                                                           cfg.convergence_window),
                      sb, rb, run_rng, &log, fopt);
            }
        } else {
            throw std::invalid_argument("unknown algorithm '" + cfg.algorithm + "'");
        }
    } catch (const TrainingDiverged& e) {
        out.summary.failed = true;
        out.summary.error = e.what();
    }

    // Run-level convergence: first window of consecutive episodes at or above
    // the threshold, anywhere in the run.
    std::vector<double> returns;
    std::vector<long> steps;
    returns.reserve(log.rows.size());
    for (const TrainLogRow& r : log.rows) {
        returns.push_back(r.episode_return);
        steps.push_back(r.global_step);
    }
    const std::optional<long> conv_step = first_convergence_step(
        returns, steps, cfg.convergence_reward, cfg.convergence_window);

    out.summary.converged = conv_step.has_value();
    out.summary.steps_to_convergence = conv_step ? *conv_step + overhead : -1;
    out.summary.overhead_steps = overhead;
    out.summary.total_steps = log.rows.empty() ? 0 : log.rows.back().global_step;
    out.summary.final_return = tail_mean(log.rows, 50);

    out.rows.reserve(log.rows.size());
    for (const TrainLogRow& r : log.rows) {
        MetricsRow m;
        m.run_id = run_index;
        m.seed = seed;
        m.algorithm = cfg.algorithm;
        m.global_step = r.global_step + overhead;
        m.episode = r.episode;
        m.phase = r.phase;
        m.episode_return = r.episode_return;
        m.epsilon = r.epsilon;
        m.loss = r.mean_loss;
        m.converged = out.summary.converged;
        m.steps_to_convergence = out.summary.steps_to_convergence;
        m.overhead_steps = overhead;
        out.rows.push_back(std::move(m));
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Agent* teacher,
                                const UncertaintyPredictor* regressor) {
    cfg.validate();

    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env_workers = std::getenv("READC_WORKERS")) {
        workers = std::max(1, std::atoi(env_workers));
    }
    workers = std::min(workers, cfg.n_runs);
    workers = std::max(workers, 1);

    std::vector<RunOutput> outputs(cfg.n_runs);
    std::atomic<int> next_run{0};
    auto worker = [&]() {
        while (true) {
            const int run = next_run.fetch_add(1);
            if (run >= cfg.n_runs) return;
            outputs[run] = execute_run(cfg, run, teacher, regressor);
        }
    };
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    ExperimentResult result;
    for (int run = 0; run < cfg.n_runs; ++run) {  // run order keeps the CSV deterministic
        RunOutput& out = outputs[run];
        result.runs.push_back(out.summary);
        for (MetricsRow& r : out.rows) result.rows.push_back(std::move(r));
        for (SelectionLogRow& s : out.selections) result.selections.push_back(std::move(s));
        if (!out.plan.steps.empty()) result.plans.emplace_back(run, std::move(out.plan));
    }
    return result;
}

}  // namespace readc
