// Command-line front end: seeded experiment runs, teacher/regressor training,
// figure emission, and a fixture validation pass.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "readc/experiment.hpp"
#include "readc/grid_env.hpp"
#include "readc/parking_env.hpp"
#include "readc/svg_plot.hpp"

namespace fs = std::filesystem;
using namespace readc;

namespace {

ExperimentConfig load_with_overrides(const std::string& config_path,
                                     const std::vector<std::string>& overrides) {
    ExperimentConfig cfg = load_config(config_path);
    for (const std::string& o : overrides) apply_override(cfg, o);
    cfg.validate();
    return cfg;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& overrides,
            const std::string& out_path, const std::string& runs_path,
            const std::string& selections_path, const std::string& plans_path, bool append) {
    ExperimentConfig cfg = load_with_overrides(config_path, overrides);

    std::unique_ptr<Agent> teacher;
    std::unique_ptr<UncertaintyPredictor> regressor;
    if (cfg.algorithm == "readc-td") {
        if (cfg.teacher_model.empty() || !fs::exists(cfg.teacher_model)) {
            std::cerr << "readc-td needs a trained teacher model; missing file '"
                      << cfg.teacher_model << "' (run `readc train-teacher` first)\n";
            return 2;
        }
        teacher = load_agent(cfg.teacher_model, agent_config_from(cfg, *make_env(cfg, cfg.base_seed)));
    }
    if (cfg.algorithm == "readc-sa") {
        if (cfg.regressor_model.empty() || !fs::exists(cfg.regressor_model)) {
            std::cerr << "readc-sa needs a trained regressor model; missing file '"
                      << cfg.regressor_model << "' (run `readc train-regressor` first)\n";
            return 2;
        }
        regressor = load_predictor(cfg.regressor_model);
    }

    const ExperimentResult result = run_experiment(cfg, teacher.get(), regressor.get());

    const bool fresh = !append || !fs::exists(out_path);
    std::ofstream out(out_path, append ? std::ios::app : std::ios::trunc);
    if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        return 1;
    }
    write_metrics_csv(out, result.rows, fresh);

    if (!runs_path.empty()) {
        std::ofstream runs_out(runs_path);
        write_runs_csv(runs_out, result.runs);
    }
    if (!selections_path.empty() && !result.selections.empty()) {
        std::ofstream sel(selections_path);
        sel << "curriculum_step,candidate_count,chosen_state,chosen_uncertainty,heuristic,"
               "chosen_cluster,cluster_count\n";
        for (const SelectionLogRow& s : result.selections) {
            sel << s.curriculum_step << ',' << s.candidate_count << ',' << s.chosen_state << ','
                << s.chosen_uncertainty << ',' << s.heuristic << ',' << s.chosen_cluster << ','
                << s.cluster_count << '\n';
        }
    }
    if (!plans_path.empty() && !result.plans.empty()) {
        std::ofstream plans_out(plans_path);
        bool header = true;
        for (const auto& [run_id, plan] : result.plans) {
            write_plan_csv(plans_out, plan, run_id, header);
            header = false;
        }
    }

    int converged = 0;
    for (const RunSummary& r : result.runs) converged += r.converged ? 1 : 0;
    std::cout << cfg.algorithm << " on " << cfg.domain << ": " << result.runs.size()
              << " runs, " << converged << " converged; metrics -> " << out_path << "\n";
    return 0;
}

int cmd_train_teacher(const std::string& config_path, const std::vector<std::string>& overrides,
                      const std::string& out_path, long budget_override) {
    ExperimentConfig cfg = load_with_overrides(config_path, overrides);
    std::unique_ptr<Env> env = make_env(cfg, cfg.base_seed);
    Rng master(static_cast<std::uint64_t>(cfg.base_seed));
    Rng init_rng = master.split(1);
    Rng run_rng = master.split(2);

    std::unique_ptr<Agent> teacher = make_agent(cfg, *env, init_rng);
    StateBuffer sb;
    ReplayBuffer rb(static_cast<std::size_t>(cfg.buffer_size));
    TrainOptions opt;
    opt.step_budget = budget_override > 0 ? budget_override : cfg.step_budget;
    opt.phase = "teacher";
    const TrainResult tr = train(
        *teacher, *env,
        ConvergenceCriterion::highest_reward(cfg.convergence_reward, cfg.convergence_window), sb,
        rb, run_rng, nullptr, opt);
    if (!tr.converged) {
        std::cerr << "teacher did not converge within " << opt.step_budget << " steps\n";
        return 3;
    }
    save_agent(out_path, *teacher);
    std::cout << "teacher converged after " << tr.steps << " steps -> " << out_path << "\n";
    return 0;
}

int cmd_train_regressor(const std::string& config_path,
                        const std::vector<std::string>& overrides, const std::string& out_path,
                        const std::string& dataset_path) {
    ExperimentConfig cfg = load_with_overrides(config_path, overrides);

    // Source environment: the configured simpler board, or a reduced lot.
    ExperimentConfig source_cfg = cfg;
    if (cfg.domain == "parking") {
        source_cfg.n_spots = 8;
        source_cfg.row_offset = cfg.row_offset / 2.0;
    } else {
        if (cfg.source_board.empty()) {
            std::cerr << "train-regressor needs regressor.source_board for grid domains\n";
            return 2;
        }
        source_cfg.board = cfg.source_board;
    }
    std::unique_ptr<Env> env = make_env(source_cfg, cfg.base_seed);

    DatasetBuildConfig build;
    build.agent = agent_config_from(source_cfg, *env);
    build.teacher_reward_threshold = cfg.source_convergence_reward != 0.0
                                         ? cfg.source_convergence_reward
                                         : cfg.convergence_reward;
    build.teacher_reward_window = cfg.convergence_window;
    build.teacher_step_budget = cfg.teacher_budget;
    build.snapshot_interval = cfg.snapshot_interval;
    build.snapshots = cfg.snapshots;
    build.beta = cfg.beta;
    build.gaussian_drop_half_term = cfg.gaussian_kl_drop_constant;

    Rng rng(static_cast<std::uint64_t>(cfg.base_seed));
    DatasetBuildResult result;
    try {
        result = build_training_set(*env, rng, build);
    } catch (const DatasetBuildError& e) {
        std::cerr << e.what() << "\n";
        return 3;
    }

    if (!dataset_path.empty()) {
        std::ofstream ds(dataset_path);
        write_dataset_csv(ds, result.data);
    }

    if (cfg.regressor_kind == "linear") {
        const LinearModel model = fit_linear(result.data);
        save_predictor(out_path, model);
    } else {
        GbmParams params;
        params.n_trees = cfg.gbm_trees;
        params.max_depth = cfg.gbm_depth;
        params.shrinkage = cfg.gbm_shrinkage;
        params.min_samples_leaf = cfg.gbm_min_leaf;
        const GbmModel model = fit_gbm(result.data, params);
        save_predictor(out_path, model);
    }
    std::cout << "regressor (" << cfg.regressor_kind << ") fitted on " << result.data.size()
              << " rows -> " << out_path << "\n";
    return 0;
}

int cmd_plot(const std::string& metrics_path, const std::string& out_dir, long bucket,
             double best_fraction) {
    std::ifstream in(metrics_path);
    if (!in) {
        std::cerr << "cannot open " << metrics_path << "\n";
        return 1;
    }
    const std::vector<MetricsRow> rows = read_metrics_csv(in);
    if (rows.empty()) {
        std::cerr << "warning: no metrics rows in " << metrics_path << ", nothing to plot\n";
        return 0;
    }
    PlotSpec spec;
    spec.bucket_width = bucket;
    spec.best_fraction = best_fraction;
    const std::vector<std::string> files = emit_plots(rows, out_dir, spec);
    for (const std::string& f : files) std::cout << "wrote " << f << "\n";
    return 0;
}

int check(bool ok, const char* what, int& failures) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << what << "\n";
    if (!ok) ++failures;
    return failures;
}

// Invariant sweep over the shipped fixtures; used by `readc validate`.
int cmd_validate(const std::string& boards_dir) {
    int failures = 0;
    try {
        const GridSpec spec = load_board(boards_dir + "/keylock10.txt");
        GridEnv env(spec);
        check(env.domain_name() == "keylock", "key-lock fixture loads", failures);
        env.reset();
        long reward_sum = 0;
        StepResult sr = env.step(1);
        check(sr.reward == kStepReward || sr.reward == kKeyReward, "grid step rewards", failures);
        (void)reward_sum;

        // Episode cap.
        GridEnv capped(spec);
        capped.reset();
        int steps = 0;
        while (!capped.episode_over() && steps < 2 * kStepCap) {
            capped.step(steps % 2 == 0 ? 0 : 2);  // bounce north/south
            ++steps;
        }
        check(steps <= kStepCap, "episode never exceeds the step cap", failures);

        const GridSpec fspec = load_board(boards_dir + "/flags10.txt");
        GridEnv flags(fspec);
        check(flags.domain_name() == "flags", "flags fixture loads", failures);

        check(mpc_overhead(2, 50000, 5000, 15) == 245000, "overhead identity at full scale",
              failures);

        const Vec q{3.0, 4.0};
        const DiscreteDist p = q_to_probs(q);
        check(std::fabs(p.probs[0] - 0.45017) < 1e-4, "softmax transfer", failures);
        check(std::fabs(discrete_kl(p, p)) < 1e-12, "self divergence is zero", failures);

        ParkingSpec pspec;
        pspec.n_spots = 8;
        ParkingEnv parking(pspec, 7);
        parking.reset();
        const StepResult pr = parking.step(std::vector<double>{0.5, 0.1});
        check(pr.reward <= 0.0, "parking distance punishment", failures);
    } catch (const std::exception& e) {
        std::cout << "[FAIL] exception: " << e.what() << "\n";
        ++failures;
    }
    std::cout << (failures == 0 ? "validate: all checks passed\n"
                                : "validate: checks failed\n");
    return failures == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relative-entropy curriculum experiments"};
    app.require_subcommand(1);

    std::string config_path, out_path = "metrics.csv", runs_path, selections_path, plans_path;
    std::vector<std::string> overrides;
    bool append = false;

    auto* run = app.add_subcommand("run", "execute seeded runs of one algorithm");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--set", overrides, "override a config key, e.g. --set algorithm=random");
    run->add_option("--seed", [&overrides](const std::vector<std::string>& vals) {
           overrides.push_back("base_seed=" + vals.front());
           return true;
       }, "override the base seed");
    run->add_option("--algo", [&overrides](const std::vector<std::string>& vals) {
           overrides.push_back("algorithm=" + vals.front());
           return true;
       }, "override the algorithm");
    run->add_option("--domain", [&overrides](const std::vector<std::string>& vals) {
           overrides.push_back("domain=" + vals.front());
           return true;
       }, "override the domain");
    run->add_option("--budget", [&overrides](const std::vector<std::string>& vals) {
           overrides.push_back("step_budget=" + vals.front());
           return true;
       }, "override the per-run step budget");
    run->add_option("--out", out_path, "metrics CSV output path");
    run->add_option("--runs-out", runs_path, "per-run summary CSV path");
    run->add_option("--selections-out", selections_path, "selection audit CSV path");
    run->add_option("--plans-out", plans_path, "curriculum plan CSV path");
    run->add_flag("--append", append, "append to an existing metrics CSV");

    std::string model_out = "model.txt", dataset_out;
    long teacher_budget = 0;
    auto* teach = app.add_subcommand("train-teacher", "train and persist a converged teacher");
    teach->add_option("--config", config_path, "experiment config file")->required();
    teach->add_option("--set", overrides, "override a config key");
    teach->add_option("--out", model_out, "teacher model output path");
    teach->add_option("--budget", teacher_budget, "teacher training step budget");

    auto* reg = app.add_subcommand("train-regressor", "build the source dataset and fit a regressor");
    reg->add_option("--config", config_path, "experiment config file")->required();
    reg->add_option("--set", overrides, "override a config key");
    reg->add_option("--out", model_out, "regressor output path");
    reg->add_option("--dataset-out", dataset_out, "also write the training rows as CSV");

    std::string metrics_path = "metrics.csv", fig_dir = "figures";
    long bucket = 0;
    double best_fraction = 1.0;
    auto* plot = app.add_subcommand("plot", "emit SVG figures from a metrics CSV");
    plot->add_option("--metrics", metrics_path, "metrics CSV path")->required();
    plot->add_option("--out-dir", fig_dir, "output directory");
    plot->add_option("--bucket", bucket, "step bucket width for the return chart");
    plot->add_option("--best-fraction", best_fraction,
                     "keep only the fastest-converging fraction of runs in the box plot");

    std::string boards_dir = "boards";
    auto* validate = app.add_subcommand("validate", "run the invariant suite on shipped fixtures");
    validate->add_option("--boards", boards_dir, "board fixture directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, overrides, out_path, runs_path, selections_path,
                           plans_path, append);
        if (teach->parsed())
            return cmd_train_teacher(config_path, overrides, model_out, teacher_budget);
        if (reg->parsed())
            return cmd_train_regressor(config_path, overrides, model_out, dataset_out);
        if (plot->parsed()) return cmd_plot(metrics_path, fig_dir, bucket, best_fraction);
        if (validate->parsed()) return cmd_validate(boards_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
