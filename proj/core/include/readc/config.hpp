#pragma once

#include <string>

namespace readc {

// Flat key-value experiment configuration with [section] headers and '#'
// comments. Unknown sections or keys are rejected so config drift shows up
// immediately. Defaults follow the reference hyperparameter tables, with the
// curriculum lengths at desk scale.
struct ExperimentConfig {
    // [experiment]
    std::string domain = "keylock";  // keylock | flags | parking
    std::string board;               // board fixture path (grid domains)
    std::string algorithm = "none";  // readc-td | readc-sa | random | max-policy-change | none
    std::string heuristic = "max-entropy";  // max-entropy | proximity | max-distance
    std::string clustering = "off";         // off | cutoff | count
    double cluster_cutoff = 3.0;
    long cluster_count = 100;
    int n_runs = 10;
    long base_seed = 1;
    long step_budget = 300000;
    double convergence_reward = 1490.0;
    int convergence_window = 10;
    std::string teacher_model;    // required by readc-td
    std::string regressor_model;  // required by readc-sa
    bool gaussian_kl_drop_constant = false;

    // [network]
    double epsilon = 1.0;
    double epsilon_decay = 0.995;
    double epsilon_min = 0.01;
    double alpha = 0.005;
    double gamma = 0.99;
    long buffer_size = 40000;
    int batch_size = 16;
    int entropy_window = 10;
    int hidden_width = 0;  // 0 picks the per-domain default (128 grid, 256 parking)

    // [curriculum]
    int max_length = 4;
    long eta = 5000;
    long beta = 1500;
    long candidate_subset = 2000;

    // [baselines]
    int n_source_tasks = 15;
    int mpc_steps = 2;
    long steps_prior = 5000;
    long steps_per_task = 500;
    int random_radius = 2;
    long random_step_iters = 0;  // 0 falls back to beta

    // [regressor]
    int gbm_trees = 200;
    int gbm_depth = 3;
    double gbm_shrinkage = 0.1;
    int gbm_min_leaf = 5;
    long snapshot_interval = 5000;
    int snapshots = 6;
    std::string regressor_kind = "gbm";  // gbm | linear
    std::string source_board;
    long teacher_budget = 120000;
    double source_convergence_reward = 0.0;  // 0 falls back to convergence_reward

    // [parking]
    int n_spots = 30;
    double row_offset = 4.0;

    void validate() const;  // throws std::invalid_argument
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// "key=value" override, e.g. "eta=500" or "experiment.algorithm=random".
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

}  // namespace readc
