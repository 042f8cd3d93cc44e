#pragma once

#include <memory>

#include "readc/env.hpp"
#include "readc/uncertainty.hpp"

namespace readc {

class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RegressionDataset {
    std::vector<Vec> features;
    std::vector<double> targets;
    // Row ranges per snapshot when built from an environment.
    std::vector<std::size_t> snapshot_row_counts;

    std::size_t size() const { return targets.size(); }
    void push(Vec x, double y);
};

// Binary regression tree with exact greedy variance-reduction splits.
// Ties break to the lowest feature then the lowest threshold, so fitting is
// invariant to training-row order.
class RegressionTree {
public:
    struct Node {
        int feature = -1;  // -1 marks a leaf
        double threshold = 0.0;
        double value = 0.0;
        int left = -1;
        int right = -1;
    };

    static RegressionTree fit(const std::vector<Vec>& x, std::span<const double> y, int max_depth,
                              int min_samples_leaf);

    double predict(std::span<const double> x) const;
    const std::vector<Node>& nodes() const { return nodes_; }
    bool empty() const { return nodes_.empty(); }

    std::vector<Node>& mutable_nodes() { return nodes_; }

private:
    std::vector<Node> nodes_;  // nodes_[0] is the root
    int build(const std::vector<Vec>& x, const std::vector<double>& y,
              std::vector<std::size_t>& rows, std::size_t begin, std::size_t end, int depth,
              int max_depth, int min_samples_leaf);
};

struct GbmParams {
    int n_trees = 200;
    int max_depth = 3;
    double shrinkage = 0.1;
    int min_samples_leaf = 5;
};

// Least-squares gradient boosting: base prediction is the target mean and
// every tree fits the current residuals.
class GbmModel final : public UncertaintyPredictor {
public:
    double predict_row(std::span<const double> x) const;  // clamped at 0
    double predict_raw(std::span<const double> x) const;
    double predict(const UncertaintyRecord& rec) const override;

    double base() const { return base_; }
    double shrinkage() const { return shrinkage_; }
    const std::vector<RegressionTree>& trees() const { return trees_; }
    const std::vector<double>& training_mse() const { return training_mse_; }

    friend GbmModel fit_gbm(const RegressionDataset& data, const GbmParams& params);
    friend GbmModel make_gbm(double base, double shrinkage, std::vector<RegressionTree> trees);

private:
    double base_ = 0.0;
    double shrinkage_ = 0.1;
    std::vector<RegressionTree> trees_;
    std::vector<double> training_mse_;  // after base, then after each tree
};

GbmModel fit_gbm(const RegressionDataset& data, const GbmParams& params = {});
GbmModel make_gbm(double base, double shrinkage, std::vector<RegressionTree> trees);

// Ordinary least squares with a tiny ridge on the slopes; the intercept is
// unpenalized, so degenerate designs stay solvable.
class LinearModel final : public UncertaintyPredictor {
public:
    double intercept = 0.0;
    Vec coefficients;

    double predict_row(std::span<const double> x) const;  // clamped at 0
    double predict(const UncertaintyRecord& rec) const override;
};

LinearModel fit_linear(const RegressionDataset& data, double ridge = 1e-6);

struct DatasetBuildConfig {
    AgentConfig agent;
    double teacher_reward_threshold = 0.0;
    int teacher_reward_window = 10;
    long teacher_step_budget = 100000;
    long snapshot_interval = 5000;
    int snapshots = 6;
    long beta = 1500;
    bool gaussian_drop_half_term = false;
};

struct DatasetBuildResult {
    RegressionDataset data;
    std::unique_ptr<Agent> teacher;
    long teacher_steps = 0;
    long agent_steps = 0;
};

class DatasetBuildError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Trains a teacher to reward convergence on the source environment, then a
// fresh agent with periodic snapshots; every visited state contributes one
// row of checkpoint features against the true teacher-vs-agent divergence.
DatasetBuildResult build_training_set(Env& simple_env, Rng& rng, const DatasetBuildConfig& cfg);

std::unique_ptr<Agent> make_agent_for(const Env& env, const AgentConfig& cfg, Rng& init_rng);

}  // namespace readc
