#include "readc/regressor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace readc {

void RegressionDataset::push(Vec x, double y) {
    if (!features.empty() && features.front().size() != x.size())
        throw std::invalid_argument("RegressionDataset: inconsistent feature width");
    features.push_back(std::move(x));
    targets.push_back(y);
}

namespace {

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Exact greedy search: best SSE reduction over all features and midpoints.
SplitChoice best_split(const std::vector<Vec>& x, const std::vector<double>& y,
                       std::span<const std::size_t> rows, int min_samples_leaf) {
    SplitChoice best;
    const std::size_t n = rows.size();
    if (n < 2 * static_cast<std::size_t>(min_samples_leaf)) return best;
    const std::size_t n_features = x[rows[0]].size();

    double total_sum = 0.0;
    for (std::size_t r : rows) total_sum += y[r];

    std::vector<std::size_t> order(rows.begin(), rows.end());
    for (std::size_t f = 0; f < n_features; ++f) {
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (x[a][f] != x[b][f]) return x[a][f] < x[b][f];
            return a < b;
        });

        double left_sum = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left_sum += y[order[i]];
            if (x[order[i]][f] == x[order[i + 1]][f]) continue;  // not a boundary
            const std::size_t left_n = i + 1;
            const std::size_t right_n = n - left_n;
            if (left_n < static_cast<std::size_t>(min_samples_leaf) ||
                right_n < static_cast<std::size_t>(min_samples_leaf))
                continue;
            const double right_sum = total_sum - left_sum;
            // SSE reduction = sum^2/n terms; the parent term is constant.
            const double gain = left_sum * left_sum / static_cast<double>(left_n) +
                                right_sum * right_sum / static_cast<double>(right_n) -
                                total_sum * total_sum / static_cast<double>(n);
            const double threshold = 0.5 * (x[order[i]][f] + x[order[i + 1]][f]);
            // Features and thresholds are scanned ascending, so keeping only
            // strict improvements leaves ties on the lowest feature/threshold.
            if (gain > best.gain + 1e-12) {
                best.found = true;
                best.feature = static_cast<int>(f);
                best.threshold = threshold;
                best.gain = gain;
            }
        }
    }
    if (best.found && best.gain <= 1e-12) best.found = false;
    return best;
}

double mean_of(const std::vector<double>& y, std::span<const std::size_t> rows) {
    double s = 0.0;
    for (std::size_t r : rows) s += y[r];
    return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}

}  // namespace

int RegressionTree::build(const std::vector<Vec>& x, const std::vector<double>& y,
                          std::vector<std::size_t>& rows, std::size_t begin, std::size_t end,
                          int depth, int max_depth, int min_samples_leaf) {
    const int node_id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    const std::span<const std::size_t> span{rows.data() + begin, end - begin};

    SplitChoice split;
    if (depth < max_depth) split = best_split(x, y, span, min_samples_leaf);

    if (!split.found) {
        nodes_[node_id].value = mean_of(y, span);
        return node_id;
    }

    const auto mid = std::stable_partition(
        rows.begin() + begin, rows.begin() + end,
        [&](std::size_t r) { return x[r][split.feature] <= split.threshold; });
    const std::size_t mid_idx = static_cast<std::size_t>(mid - rows.begin());

    nodes_[node_id].feature = split.feature;
    nodes_[node_id].threshold = split.threshold;
    const int left = build(x, y, rows, begin, mid_idx, depth + 1, max_depth, min_samples_leaf);
    const int right = build(x, y, rows, mid_idx, end, depth + 1, max_depth, min_samples_leaf);
    nodes_[node_id].left = left;
    nodes_[node_id].right = right;
    return node_id;
}

RegressionTree RegressionTree::fit(const std::vector<Vec>& x, std::span<const double> y,
                                   int max_depth, int min_samples_leaf) {
    if (x.empty() || x.size() != y.size())
        throw FitError("RegressionTree::fit: empty or misaligned data");
    if (max_depth < 1 || min_samples_leaf < 1)
        throw FitError("RegressionTree::fit: bad hyperparameters");

    RegressionTree tree;
    std::vector<std::size_t> rows(x.size());
    std::iota(rows.begin(), rows.end(), 0);
    std::vector<double> targets(y.begin(), y.end());
    tree.build(x, targets, rows, 0, rows.size(), 0, max_depth, min_samples_leaf);
    return tree;
}

double RegressionTree::predict(std::span<const double> x) const {
    if (nodes_.empty()) return 0.0;
    int node = 0;
    while (nodes_[node].feature >= 0) {
        node = x[nodes_[node].feature] <= nodes_[node].threshold ? nodes_[node].left
                                                                 : nodes_[node].right;
    }
    return nodes_[node].value;
}

GbmModel fit_gbm(const RegressionDataset& data, const GbmParams& params) {
    if (data.size() < 2 * static_cast<std::size_t>(params.min_samples_leaf))
        throw FitError("fit_gbm: too few rows for the leaf-size setting");
    if (params.shrinkage <= 0.0 || params.shrinkage > 1.0)
        throw FitError("fit_gbm: shrinkage must be in (0, 1]");

    GbmModel model;
    model.shrinkage_ = params.shrinkage;
    model.base_ =
        std::accumulate(data.targets.begin(), data.targets.end(), 0.0) / data.size();

    std::vector<double> prediction(data.size(), model.base_);
    std::vector<double> residual(data.size());
    auto mse = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double d = data.targets[i] - prediction[i];
            s += d * d;
        }
        return s / static_cast<double>(data.size());
    };
    model.training_mse_.push_back(mse());

    for (int t = 0; t < params.n_trees; ++t) {
        for (std::size_t i = 0; i < data.size(); ++i)
            residual[i] = data.targets[i] - prediction[i];
        if (model.training_mse_.back() <= 1e-24) break;  // already exact

        RegressionTree tree = RegressionTree::fit(data.features, residual, params.max_depth,
                                                  params.min_samples_leaf);
        for (std::size_t i = 0; i < data.size(); ++i)
            prediction[i] += params.shrinkage * tree.predict(data.features[i]);
        model.trees_.push_back(std::move(tree));

        const double cur = mse();
        if (cur > model.training_mse_.back() + 1e-9)
            throw FitError("fit_gbm: training MSE increased");
        model.training_mse_.push_back(cur);
    }
    return model;
}

GbmModel make_gbm(double base, double shrinkage, std::vector<RegressionTree> trees) {
    GbmModel model;
    model.base_ = base;
    model.shrinkage_ = shrinkage;
    model.trees_ = std::move(trees);
    return model;
}

double GbmModel::predict_raw(std::span<const double> x) const {
    double out = base_;
    for (const RegressionTree& tree : trees_) out += shrinkage_ * tree.predict(x);
    return out;
}

double GbmModel::predict_row(std::span<const double> x) const {
    return std::max(0.0, predict_raw(x));  // targets are divergences
}

double GbmModel::predict(const UncertaintyRecord& rec) const {
    const auto f = rec.features();
    return predict_row(f);
}

double LinearModel::predict_row(std::span<const double> x) const {
    double out = intercept;
    for (std::size_t i = 0; i < coefficients.size(); ++i) out += coefficients[i] * x[i];
    return std::max(0.0, out);
}

double LinearModel::predict(const UncertaintyRecord& rec) const {
    const auto f = rec.features();
    return predict_row(f);
}

LinearModel fit_linear(const RegressionDataset& data, double ridge) {
    if (data.size() == 0) throw FitError("fit_linear: empty dataset");
    const std::size_t n = data.size();
    const std::size_t d = data.features[0].size();

    Vec x_mean(d, 0.0);
    double y_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) x_mean[j] += data.features[i][j];
        y_mean += data.targets[i];
    }
    for (double& v : x_mean) v /= static_cast<double>(n);
    y_mean /= static_cast<double>(n);

    // Normal equations on centered data, ridge on the diagonal.
    std::vector<Vec> a(d, Vec(d, 0.0));
    Vec b(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            const double xj = data.features[i][j] - x_mean[j];
            b[j] += xj * (data.targets[i] - y_mean);
            for (std::size_t k = j; k < d; ++k)
                a[j][k] += xj * (data.features[i][k] - x_mean[k]);
        }
    }
    for (std::size_t j = 0; j < d; ++j) {
        a[j][j] += ridge;
        for (std::size_t k = 0; k < j; ++k) a[j][k] = a[k][j];
    }

    // Gaussian elimination with partial pivoting.
    Vec beta = b;
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < d; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        std::swap(beta[col], beta[pivot]);
        const double diag = a[col][col];
        if (std::fabs(diag) < 1e-300) throw FitError("fit_linear: singular system");
        for (std::size_t r = 0; r < d; ++r) {
            if (r == col) continue;
            const double factor = a[r][col] / diag;
            for (std::size_t k = col; k < d; ++k) a[r][k] -= factor * a[col][k];
            beta[r] -= factor * beta[col];
        }
    }
    LinearModel model;
    model.coefficients.resize(d);
    for (std::size_t j = 0; j < d; ++j) model.coefficients[j] = beta[j] / a[j][j];
    model.intercept = y_mean;
    for (std::size_t j = 0; j < d; ++j) model.intercept -= model.coefficients[j] * x_mean[j];
    return model;
}

std::unique_ptr<Agent> make_agent_for(const Env& env, const AgentConfig& cfg, Rng& init_rng) {
    if (env.discrete_actions())
        return std::make_unique<DqnAgent>(env.observation_dim(), env.action_size(), cfg, init_rng);
    return std::make_unique<A2cAgent>(env.observation_dim(), env.action_size(), cfg, init_rng);
}

DatasetBuildResult build_training_set(Env& simple_env, Rng& rng, const DatasetBuildConfig& cfg) {
    DatasetBuildResult result;

    // Teacher: plain training to reward convergence, no curriculum.
    Rng teacher_init = rng.split(101);
    result.teacher = make_agent_for(simple_env, cfg.agent, teacher_init);
    {
        StateBuffer sb;
        ReplayBuffer rb;
        Rng teacher_rng = rng.split(102);
        TrainOptions opt;
        opt.step_budget = cfg.teacher_step_budget;
        opt.phase = "teacher";
        const TrainResult tr = train(
            *result.teacher, simple_env,
            ConvergenceCriterion::highest_reward(cfg.teacher_reward_threshold,
                                                 cfg.teacher_reward_window),
            sb, rb, teacher_rng, nullptr, opt);
        result.teacher_steps = tr.steps;
        if (!tr.converged)
            throw DatasetBuildError(
                "build_training_set: teacher did not reach the reward criterion within " +
                std::to_string(cfg.teacher_step_budget) + " steps on " + simple_env.domain_name());
    }

    // Student: fresh model; snapshot pairs generate the feature rows.
    Rng student_init = rng.split(103);
    std::unique_ptr<Agent> agent = make_agent_for(simple_env, cfg.agent, student_init);
    StateBuffer sb;
    ReplayBuffer rb;
    Rng train_rng = rng.split(104);

    for (int snap = 0; snap < cfg.snapshots; ++snap) {
        TrainResult warm = train(*agent, simple_env,
                                 ConvergenceCriterion::fixed(cfg.snapshot_interval), sb, rb,
                                 train_rng, nullptr, {});
        result.agent_steps += warm.steps;

        std::unique_ptr<Agent> past = agent->clone();
        TrainResult extra = train(*agent, simple_env, ConvergenceCriterion::fixed(cfg.beta), sb,
                                  rb, train_rng, nullptr, {});
        result.agent_steps += extra.steps;

        for (std::size_t i = 0; i < sb.size(); ++i) {
            const StateBuffer::Entry& e = sb.entry(i);
            const UncertaintyRecord rec = extract_features(*past, *agent, e.observation, e.visits);
            const double target =
                policy_kl(result.teacher->policy(e.observation), agent->policy(e.observation),
                          cfg.gaussian_drop_half_term);
            const auto f = rec.features();
            result.data.push(Vec(f.begin(), f.end()), target);
        }
        result.data.snapshot_row_counts.push_back(sb.size());
    }
    return result;
}

}  // namespace readc
