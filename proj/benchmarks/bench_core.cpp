#include <benchmark/benchmark.h>

#include "readc/agents.hpp"
#include "readc/clustering.hpp"
#include "readc/nn.hpp"
#include "readc/policy_math.hpp"
#include "readc/regressor.hpp"

namespace {

using namespace readc;

void BM_MlpForward(benchmark::State& state) {
    Rng rng(1);
    Mlp net({26, 128, 128, 128, 4}, rng);
    Vec x(26);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(net.forward(x));
    }
}
BENCHMARK(BM_MlpForward);

void BM_MlpBackward(benchmark::State& state) {
    Rng rng(1);
    Mlp net({26, 128, 128, 128, 4}, rng);
    Vec x(26);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    const Vec upstream{0.3, -0.2, 0.1, 0.4};
    Mlp::Cache cache;
    net.forward(x, cache);
    Mlp::Gradients grads = net.zero_gradients();
    for (auto _ : state) {
        net.backward(cache, upstream, grads);
        benchmark::DoNotOptimize(grads);
    }
}
BENCHMARK(BM_MlpBackward);

void BM_DqnBatchUpdate(benchmark::State& state) {
    Rng rng(2);
    AgentConfig cfg;
    DqnAgent agent(26, 4, cfg, rng);
    std::vector<Transition> transitions;
    for (int i = 0; i < 16; ++i) {
        Vec s(26), s2(26);
        for (double& v : s) v = rng.uniform(-1.0, 1.0);
        for (double& v : s2) v = rng.uniform(-1.0, 1.0);
        transitions.push_back(Transition{s, static_cast<int>(i % 4), -10.0, false, s2});
    }
    std::vector<const Transition*> batch;
    for (const Transition& t : transitions) batch.push_back(&t);
    for (auto _ : state) {
        benchmark::DoNotOptimize(agent.update(batch));
    }
}
BENCHMARK(BM_DqnBatchUpdate);

void BM_QToProbs(benchmark::State& state) {
    Rng rng(3);
    Vec q(4);
    for (double& v : q) v = rng.uniform(-5.0, 5.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(q_to_probs(q));
    }
}
BENCHMARK(BM_QToProbs);

void BM_WardCluster(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    Rng rng(4);
    std::vector<StateVector> points;
    for (std::size_t i = 0; i < n; ++i) {
        StateVector p(8);
        for (double& v : p) v = rng.uniform(0.0, 10.0);
        points.push_back(std::move(p));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(ward_cluster(points, 3.0));
    }
}
BENCHMARK(BM_WardCluster)->Arg(64)->Arg(256)->Arg(512);

void BM_GbmPredict(benchmark::State& state) {
    Rng rng(5);
    RegressionDataset data;
    for (int i = 0; i < 500; ++i) {
        Vec x(10);
        for (double& v : x) v = rng.uniform(0.0, 1.0);
        data.push(x, 2.0 * x[0] + rng.normal(0.0, 0.01));
    }
    GbmParams params;
    params.n_trees = 100;
    const GbmModel model = fit_gbm(data, params);
    for (auto _ : state) {
        benchmark::DoNotOptimize(model.predict_row(data.features[0]));
    }
}
BENCHMARK(BM_GbmPredict);

}  // namespace

BENCHMARK_MAIN();
