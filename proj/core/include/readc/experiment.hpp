#pragma once

#include <memory>

#include "readc/baselines.hpp"
#include "readc/config.hpp"
#include "readc/metrics.hpp"
#include "readc/model_io.hpp"

namespace readc {

std::unique_ptr<Env> make_env(const ExperimentConfig& cfg, long seed);
std::unique_ptr<Agent> make_agent(const ExperimentConfig& cfg, const Env& env, Rng& init_rng);
AgentConfig agent_config_from(const ExperimentConfig& cfg, const Env& env);
CurriculumConfig curriculum_config_from(const ExperimentConfig& cfg);

struct RunOutput {
    RunSummary summary;
    std::vector<MetricsRow> rows;
    std::vector<SelectionLogRow> selections;
    CurriculumPlan plan;  // populated by the readc-* algorithms
};

// One seeded run of the configured algorithm. Initial weights depend only on
// the seed and the environment, never on the algorithm. A run whose training
// diverges is reported failed instead of aborting the experiment.
RunOutput execute_run(const ExperimentConfig& cfg, int run_index, const Agent* teacher,
                      const UncertaintyPredictor* regressor);

struct ExperimentResult {
    std::vector<MetricsRow> rows;
    std::vector<RunSummary> runs;
    std::vector<SelectionLogRow> selections;
    std::vector<std::pair<int, CurriculumPlan>> plans;  // (run_id, plan)
};

// All seeded runs, spread over a worker pool (READC_WORKERS, default = the
// hardware concurrency); outputs are merged in run order so repeated
// executions are byte-identical.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const Agent* teacher = nullptr,
                                const UncertaintyPredictor* regressor = nullptr);

}  // namespace readc
