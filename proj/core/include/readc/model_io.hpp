#pragma once

#include <iosfwd>
#include <memory>
#include <string>

#include "readc/agents.hpp"
#include "readc/regressor.hpp"

namespace readc {

// Text formats, one artifact per file:
//   mlp:    "mlp" / layer sizes / weight rows / bias rows
//   dqn:    "dqn" + the learned network
//   a2c:    "a2c" + actor network + critic network
//   gbm:    "gbm" / base / shrinkage / tree count / pre-order node dump
//   linear: "linear" / intercept / coefficients

void save_mlp(std::ostream& out, const Mlp& net);
Mlp load_mlp(std::istream& in);

void save_agent(const std::string& path, const Agent& agent);
std::unique_ptr<Agent> load_agent(const std::string& path, const AgentConfig& cfg);

void save_predictor(const std::string& path, const GbmModel& model);
void save_predictor(const std::string& path, const LinearModel& model);
std::unique_ptr<UncertaintyPredictor> load_predictor(const std::string& path);

void write_dataset_csv(std::ostream& out, const RegressionDataset& data);

}  // namespace readc
