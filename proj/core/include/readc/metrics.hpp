#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace readc {

struct MetricsRow {
    int run_id = 0;
    long seed = 0;
    std::string algorithm;
    long global_step = 0;  // overhead-offset cumulative environment steps
    int episode = 0;
    std::string phase;
    double episode_return = 0.0;
    double epsilon = 0.0;
    double loss = 0.0;
    bool converged = false;               // run-level flag, repeated per row
    long steps_to_convergence = -1;       // valid only when converged
    long overhead_steps = 0;
};

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows,
                       bool with_header = true);
std::vector<MetricsRow> read_metrics_csv(std::istream& in);

struct RunSummary {
    int run_id = 0;
    long seed = 0;
    std::string algorithm;
    std::uint64_t init_weight_hash = 0;
    bool converged = false;
    long steps_to_convergence = -1;
    long overhead_steps = 0;
    long total_steps = 0;
    double final_return = 0.0;  // mean over the last 50 episodes
    bool failed = false;
    std::string error;
};

void write_runs_csv(std::ostream& out, const std::vector<RunSummary>& runs);

struct SummaryBucket {
    std::string algorithm;
    long step = 0;           // bucket upper edge
    double mean_return = 0.0;
    double ci_half_width = 0.0;  // 95% normal approximation over runs
    int n_runs = 0;
};

struct ConvergenceStats {
    std::string algorithm;
    int runs = 0;
    int converged = 0;
    double rate = 0.0;
    double median_steps = 0.0;  // over converged runs
    double mean_steps = 0.0;
};

std::vector<SummaryBucket> summarize_returns(const std::vector<MetricsRow>& rows,
                                             long bucket_width);
std::vector<ConvergenceStats> summarize_convergence(const std::vector<MetricsRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryBucket>& buckets,
                       const std::vector<ConvergenceStats>& stats);

// Finds the first window of `window` consecutive episodes with return at or
// above `threshold`; returns the global step at the end of that window.
std::optional<long> first_convergence_step(const std::vector<double>& returns,
                                           const std::vector<long>& steps, double threshold,
                                           int window);

}  // namespace readc
