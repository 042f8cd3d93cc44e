#include "readc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace readc {

namespace {

const char* kHeader =
    "run_id,seed,algorithm,global_step,episode,phase,return,epsilon,loss,converged_flag,"
    "steps_to_convergence,overhead_steps\n";

}  // namespace

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows, bool with_header) {
    if (with_header) out << kHeader;
    char buf[256];
    for (const MetricsRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%ld,%s,%ld,%d,%s,%.6f,%.6f,%.6f,%d,", r.run_id,
                      r.seed, r.algorithm.c_str(), r.global_step, r.episode, r.phase.c_str(),
                      r.episode_return, r.epsilon, r.loss, r.converged ? 1 : 0);
        out << buf;
        if (r.converged) out << r.steps_to_convergence;
        out << ',' << r.overhead_steps << '\n';
    }
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
    std::vector<MetricsRow> rows;
    std::string line;
    if (!std::getline(in, line)) return rows;
    if (line.find("run_id") == std::string::npos)
        throw std::runtime_error("metrics csv: missing header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        MetricsRow r;
        auto next = [&]() {
            if (!std::getline(ls, cell, ',')) throw std::runtime_error("metrics csv: short row");
            return cell;
        };
        r.run_id = std::stoi(next());
        r.seed = std::stol(next());
        r.algorithm = next();
        r.global_step = std::stol(next());
        r.episode = std::stoi(next());
        r.phase = next();
        r.episode_return = std::stod(next());
        r.epsilon = std::stod(next());
        r.loss = std::stod(next());
        r.converged = next() == "1";
        const std::string stc = next();
        r.steps_to_convergence = stc.empty() ? -1 : std::stol(stc);
        r.overhead_steps = std::stol(next());
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_runs_csv(std::ostream& out, const std::vector<RunSummary>& runs) {
    out << "run_id,seed,algorithm,init_weight_hash,converged,steps_to_convergence,overhead_steps,"
           "total_steps,final_return,failed,error\n";
    char buf[128];
    for (const RunSummary& r : runs) {
        out << r.run_id << ',' << r.seed << ',' << r.algorithm << ',';
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(r.init_weight_hash));
        out << buf << ',' << (r.converged ? 1 : 0) << ',';
        if (r.converged) out << r.steps_to_convergence;
        out << ',' << r.overhead_steps << ',' << r.total_steps << ',';
        std::snprintf(buf, sizeof(buf), "%.6f", r.final_return);
        out << buf << ',' << (r.failed ? 1 : 0) << ',' << r.error << '\n';
    }
}

std::optional<long> first_convergence_step(const std::vector<double>& returns,
                                           const std::vector<long>& steps, double threshold,
                                           int window) {
    if (returns.size() != steps.size())
        throw std::invalid_argument("first_convergence_step: misaligned inputs");
    int streak = 0;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        streak = returns[i] >= threshold ? streak + 1 : 0;
        if (streak >= window) return steps[i];
    }
    return std::nullopt;
}

std::vector<SummaryBucket> summarize_returns(const std::vector<MetricsRow>& rows,
                                             long bucket_width) {
    if (bucket_width <= 0) throw std::invalid_argument("summarize_returns: bad bucket width");
    // (algorithm, bucket) -> per-run sums
    struct Accum {
        std::map<int, std::pair<double, long>> per_run;  // run -> (sum, count)
    };
    std::map<std::pair<std::string, long>, Accum> buckets;
    for (const MetricsRow& r : rows) {
        const long bucket = (r.global_step / bucket_width + 1) * bucket_width;
        auto& acc = buckets[{r.algorithm, bucket}].per_run[r.run_id];
        acc.first += r.episode_return;
        acc.second += 1;
    }

    std::vector<SummaryBucket> out;
    for (const auto& [key, acc] : buckets) {
        std::vector<double> run_means;
        for (const auto& [run, sums] : acc.per_run)
            run_means.push_back(sums.first / static_cast<double>(sums.second));
        SummaryBucket b;
        b.algorithm = key.first;
        b.step = key.second;
        b.n_runs = static_cast<int>(run_means.size());
        double mean = 0.0;
        for (double m : run_means) mean += m;
        mean /= run_means.size();
        double var = 0.0;
        for (double m : run_means) var += (m - mean) * (m - mean);
        const double sd = run_means.size() > 1 ? std::sqrt(var / (run_means.size() - 1)) : 0.0;
        b.mean_return = mean;
        b.ci_half_width =
            run_means.size() > 1 ? 1.96 * sd / std::sqrt(static_cast<double>(run_means.size()))
                                 : 0.0;
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<ConvergenceStats> summarize_convergence(const std::vector<MetricsRow>& rows) {
    // One sample per run.
    std::map<std::string, std::map<int, std::pair<bool, long>>> per_algo;
    for (const MetricsRow& r : rows)
        per_algo[r.algorithm][r.run_id] = {r.converged, r.steps_to_convergence};

    std::vector<ConvergenceStats> out;
    for (const auto& [algo, runs] : per_algo) {
        ConvergenceStats s;
        s.algorithm = algo;
        s.runs = static_cast<int>(runs.size());
        std::vector<double> converged_steps;
        for (const auto& [run, info] : runs)
            if (info.first) converged_steps.push_back(static_cast<double>(info.second));
        s.converged = static_cast<int>(converged_steps.size());
        s.rate = s.runs ? static_cast<double>(s.converged) / s.runs : 0.0;
        if (!converged_steps.empty()) {
            std::sort(converged_steps.begin(), converged_steps.end());
            const std::size_t n = converged_steps.size();
            s.median_steps = n % 2 ? converged_steps[n / 2]
                                   : 0.5 * (converged_steps[n / 2 - 1] + converged_steps[n / 2]);
            double mean = 0.0;
            for (double v : converged_steps) mean += v;
            s.mean_steps = mean / n;
        }
        out.push_back(std::move(s));
    }
    return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryBucket>& buckets,
                       const std::vector<ConvergenceStats>& stats) {
    out << "kind,algorithm,step,mean_return,ci_half_width,n_runs,converged,rate,median_steps,"
           "mean_steps\n";
    char buf[256];
    for (const SummaryBucket& b : buckets) {
        std::snprintf(buf, sizeof(buf), "bucket,%s,%ld,%.6f,%.6f,%d,,,,\n", b.algorithm.c_str(),
                      b.step, b.mean_return, b.ci_half_width, b.n_runs);
        out << buf;
    }
    for (const ConvergenceStats& s : stats) {
        std::snprintf(buf, sizeof(buf), "convergence,%s,,,,%d,%d,%.4f,%.1f,%.1f\n",
                      s.algorithm.c_str(), s.runs, s.converged, s.rate, s.median_steps,
                      s.mean_steps);
        out << buf;
    }
}

}  // namespace readc
