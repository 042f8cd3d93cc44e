#pragma once

#include "readc/metrics.hpp"

namespace readc {

struct BoxStats {
    double q1 = 0.0, median = 0.0, q3 = 0.0;
    double mean = 0.0;
    double whisker_lo = 0.0, whisker_hi = 0.0;  // 1.5*IQR fences, clipped to data
    std::vector<double> outliers;
};

// Quantiles by linear interpolation over the sorted sample.
double quantile(std::vector<double> values, double p);
BoxStats box_stats(const std::vector<double>& values);

// Number of runs kept per box under a best-fraction filter.
std::size_t best_fraction_count(double fraction, int total_runs);

struct PlotSpec {
    std::string title = "returns";
    long bucket_width = 0;       // 0 picks max_step / 60
    double best_fraction = 1.0;  // box plot: keep the fastest-converging share
    int width = 960;
    int height = 560;
};

// Mean episode return vs overhead-offset steps, one curve per algorithm with
// a shaded 95% confidence band.
void write_return_chart(const std::string& path, const std::vector<MetricsRow>& rows,
                        const PlotSpec& spec);

// Steps-to-convergence box plot per algorithm: solid orange median, dotted
// green mean, convergence-rate label above each box.
void write_convergence_boxplot(const std::string& path, const std::vector<MetricsRow>& rows,
                               const PlotSpec& spec);

// Writes both figures into out_dir; returns the file paths. Empty metrics
// produce no files.
std::vector<std::string> emit_plots(const std::vector<MetricsRow>& rows,
                                    const std::string& out_dir, const PlotSpec& spec = {});

}  // namespace readc
