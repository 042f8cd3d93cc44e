#include "readc/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace readc {

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("quantile: empty sample");
    std::sort(values.begin(), values.end());
    const double h = p * (static_cast<double>(values.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

BoxStats box_stats(const std::vector<double>& values) {
    BoxStats s;
    if (values.empty()) return s;
    s.q1 = quantile(values, 0.25);
    s.median = quantile(values, 0.5);
    s.q3 = quantile(values, 0.75);
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    const double iqr = s.q3 - s.q1;
    const double lo_fence = s.q1 - 1.5 * iqr;
    const double hi_fence = s.q3 + 1.5 * iqr;
    s.whisker_lo = s.q3;
    s.whisker_hi = s.q1;
    bool any = false;
    for (double v : values) {
        if (v < lo_fence || v > hi_fence) {
            s.outliers.push_back(v);
            continue;
        }
        if (!any) {
            s.whisker_lo = s.whisker_hi = v;
            any = true;
        } else {
            s.whisker_lo = std::min(s.whisker_lo, v);
            s.whisker_hi = std::max(s.whisker_hi, v);
        }
    }
    return s;
}

std::size_t best_fraction_count(double fraction, int total_runs) {
    return static_cast<std::size_t>(std::llround(fraction * static_cast<double>(total_runs)));
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Canvas {
    std::ostringstream svg;
    int width, height;
    double margin_left = 70, margin_right = 180, margin_top = 45, margin_bottom = 55;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;

    Canvas(int w, int h) : width(w), height(h) {}

    double px(double x) const {
        return margin_left + (x - x_min) / (x_max - x_min) * (width - margin_left - margin_right);
    }
    double py(double y) const {
        return height - margin_bottom -
               (y - y_min) / (y_max - y_min) * (height - margin_top - margin_bottom);
    }

    void open(const std::string& title) {
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
            << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
        svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
    }

    void axes(const std::string& xlabel, const std::string& ylabel) {
        svg << "<line x1=\"" << px(x_min) << "\" y1=\"" << py(y_min) << "\" x2=\"" << px(x_max)
            << "\" y2=\"" << py(y_min) << "\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << px(x_min) << "\" y1=\"" << py(y_min) << "\" x2=\"" << px(x_min)
            << "\" y2=\"" << py(y_max) << "\" stroke=\"black\"/>\n";
        for (int i = 0; i <= 5; ++i) {
            const double xv = x_min + (x_max - x_min) * i / 5.0;
            const double yv = y_min + (y_max - y_min) * i / 5.0;
            svg << "<text x=\"" << px(xv) << "\" y=\"" << py(y_min) + 18
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
                << static_cast<long>(std::llround(xv)) << "</text>\n";
            svg << "<text x=\"" << px(x_min) - 8 << "\" y=\"" << py(yv) + 4
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
                << std::llround(yv) << "</text>\n";
            svg << "<line x1=\"" << px(x_min) << "\" y1=\"" << py(yv) << "\" x2=\"" << px(x_max)
                << "\" y2=\"" << py(yv) << "\" stroke=\"#eeeeee\"/>\n";
        }
        svg << "<text x=\"" << (px(x_min) + px(x_max)) / 2 << "\" y=\"" << height - 12
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xlabel
            << "</text>\n";
        svg << "<text x=\"18\" y=\"" << (py(y_min) + py(y_max)) / 2
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
            << "transform=\"rotate(-90 18 " << (py(y_min) + py(y_max)) / 2 << ")\">" << ylabel
            << "</text>\n";
    }

    void close() { svg << "</svg>\n"; }

    void save(const std::string& path) {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << svg.str();
    }
};

}  // namespace

void write_return_chart(const std::string& path, const std::vector<MetricsRow>& rows,
                        const PlotSpec& spec) {
    long max_step = 0;
    for (const MetricsRow& r : rows) max_step = std::max(max_step, r.global_step);
    const long bucket = spec.bucket_width > 0 ? spec.bucket_width : std::max<long>(1, max_step / 60);
    const std::vector<SummaryBucket> buckets = summarize_returns(rows, bucket);

    std::map<std::string, std::vector<const SummaryBucket*>> by_algo;
    for (const SummaryBucket& b : buckets) by_algo[b.algorithm].push_back(&b);

    Canvas canvas(spec.width, spec.height);
    canvas.x_min = 0;
    canvas.x_max = static_cast<double>(max_step) * 1.02 + 1;
    double y_min = 0, y_max = 1;
    bool first = true;
    for (const SummaryBucket& b : buckets) {
        const double lo = b.mean_return - b.ci_half_width;
        const double hi = b.mean_return + b.ci_half_width;
        if (first) {
            y_min = lo;
            y_max = hi;
            first = false;
        }
        y_min = std::min(y_min, lo);
        y_max = std::max(y_max, hi);
    }
    const double pad = 0.05 * std::max(1.0, y_max - y_min);
    canvas.y_min = y_min - pad;
    canvas.y_max = y_max + pad;

    canvas.open(spec.title);
    canvas.axes("environment steps (overhead-offset)", "mean episode return");

    int color = 0;
    double legend_y = canvas.margin_top + 10;
    for (auto& [algo, pts] : by_algo) {
        std::sort(pts.begin(), pts.end(),
                  [](const SummaryBucket* a, const SummaryBucket* b) { return a->step < b->step; });
        const char* stroke = kPalette[color % 8];

        // Confidence band.
        std::ostringstream band;
        band << "M";
        for (const SummaryBucket* b : pts)
            band << canvas.px(static_cast<double>(b->step)) << ","
                 << canvas.py(b->mean_return + b->ci_half_width) << " L";
        for (auto it = pts.rbegin(); it != pts.rend(); ++it)
            band << canvas.px(static_cast<double>((*it)->step)) << ","
                 << canvas.py((*it)->mean_return - (*it)->ci_half_width) << " L";
        std::string band_path = band.str();
        band_path.pop_back();  // trailing 'L'
        canvas.svg << "<path d=\"" << band_path << " Z\" fill=\"" << stroke
                   << "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";

        std::ostringstream line;
        for (const SummaryBucket* b : pts)
            line << canvas.px(static_cast<double>(b->step)) << "," << canvas.py(b->mean_return)
                 << " ";
        canvas.svg << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << stroke
                   << "\" stroke-width=\"1.6\"/>\n";

        canvas.svg << "<rect x=\"" << canvas.width - canvas.margin_right + 16 << "\" y=\""
                   << legend_y - 9 << "\" width=\"14\" height=\"4\" fill=\"" << stroke << "\"/>\n";
        canvas.svg << "<text x=\"" << canvas.width - canvas.margin_right + 36 << "\" y=\""
                   << legend_y - 3 << "\" font-family=\"sans-serif\" font-size=\"12\">" << algo
                   << "</text>\n";
        legend_y += 18;
        ++color;
    }
    canvas.close();
    canvas.save(path);
}

void write_convergence_boxplot(const std::string& path, const std::vector<MetricsRow>& rows,
                               const PlotSpec& spec) {
    // One sample per converged run; non-converging runs only affect the rate.
    std::map<std::string, std::map<int, std::pair<bool, long>>> per_algo;
    for (const MetricsRow& r : rows)
        per_algo[r.algorithm][r.run_id] = {r.converged, r.steps_to_convergence};

    struct Group {
        std::string algorithm;
        std::vector<double> values;
        int total_runs = 0;
        double rate = 0.0;
    };
    std::vector<Group> groups;
    for (const auto& [algo, runs] : per_algo) {
        Group g;
        g.algorithm = algo;
        g.total_runs = static_cast<int>(runs.size());
        for (const auto& [run, info] : runs)
            if (info.first) g.values.push_back(static_cast<double>(info.second));
        std::sort(g.values.begin(), g.values.end());
        g.rate = g.total_runs ? static_cast<double>(g.values.size()) / g.total_runs : 0.0;
        if (spec.best_fraction < 1.0) {
            const std::size_t keep = best_fraction_count(spec.best_fraction, g.total_runs);
            if (g.values.size() > keep) g.values.resize(keep);
        }
        groups.push_back(std::move(g));
    }

    Canvas canvas(spec.width, spec.height);
    canvas.margin_right = 40;
    double y_max = 1.0;
    for (const Group& g : groups)
        for (double v : g.values) y_max = std::max(y_max, v);
    canvas.x_min = 0;
    canvas.x_max = static_cast<double>(groups.size());
    canvas.y_min = 0;
    canvas.y_max = y_max * 1.12;

    canvas.open(spec.title);
    canvas.axes("", "steps to convergence");

    for (std::size_t i = 0; i < groups.size(); ++i) {
        const Group& g = groups[i];
        const double cx = canvas.px(static_cast<double>(i) + 0.5);
        const double half = 0.3 * (canvas.px(1) - canvas.px(0));
        canvas.svg << "<text x=\"" << cx << "\" y=\"" << canvas.py(canvas.y_min) + 32
                   << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
                   << g.algorithm << "</text>\n";
        canvas.svg << "<text x=\"" << cx << "\" y=\"" << canvas.margin_top + 12
                   << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
                   << std::llround(g.rate * 100.0) << "%</text>\n";
        if (g.values.empty()) continue;

        const BoxStats s = box_stats(g.values);
        canvas.svg << "<line x1=\"" << cx << "\" y1=\"" << canvas.py(s.whisker_lo) << "\" x2=\""
                   << cx << "\" y2=\"" << canvas.py(s.q1) << "\" stroke=\"black\"/>\n";
        canvas.svg << "<line x1=\"" << cx << "\" y1=\"" << canvas.py(s.q3) << "\" x2=\"" << cx
                   << "\" y2=\"" << canvas.py(s.whisker_hi) << "\" stroke=\"black\"/>\n";
        canvas.svg << "<rect x=\"" << cx - half << "\" y=\"" << canvas.py(s.q3) << "\" width=\""
                   << 2 * half << "\" height=\"" << canvas.py(s.q1) - canvas.py(s.q3)
                   << "\" fill=\"#cfe2f3\" stroke=\"black\"/>\n";
        canvas.svg << "<line x1=\"" << cx - half << "\" y1=\"" << canvas.py(s.median)
                   << "\" x2=\"" << cx + half << "\" y2=\"" << canvas.py(s.median)
                   << "\" stroke=\"#ff7f0e\" stroke-width=\"2\"/>\n";
        canvas.svg << "<line x1=\"" << cx - half << "\" y1=\"" << canvas.py(s.mean) << "\" x2=\""
                   << cx + half << "\" y2=\"" << canvas.py(s.mean)
                   << "\" stroke=\"#2ca02c\" stroke-width=\"2\" stroke-dasharray=\"4,3\"/>\n";
        for (double v : s.outliers)
            canvas.svg << "<circle cx=\"" << cx << "\" cy=\"" << canvas.py(v)
                       << "\" r=\"2.5\" fill=\"none\" stroke=\"black\"/>\n";
    }
    canvas.close();
    canvas.save(path);
}

std::vector<std::string> emit_plots(const std::vector<MetricsRow>& rows,
                                    const std::string& out_dir, const PlotSpec& spec) {
    if (rows.empty()) return {};
    std::filesystem::create_directories(out_dir);
    const std::string returns_path = out_dir + "/returns.svg";
    const std::string box_path = out_dir + "/convergence_box.svg";
    PlotSpec returns_spec = spec;
    returns_spec.title = "training return";
    write_return_chart(returns_path, rows, returns_spec);
    PlotSpec box_spec = spec;
    box_spec.title = spec.best_fraction < 1.0 ? "steps to convergence (best runs)"
                                              : "steps to convergence";
    write_convergence_boxplot(box_path, rows, box_spec);
    return {returns_path, box_path};
}

}  // namespace readc
