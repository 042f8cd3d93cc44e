#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "readc/experiment.hpp"
#include "readc/svg_plot.hpp"

using namespace readc;

TEST_SUITE_BEGIN("harness");

namespace {

const std::string kBoards = READC_BOARDS_DIR;

std::string tiny_config(const std::string& algorithm) {
    return "[experiment]\n"
           "domain = keylock\n"
           "board = " + kBoards + "/keylock3.txt\n"
           "algorithm = " + algorithm + "\n"
           "n_runs = 2\n"
           "base_seed = 11\n"
           "step_budget = 700\n"
           "convergence_reward = 1400\n"
           "convergence_window = 5\n"
           "[network]\n"
           "hidden_width = 16\n"
           "[curriculum]\n"
           "max_length = 1\n"
           "eta = 150\n"
           "beta = 60\n"
           "[baselines]\n"
           "n_source_tasks = 3\n"
           "mpc_steps = 1\n"
           "steps_prior = 120\n"
           "steps_per_task = 40\n";
}

std::vector<MetricsRow> synthetic_rows() {
    std::vector<MetricsRow> rows;
    Rng rng(7);
    for (int run = 0; run < 10; ++run) {
        long step = 0;
        const bool converged = run < 3;
        for (int ep = 1; ep <= 30; ++ep) {
            step += 40 + static_cast<long>(rng.uniform_index(30));
            MetricsRow r;
            r.run_id = run;
            r.seed = 100 + run;
            r.algorithm = run % 2 ? "alpha" : "beta";
            r.global_step = step;
            r.episode = ep;
            r.phase = "target";
            r.episode_return = rng.uniform(-400.0, 1500.0);
            r.converged = converged;
            r.steps_to_convergence = converged ? 500 + run * 100 : -1;
            rows.push_back(std::move(r));
        }
    }
    return rows;
}

}  // namespace

TEST_CASE("config parsing applies sections and rejects unknown keys") {
    const ExperimentConfig cfg = parse_config(tiny_config("none"));
    CHECK(cfg.domain == "keylock");
    CHECK(cfg.step_budget == 700);
    CHECK(cfg.eta == 150);
    CHECK(cfg.hidden_width == 16);
    CHECK(cfg.buffer_size == 40000);  // untouched defaults stay at table values
    CHECK(cfg.batch_size == 16);
    CHECK(cfg.epsilon_decay == 0.995);
    CHECK(cfg.cluster_cutoff == 3.0);
    CHECK(cfg.max_length == 1);

    CHECK_THROWS_AS(parse_config("[experiment]\nnot_a_key = 3\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[wrong]\ndomain = keylock\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("[network]\ndomain = keylock\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config(tiny_config("nonsense")), std::invalid_argument);
}

TEST_CASE("config overrides reuse the key table") {
    ExperimentConfig cfg = parse_config(tiny_config("none"));
    apply_override(cfg, "algorithm=random");
    apply_override(cfg, "experiment.step_budget=900");
    CHECK(cfg.algorithm == "random");
    CHECK(cfg.step_budget == 900);
    CHECK_THROWS_AS(apply_override(cfg, "bogus=2"), std::invalid_argument);
    CHECK_THROWS_AS(apply_override(cfg, "no_equals"), std::invalid_argument);
}

TEST_CASE("metrics csv round-trips") {
    const std::vector<MetricsRow> rows = synthetic_rows();
    std::ostringstream out;
    write_metrics_csv(out, rows);
    std::istringstream in(out.str());
    const std::vector<MetricsRow> back = read_metrics_csv(in);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].run_id == rows[i].run_id);
        CHECK(back[i].algorithm == rows[i].algorithm);
        CHECK(back[i].global_step == rows[i].global_step);
        CHECK(back[i].episode_return == doctest::Approx(rows[i].episode_return).epsilon(1e-6));
        CHECK(back[i].converged == rows[i].converged);
        CHECK(back[i].steps_to_convergence == rows[i].steps_to_convergence);
    }
}

TEST_CASE("steps_to_convergence is present exactly when the flag is set") {
    std::vector<MetricsRow> rows = synthetic_rows();
    std::ostringstream out;
    write_metrics_csv(out, rows);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (cells.size() == 11) cells.push_back("");  // empty trailing field
        REQUIRE(cells.size() == 12);
        const bool flag = cells[9] == "1";
        CHECK(cells[10].empty() == !flag);
    }
}

TEST_CASE("first_convergence_step finds the earliest full window") {
    const std::vector<double> returns{0, 0, 5, 5, 5, 2, 5, 5, 5, 5};
    const std::vector<long> steps{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    const auto got = first_convergence_step(returns, steps, 5.0, 3);
    REQUIRE(got.has_value());
    CHECK(*got == 50);
    CHECK_FALSE(first_convergence_step(returns, steps, 5.0, 5).has_value());
}

TEST_CASE("return summaries match an independent re-aggregation") {
    const std::vector<MetricsRow> rows = synthetic_rows();
    const long bucket = 250;
    const std::vector<SummaryBucket> got = summarize_returns(rows, bucket);

    for (const SummaryBucket& b : got) {
        std::map<int, std::pair<double, int>> per_run;
        for (const MetricsRow& r : rows) {
            if (r.algorithm != b.algorithm) continue;
            if ((r.global_step / bucket + 1) * bucket != b.step) continue;
            per_run[r.run_id].first += r.episode_return;
            per_run[r.run_id].second += 1;
        }
        REQUIRE(static_cast<int>(per_run.size()) == b.n_runs);
        std::vector<double> means;
        for (const auto& [run, acc] : per_run) means.push_back(acc.first / acc.second);
        double mean = 0.0;
        for (double m : means) mean += m;
        mean /= means.size();
        CHECK(b.mean_return == doctest::Approx(mean).epsilon(1e-12));
        if (means.size() > 1) {
            double var = 0.0;
            for (double m : means) var += (m - mean) * (m - mean);
            const double half = 1.96 * std::sqrt(var / (means.size() - 1)) /
                                std::sqrt(static_cast<double>(means.size()));
            CHECK(b.ci_half_width == doctest::Approx(half).epsilon(1e-12));
        } else {
            CHECK(b.ci_half_width == 0.0);
        }
    }
}

TEST_CASE("convergence summary reports the rate over runs") {
    const std::vector<MetricsRow> rows = synthetic_rows();  // 3 of 10 runs converged
    const std::vector<ConvergenceStats> stats = summarize_convergence(rows);
    int runs = 0, converged = 0;
    for (const ConvergenceStats& s : stats) {
        runs += s.runs;
        converged += s.converged;
    }
    CHECK(runs == 10);
    CHECK(converged == 3);
    const double rate = static_cast<double>(converged) / runs;
    CHECK(rate == doctest::Approx(0.3));
}

TEST_CASE("box statistics agree with the quantile oracle") {
    Rng rng(17);
    std::vector<double> values;
    for (int i = 0; i < 37; ++i) values.push_back(rng.uniform(0.0, 1000.0));
    const BoxStats s = box_stats(values);
    CHECK(s.q1 == doctest::Approx(oracles::quantile_reference(values, 0.25)).epsilon(1e-12));
    CHECK(s.median == doctest::Approx(oracles::quantile_reference(values, 0.5)).epsilon(1e-12));
    CHECK(s.q3 == doctest::Approx(oracles::quantile_reference(values, 0.75)).epsilon(1e-12));
    double mean = 0.0;
    for (double v : values) mean += v;
    CHECK(s.mean == doctest::Approx(mean / values.size()).epsilon(1e-12));
}

TEST_CASE("best-fraction keeps llround(fraction * runs) samples") {
    CHECK(best_fraction_count(0.8, 10) == 8);
    CHECK(best_fraction_count(0.8, 25) == 20);
    CHECK(best_fraction_count(0.5, 3) == 2);
}

TEST_CASE("identical configs and seeds produce byte-identical metrics") {
    const ExperimentConfig cfg = parse_config(tiny_config("none"));
    const ExperimentResult a = run_experiment(cfg);
    const ExperimentResult b = run_experiment(cfg);
    std::ostringstream csv_a, csv_b;
    write_metrics_csv(csv_a, a.rows);
    write_metrics_csv(csv_b, b.rows);
    CHECK(csv_a.str() == csv_b.str());
    REQUIRE(a.runs.size() == b.runs.size());
    for (std::size_t i = 0; i < a.runs.size(); ++i)
        CHECK(a.runs[i].init_weight_hash == b.runs[i].init_weight_hash);
}

TEST_CASE("initial weights per seed are identical across algorithms") {
    const ExperimentConfig none_cfg = parse_config(tiny_config("none"));
    ExperimentConfig random_cfg = parse_config(tiny_config("random"));
    const ExperimentResult none_result = run_experiment(none_cfg);
    const ExperimentResult random_result = run_experiment(random_cfg);
    REQUIRE(none_result.runs.size() == random_result.runs.size());
    for (std::size_t i = 0; i < none_result.runs.size(); ++i) {
        CHECK(none_result.runs[i].seed == random_result.runs[i].seed);
        CHECK(none_result.runs[i].init_weight_hash == random_result.runs[i].init_weight_hash);
    }
}

TEST_CASE("max-policy-change runs carry their overhead into the metrics") {
    const ExperimentConfig cfg = parse_config(tiny_config("max-policy-change"));
    const ExperimentResult result = run_experiment(cfg);
    const long expected = mpc_overhead(1, 120, 40, 3);
    REQUIRE(!result.rows.empty());
    for (const RunSummary& r : result.runs) CHECK(r.overhead_steps == expected);
    long first_step = result.rows.front().global_step;
    CHECK(first_step > expected);  // curves start beyond the offset

    const ExperimentConfig none_cfg = parse_config(tiny_config("none"));
    const ExperimentResult none_result = run_experiment(none_cfg);
    for (const RunSummary& r : none_result.runs) CHECK(r.overhead_steps == 0);
}

TEST_CASE("plot emission writes both figures and handles empty input") {
    const std::vector<MetricsRow> rows = synthetic_rows();
    const std::string dir = "plot_smoke";
    std::filesystem::remove_all(dir);
    const auto files = emit_plots(rows, dir);
    REQUIRE(files.size() == 2);
    for (const std::string& f : files) {
        CHECK(std::filesystem::exists(f));
        std::ifstream in(f);
        std::string content((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
        CHECK(content.find("<svg") != std::string::npos);
    }
    CHECK(emit_plots({}, dir).empty());
}

TEST_CASE("a single-run chart has zero-width confidence bands") {
    std::vector<MetricsRow> rows;
    for (int ep = 1; ep <= 20; ++ep) {
        MetricsRow r;
        r.run_id = 0;
        r.algorithm = "solo";
        r.global_step = ep * 50;
        r.episode = ep;
        r.episode_return = 100.0 + ep;
        rows.push_back(std::move(r));
    }
    for (const SummaryBucket& b : summarize_returns(rows, 100)) {
        CHECK(b.n_runs == 1);
        CHECK(b.ci_half_width == 0.0);
    }
}

TEST_CASE("run failures on divergence are contained") {
    // A learning rate huge enough to blow the loss up to non-finite values.
    ExperimentConfig cfg = parse_config(tiny_config("none"));
    apply_override(cfg, "alpha=1e150");
    apply_override(cfg, "n_runs=1");
    const ExperimentResult result = run_experiment(cfg);
    REQUIRE(result.runs.size() == 1);
    // Either the run diverged and was recorded as failed, or it survived;
    // in both cases the experiment completes.
    if (result.runs[0].failed) CHECK_FALSE(result.runs[0].error.empty());
}

TEST_SUITE_END();
