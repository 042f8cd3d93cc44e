#include <doctest.h>

#include <cmath>

#include "readc/grid_env.hpp"
#include "readc/regressor.hpp"
#include "readc/uncertainty.hpp"

using namespace readc;

TEST_SUITE_BEGIN("uncertainty");

namespace {

const std::string kBoards = READC_BOARDS_DIR;

// Agent whose Q-table is wired directly: observation e_i reads out column i.
std::unique_ptr<DqnAgent> table_agent(const std::vector<Vec>& q_columns, int n_actions) {
    AgentConfig cfg;
    cfg.epsilon = 0.0;
    Rng rng(1);
    auto agent = std::make_unique<DqnAgent>(static_cast<int>(q_columns.size()), n_actions, cfg, rng);
    Rng dummy(0);
    Mlp net({static_cast<int>(q_columns.size()), n_actions}, dummy);
    for (int a = 0; a < n_actions; ++a)
        for (std::size_t s = 0; s < q_columns.size(); ++s)
            net.weights()[0][static_cast<std::size_t>(a) * q_columns.size() + s] = q_columns[s][a];
    std::fill(net.biases()[0].begin(), net.biases()[0].end(), 0.0);
    agent->restore_networks(net);
    return agent;
}

std::vector<Candidate> one_hot_candidates(std::size_t n) {
    std::vector<Candidate> out;
    for (std::size_t i = 0; i < n; ++i) {
        StateVector obs(n, 0.0);
        obs[i] = 1.0;
        out.push_back(Candidate{EnvState{GridState{static_cast<int>(i), 0, 0, 0, 0}}, obs, 1, -1});
    }
    return out;
}

}  // namespace

TEST_CASE("identical checkpoints give zero divergence and equal entropies") {
    const Vec q{1.0, 2.0, 0.5, -0.3};
    const UncertaintyRecord rec = extract_features(q, q, 7);
    CHECK(rec.rel_entropy == doctest::Approx(0.0));
    CHECK(rec.entropy_cur == doctest::Approx(rec.entropy_past));
    CHECK(rec.visit_count == 7);  // plain passthrough
    CHECK(rec.q_cur_max == doctest::Approx(rec.q_past_max));
}

TEST_CASE("feature record composes the audited operations") {
    const Vec q_past{3.0, 4.0};
    const Vec q_cur{1.0, 0.0};
    const UncertaintyRecord rec = extract_features(q_past, q_cur, 2);

    const DiscreteDist p_past = q_to_probs(q_past);
    const DiscreteDist p_cur = q_to_probs(q_cur);
    CHECK(rec.rel_entropy == doctest::Approx(discrete_kl(p_cur, p_past)).epsilon(1e-12));
    CHECK(rec.entropy_cur == doctest::Approx(entropy(p_cur)).epsilon(1e-12));
    CHECK(rec.entropy_past == doctest::Approx(entropy(p_past)).epsilon(1e-12));
    // L2-normalized [3,4] -> [0.6, 0.8]: max 0.8, mean 0.7, std 0.1.
    CHECK(rec.q_past_max == doctest::Approx(0.8));
    CHECK(rec.q_past_mean == doctest::Approx(0.7));
    CHECK(rec.q_past_std == doctest::Approx(0.1));
    // Normalized [1,0]: max 1, mean 0.5, std 0.5.
    CHECK(rec.q_cur_max == doctest::Approx(1.0));
    CHECK(rec.q_cur_mean == doctest::Approx(0.5));
    CHECK(rec.q_cur_std == doctest::Approx(0.5));

    const auto f = rec.features();
    CHECK(f[0] == doctest::Approx(rec.rel_entropy));
    CHECK(f[9] == doctest::Approx(2.0));
    CHECK_THROWS_AS(extract_features(Vec{1.0}, Vec{1.0, 2.0}, 1), std::invalid_argument);
}

TEST_CASE("gaussian feature record uses the continuous forms") {
    const GaussianDist past = make_gaussian(Vec{0.0, 0.0}, Vec{1.0, 1.0});
    const GaussianDist cur = make_gaussian(Vec{1.0, 0.0}, Vec{1.0, 1.0});
    const UncertaintyRecord rec = extract_features(past, cur, 4);
    CHECK(rec.rel_entropy == doctest::Approx(gaussian_kl(cur, past)).epsilon(1e-12));
    CHECK(rec.entropy_cur == doctest::Approx(entropy(cur)).epsilon(1e-12));
    CHECK(rec.visit_count == 4);
}

TEST_CASE("td_select returns the most divergent state with low-index ties") {
    // Teacher and agent agree sharply on states 0 and 2, disagree on state 1.
    const std::vector<Vec> teacher_q{{10.0, 0.0, 0.0, 0.0},
                                     {10.0, 0.0, 0.0, 0.0},
                                     {0.0, 0.0, 10.0, 0.0}};
    const std::vector<Vec> agent_q{{10.0, 0.0, 0.0, 0.0},
                                   {0.0, 10.0, 0.0, 0.0},
                                   {0.0, 0.0, 10.0, 0.0}};
    auto teacher = table_agent(teacher_q, 4);
    auto agent = table_agent(agent_q, 4);
    const std::vector<Candidate> candidates = one_hot_candidates(3);

    Rng rng(3);
    SelectionAudit audit;
    const std::size_t pick = td_select(*agent, *teacher, candidates, rng, &audit);
    CHECK(pick == 1);
    CHECK(audit.chosen_uncertainty == doctest::Approx(audit.state_uncertainty[1]));
    for (double u : audit.state_uncertainty) CHECK(audit.chosen_uncertainty >= u);

    // Identical models: all scores zero, ties resolve to the first candidate.
    auto twin = table_agent(agent_q, 4);
    const std::size_t tie = td_select(*agent, *twin, candidates, rng);
    CHECK(tie == 0);
}

TEST_CASE("a sub-1e-12 score tie keeps the deterministic low-index rule") {
    std::vector<Candidate> candidates = one_hot_candidates(2);
    Rng rng(9);
    const std::vector<double> near_tie{0.5, 0.5 + 1e-15};
    CHECK(select_from_scores(candidates, near_tie, rng) == 0);
    const std::vector<double> exact{0.5, 0.5};
    CHECK(select_from_scores(candidates, exact, rng) == 0);
    const std::vector<double> clear{0.5, 0.5 + 1e-9};
    CHECK(select_from_scores(candidates, clear, rng) == 1);
}

TEST_CASE("adding a constant to every score never changes the selection") {
    Rng rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(20);
        std::vector<Candidate> candidates = one_hot_candidates(n);
        std::vector<double> scores(n);
        for (double& s : scores) s = rng.uniform(0.0, 5.0);
        const double shift = rng.uniform(-100.0, 100.0);
        std::vector<double> shifted = scores;
        for (double& s : shifted) s += shift;

        Rng pick_a(trial);
        Rng pick_b(trial);
        CHECK(select_from_scores(candidates, scores, pick_a) ==
              select_from_scores(candidates, shifted, pick_b));
    }
}

TEST_CASE("clustered selection aggregates scores per region") {
    std::vector<Candidate> candidates = one_hot_candidates(4);
    candidates[0].cluster = 0;
    candidates[1].cluster = 0;
    candidates[2].cluster = 1;
    candidates[3].cluster = 1;
    // Cluster 0 mean 2.0 beats cluster 1 mean 1.5 despite the global max 3.
    const std::vector<double> scores{2.0, 2.0, 3.0, 0.0};
    Rng rng(13);
    SelectionAudit audit;
    const std::size_t pick = select_from_scores(candidates, scores, rng, &audit);
    CHECK(audit.chosen_region == 0);
    CHECK((pick == 0 || pick == 1));
    CHECK(audit.region_score[0] == doctest::Approx(2.0));
    CHECK(audit.region_score[1] == doctest::Approx(1.5));
}

TEST_CASE("candidate subsets cover the whole buffer when it is small") {
    GridEnv env(load_board(kBoards + "/keylock3.txt"));
    StateBuffer sb;
    for (int y = 0; y < 3; ++y) sb.record(env, EnvState{GridState{0, y, 0, 0, 0}});
    Rng rng(17);
    const std::vector<std::size_t> subset = sample_candidate_indices(sb, 2000, rng);
    CHECK(subset == std::vector<std::size_t>{0, 1, 2});  // every state exactly once
}

TEST_CASE("sa scoring predicts from the recomputed checkpoint features") {
    GridEnv env(load_board(kBoards + "/keylock3.txt"));
    AgentConfig cfg;
    cfg.hidden_width = 16;
    Rng init(19);
    DqnAgent agent(env.observation_dim(), env.action_size(), cfg, init);
    StateBuffer sb;
    ReplayBuffer rb(1000);
    Rng rng(23);
    train(agent, env, ConvergenceCriterion::fixed(60), sb, rb, rng);  // warm-up fills SB

    // Regressor that reads out the divergence feature directly, so the
    // selection is exactly the state with the largest policy shift.
    LinearModel shift_reader;
    shift_reader.intercept = 0.0;
    shift_reader.coefficients = Vec(UncertaintyRecord::kFeatureCount, 0.0);
    shift_reader.coefficients[0] = 1.0;

    SaScoring scoring = sa_score(agent, env, sb, rb, shift_reader, 120, 2000, rng);
    CHECK(scoring.steps_used == 120);
    REQUIRE(!scoring.candidates.empty());
    REQUIRE(scoring.past != nullptr);

    std::size_t best = 0;
    for (std::size_t i = 0; i < scoring.candidates.size(); ++i) {
        const Candidate& c = scoring.candidates[i];
        const UncertaintyRecord rec = extract_features(*scoring.past, agent, c.observation, c.visits);
        CHECK(scoring.scores[i] == doctest::Approx(shift_reader.predict(rec)).epsilon(1e-12));
        if (scoring.scores[i] > scoring.scores[best]) best = i;
    }
    Rng pick(29);
    CHECK(select_from_scores(scoring.candidates, scoring.scores, pick) == best);
}

TEST_CASE("a constant regressor forces the first-candidate tie rule") {
    GridEnv env(load_board(kBoards + "/keylock3.txt"));
    AgentConfig cfg;
    cfg.hidden_width = 16;
    Rng init(31);
    DqnAgent agent(env.observation_dim(), env.action_size(), cfg, init);
    StateBuffer sb;
    ReplayBuffer rb(1000);
    Rng rng(37);
    train(agent, env, ConvergenceCriterion::fixed(40), sb, rb, rng);
    const GbmModel constant = make_gbm(0.7, 0.1, {});
    const std::size_t pick = sa_select(agent, env, sb, rb, constant, 60, rng);
    CHECK(pick == 0);
}

TEST_CASE("selection rejects degenerate inputs") {
    auto agent = table_agent({{1.0, 0.0}}, 2);
    Rng rng(1);
    CHECK_THROWS_AS(td_select(*agent, *agent, {}, rng), std::invalid_argument);

    GridEnv env(load_board(kBoards + "/keylock3.txt"));
    StateBuffer sb;
    ReplayBuffer rb(100);
    const GbmModel constant = make_gbm(0.0, 0.1, {});
    AgentConfig cfg;
    Rng init(2);
    DqnAgent real(env.observation_dim(), env.action_size(), cfg, init);
    CHECK_THROWS_AS(sa_select(real, env, sb, rb, constant, 0, rng), std::invalid_argument);
}

TEST_SUITE_END();
