#include "readc/uncertainty.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace readc {

namespace {

struct Summary {
    double max = 0.0, mean = 0.0, std = 0.0;
};

// (max, mean, std) of the L2-normalized vector; zero vectors summarize to 0.
Summary normalized_summary(std::span<const double> v) {
    Summary s;
    if (v.empty()) return s;
    double norm_sq = 0.0;
    for (double x : v) norm_sq += x * x;
    const double norm = std::sqrt(norm_sq);
    if (norm == 0.0) return s;

    double sum = 0.0;
    double max = -std::numeric_limits<double>::infinity();
    for (double x : v) {
        const double z = x / norm;
        sum += z;
        max = std::max(max, z);
    }
    const double mean = sum / static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) {
        const double d = x / norm - mean;
        var += d * d;
    }
    s.max = max;
    s.mean = mean;
    s.std = std::sqrt(var / static_cast<double>(v.size()));
    return s;
}

}  // namespace

std::array<double, UncertaintyRecord::kFeatureCount> UncertaintyRecord::features() const {
    return {rel_entropy, entropy_cur, entropy_past, q_past_max, q_past_mean,
            q_past_std,  q_cur_max,   q_cur_mean,   q_cur_std,  static_cast<double>(visit_count)};
}

UncertaintyRecord extract_features(std::span<const double> q_past, std::span<const double> q_cur,
                                   int visits) {
    if (q_past.size() != q_cur.size())
        throw std::invalid_argument("extract_features: action dimensionality mismatch");
    const DiscreteDist p_past = q_to_probs(q_past);
    const DiscreteDist p_cur = q_to_probs(q_cur);

    UncertaintyRecord rec;
    rec.rel_entropy = discrete_kl(p_cur, p_past);  // current policy against its past self
    rec.entropy_cur = entropy(p_cur);
    rec.entropy_past = entropy(p_past);
    const Summary past = normalized_summary(q_past);
    const Summary cur = normalized_summary(q_cur);
    rec.q_past_max = past.max;
    rec.q_past_mean = past.mean;
    rec.q_past_std = past.std;
    rec.q_cur_max = cur.max;
    rec.q_cur_mean = cur.mean;
    rec.q_cur_std = cur.std;
    rec.visit_count = visits;
    return rec;
}

UncertaintyRecord extract_features(const GaussianDist& past, const GaussianDist& cur, int visits) {
    UncertaintyRecord rec;
    rec.rel_entropy = gaussian_kl(cur, past);
    rec.entropy_cur = entropy(cur);
    rec.entropy_past = entropy(past);

    Vec past_params = past.mean;
    past_params.insert(past_params.end(), past.stddev.begin(), past.stddev.end());
    Vec cur_params = cur.mean;
    cur_params.insert(cur_params.end(), cur.stddev.begin(), cur.stddev.end());
    const Summary p = normalized_summary(past_params);
    const Summary c = normalized_summary(cur_params);
    rec.q_past_max = p.max;
    rec.q_past_mean = p.mean;
    rec.q_past_std = p.std;
    rec.q_cur_max = c.max;
    rec.q_cur_mean = c.mean;
    rec.q_cur_std = c.std;
    rec.visit_count = visits;
    return rec;
}

UncertaintyRecord extract_features(const Agent& past, const Agent& cur, const StateVector& obs,
                                   int visits) {
    const PolicyDistribution p = past.policy(obs);
    if (std::holds_alternative<GaussianDist>(p)) {
        return extract_features(std::get<GaussianDist>(p),
                                std::get<GaussianDist>(cur.policy(obs)), visits);
    }
    return extract_features(past.head_values(obs), cur.head_values(obs), visits);
}

std::vector<double> td_scores(const Agent& agent, const Agent& teacher,
                              std::span<const Candidate> candidates,
                              bool gaussian_drop_half_term) {
    std::vector<double> scores;
    scores.reserve(candidates.size());
    for (const Candidate& c : candidates) {
        scores.push_back(policy_kl(teacher.policy(c.observation), agent.policy(c.observation),
                                   gaussian_drop_half_term));
    }
    return scores;
}

std::size_t select_from_scores(std::span<const Candidate> candidates,
                               std::span<const double> scores, Rng& rng, SelectionAudit* audit) {
    if (candidates.empty()) throw std::invalid_argument("select: no candidates");
    if (candidates.size() != scores.size())
        throw std::invalid_argument("select: scores do not align with candidates");

    bool clustered = false;
    int max_cluster = -1;
    for (const Candidate& c : candidates) {
        if (c.cluster >= 0) clustered = true;
        max_cluster = std::max(max_cluster, c.cluster);
    }

    std::size_t chosen = 0;
    int chosen_region = -1;
    if (!clustered) {
        for (std::size_t i = 1; i < candidates.size(); ++i)
            if (scores[i] > scores[chosen] + kScoreTieTolerance) chosen = i;
        if (audit) {
            audit->region_score.assign(scores.begin(), scores.end());
            audit->region_size.assign(candidates.size(), 1);
        }
        chosen_region = static_cast<int>(chosen);
    } else {
        std::vector<double> sum(max_cluster + 1, 0.0);
        std::vector<std::size_t> count(max_cluster + 1, 0);
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            if (candidates[i].cluster < 0)
                throw std::invalid_argument("select: mixed clustered and unclustered candidates");
            sum[candidates[i].cluster] += scores[i];
            ++count[candidates[i].cluster];
        }
        int best = -1;
        double best_score = -std::numeric_limits<double>::infinity();
        std::vector<double> region_scores(max_cluster + 1, 0.0);
        for (int c = 0; c <= max_cluster; ++c) {
            if (count[c] == 0) continue;
            region_scores[c] = sum[c] / static_cast<double>(count[c]);
            if (region_scores[c] > best_score + kScoreTieTolerance || best < 0) {
                best_score = region_scores[c];
                best = c;
            }
        }
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < candidates.size(); ++i)
            if (candidates[i].cluster == best) members.push_back(i);
        chosen = members[rng.uniform_index(members.size())];
        chosen_region = best;
        if (audit) {
            audit->region_score = std::move(region_scores);
            audit->region_size.assign(count.begin(), count.end());
        }
    }

    if (audit) {
        audit->state_uncertainty.assign(scores.begin(), scores.end());
        audit->chosen_region = chosen_region;
        audit->chosen_index = chosen;
        audit->chosen_uncertainty = scores[chosen];
    }
    return chosen;
}

std::size_t td_select(const Agent& agent, const Agent& teacher,
                      std::span<const Candidate> candidates, Rng& rng, SelectionAudit* audit,
                      bool gaussian_drop_half_term) {
    if (candidates.empty()) throw std::invalid_argument("td_select: no candidates");
    const std::vector<double> scores = td_scores(agent, teacher, candidates, gaussian_drop_half_term);
    return select_from_scores(candidates, scores, rng, audit);
}

std::vector<std::size_t> sample_candidate_indices(const StateBuffer& sb, std::size_t cap,
                                                  Rng& rng) {
    if (sb.size() == 0) throw std::invalid_argument("sample_candidate_indices: empty state buffer");
    return rng.sample_without_replacement(sb.size(), std::min(sb.size(), cap));
}

SaScoring sa_score(Agent& agent, Env& env, StateBuffer& sb, ReplayBuffer& rb,
                   const UncertaintyPredictor& regressor, long beta, std::size_t subset_cap,
                   Rng& rng, TrainLog* log, const TrainOptions& options) {
    if (beta <= 0) throw std::invalid_argument("sa_score: beta must be positive");

    SaScoring result;
    // The subset is drawn before the extra training; states first visited
    // during it wait for the next selection round.
    result.subset = sample_candidate_indices(sb, subset_cap, rng);
    result.past = agent.clone();

    const TrainResult tr = train(agent, env, ConvergenceCriterion::fixed(beta), sb, rb, rng, log,
                                 options);
    result.steps_used = tr.steps;
    result.candidates.reserve(result.subset.size());
    result.scores.reserve(result.subset.size());
    for (std::size_t idx : result.subset) {
        const StateBuffer::Entry& e = sb.entry(idx);
        result.candidates.push_back(Candidate{e.state, e.observation, e.visits, -1});
        const UncertaintyRecord rec =
            extract_features(*result.past, agent, e.observation, e.visits);
        result.scores.push_back(regressor.predict(rec));
    }
    return result;
}

std::size_t sa_select(Agent& agent, Env& env, StateBuffer& sb, ReplayBuffer& rb,
                      const UncertaintyPredictor& regressor, long beta, Rng& rng,
                      std::size_t subset_cap, SelectionAudit* audit) {
    SaScoring scoring = sa_score(agent, env, sb, rb, regressor, beta, subset_cap, rng);
    const std::size_t local =
        select_from_scores(scoring.candidates, scoring.scores, rng, audit);
    return scoring.subset[local];
}

}  // namespace readc
