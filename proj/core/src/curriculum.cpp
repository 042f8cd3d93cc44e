#include "readc/curriculum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace readc {

void write_plan_csv(std::ostream& out, const CurriculumPlan& plan, int run_id, bool with_header) {
    if (with_header)
        out << "run_id,step,state,uncertainty,candidates,cluster,steps,episodes,completed,"
               "overhead_steps,entropy_trace\n";
    char buf[64];
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
        const CurriculumStepRecord& s = plan.steps[i];
        out << run_id << ',' << i + 1 << ',' << s.state_key << ',';
        std::snprintf(buf, sizeof(buf), "%.6f", s.selection_uncertainty);
        out << buf << ',' << s.candidate_count << ',' << s.chosen_cluster << ',' << s.steps << ','
            << s.episodes << ',' << (plan.completed ? 1 : 0) << ',' << plan.overhead_steps << ',';
        for (std::size_t t = 0; t < s.entropy_trace.size(); ++t) {
            std::snprintf(buf, sizeof(buf), "%.6f", s.entropy_trace[t]);
            out << (t ? "|" : "") << buf;
        }
        out << '\n';
    }
}

const char* heuristic_name(Heuristic h) {
    switch (h) {
        case Heuristic::MaxEntropy: return "max-entropy";
        case Heuristic::Proximity: return "proximity";
        case Heuristic::MaxDistance: return "max-distance";
    }
    return "unknown";
}

std::vector<Region> build_regions(std::span<const Candidate> candidates,
                                  std::span<const double> scores,
                                  const ClusterSettings& settings) {
    std::vector<Region> regions;
    if (settings.mode == ClusterSettings::Mode::Off) {
        regions.reserve(candidates.size());
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            Region r;
            r.members = {i};
            r.centroid = candidates[i].observation;
            r.score = scores[i];
            regions.push_back(std::move(r));
        }
        return regions;
    }

    std::vector<StateVector> points;
    points.reserve(candidates.size());
    for (const Candidate& c : candidates) points.push_back(c.observation);
    const ClusterPartition part = settings.mode == ClusterSettings::Mode::Cutoff
                                      ? ward_cluster(points, settings.cutoff)
                                      : ward_cluster_count(points, settings.count);
    regions.reserve(part.clusters.size());
    for (std::size_t c = 0; c < part.clusters.size(); ++c) {
        Region r;
        r.members = part.clusters[c];
        r.centroid = part.centroids[c];
        double sum = 0.0;
        for (std::size_t idx : r.members) sum += scores[idx];
        r.score = sum / static_cast<double>(r.members.size());
        regions.push_back(std::move(r));
    }
    return regions;
}

namespace {

double euclidean(std::span<const double> a, std::span<const double> b) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        d2 += d * d;
    }
    return std::sqrt(d2);
}

// Mean member-to-terminal distance of a region.
double region_terminal_distance(const Region& region, std::span<const Candidate> candidates,
                                std::span<const StateVector> terminals) {
    double sum = 0.0;
    for (std::size_t idx : region.members)
        for (const StateVector& t : terminals)
            sum += euclidean(candidates[idx].observation, t);
    return sum / static_cast<double>(region.members.size() * terminals.size());
}

}  // namespace

std::vector<std::size_t> heuristic_filter(const std::vector<Region>& regions,
                                          std::span<const Candidate> candidates,
                                          std::span<const StateVector> terminal_observations,
                                          Heuristic heuristic) {
    std::vector<std::size_t> all(regions.size());
    std::iota(all.begin(), all.end(), 0);
    if (heuristic == Heuristic::MaxEntropy || regions.empty()) return all;

    if (heuristic == Heuristic::Proximity) {
        if (terminal_observations.empty()) return all;
        const std::size_t keep =
            static_cast<std::size_t>(std::ceil(0.2 * static_cast<double>(regions.size())));
        std::vector<std::pair<double, std::size_t>> ranked;
        ranked.reserve(regions.size());
        for (std::size_t r = 0; r < regions.size(); ++r)
            ranked.emplace_back(
                region_terminal_distance(regions[r], candidates, terminal_observations), r);
        std::sort(ranked.begin(), ranked.end());  // ties settle on the lower index
        std::vector<std::size_t> kept;
        kept.reserve(keep);
        for (std::size_t i = 0; i < keep && i < ranked.size(); ++i) kept.push_back(ranked[i].second);
        std::sort(kept.begin(), kept.end());
        return kept;
    }

    // MaxDistance: classify by mean +/- one stddev of the region scores.
    double mean = 0.0;
    for (const Region& r : regions) mean += r.score;
    mean /= static_cast<double>(regions.size());
    double var = 0.0;
    for (const Region& r : regions) var += (r.score - mean) * (r.score - mean);
    const double stddev = std::sqrt(var / static_cast<double>(regions.size()));

    std::vector<std::size_t> high, low;
    for (std::size_t r = 0; r < regions.size(); ++r) {
        if (regions[r].score > mean + stddev) high.push_back(r);
        if (regions[r].score < mean - stddev) low.push_back(r);
    }
    if (high.empty() || low.empty()) return all;  // degenerate spread

    std::size_t best = high[0];
    double best_distance = -1.0;
    for (std::size_t h : high) {
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t l : low)
            nearest = std::min(nearest, euclidean(regions[h].centroid, regions[l].centroid));
        if (nearest > best_distance) {
            best_distance = nearest;
            best = h;
        }
    }
    return {best};
}

namespace {

struct SelectionOutcome {
    std::size_t candidate_index = 0;
    double uncertainty = 0.0;
    std::size_t candidate_count = 0;
    int chosen_region = -1;
    std::size_t region_count = 0;
};

SelectionOutcome pick_start(std::span<const Candidate> candidates,
                            std::span<const double> scores, const CurriculumConfig& cfg,
                            std::span<const StateVector> terminal_obs, Rng& rng) {
    const std::vector<Region> regions = build_regions(candidates, scores, cfg.clustering);
    const std::vector<std::size_t> kept =
        heuristic_filter(regions, candidates, terminal_obs, cfg.heuristic);

    std::size_t best_region = kept.front();
    for (std::size_t r : kept)
        if (regions[r].score > regions[best_region].score + kScoreTieTolerance) best_region = r;

    const auto& members = regions[best_region].members;
    std::size_t chosen = members.front();
    if (cfg.clustering.mode != ClusterSettings::Mode::Off && members.size() > 1)
        chosen = members[rng.uniform_index(members.size())];

    SelectionOutcome out;
    out.candidate_index = chosen;
    out.uncertainty = scores[chosen];
    out.candidate_count = candidates.size();
    out.chosen_region = static_cast<int>(best_region);
    out.region_count = regions.size();
    return out;
}

}  // namespace

CurriculumPlan run_readc(Env& env, Agent& agent, const CurriculumConfig& cfg,
                         const ReadcContext& ctx, StateBuffer& sb, ReplayBuffer& rb, Rng& rng,
                         TrainLog* log, std::vector<SelectionLogRow>* selection_log) {
    if (cfg.variant == Variant::TeacherDependent && !ctx.teacher)
        throw std::invalid_argument("run_readc: teacher-dependent variant without a teacher");
    if (cfg.variant == Variant::SelfAssessed && !ctx.regressor)
        throw std::invalid_argument("run_readc: self-assessed variant without a regressor");

    CurriculumPlan plan;
    long used = 0;
    int episodes = 0;
    auto remaining = [&]() { return cfg.step_budget - used; };
    auto options = [&](const std::string& phase) {
        TrainOptions o;
        o.step_budget = remaining();
        o.phase = phase;
        o.global_step_offset = used;
        o.episode_offset = episodes;
        return o;
    };

    std::vector<StateVector> terminal_obs;
    for (const EnvState& t : env.positive_terminals()) terminal_obs.push_back(env.encode_state(t));

    // Initial training on the unmodified target.
    env.set_start(std::nullopt);
    {
        const TrainResult warm =
            train(agent, env, ConvergenceCriterion::fixed(std::min(cfg.eta, remaining())), sb, rb,
                  rng, log, options("warmup"));
        used += warm.steps;
        episodes += warm.episodes;
        plan.warmup_steps = warm.steps;
    }

    while (static_cast<int>(plan.steps.size()) < cfg.max_length) {
        if (remaining() <= 0 || sb.size() == 0) return plan;

        std::vector<Candidate> candidates;
        std::vector<double> scores;
        std::unique_ptr<Agent> past;  // self-assessed checkpoint for the probe

        if (cfg.variant == Variant::TeacherDependent) {
            const std::vector<std::size_t> subset =
                sample_candidate_indices(sb, cfg.candidate_cap, rng);
            candidates.reserve(subset.size());
            for (std::size_t idx : subset) {
                const StateBuffer::Entry& e = sb.entry(idx);
                candidates.push_back(Candidate{e.state, e.observation, e.visits, -1});
            }
            scores = td_scores(agent, *ctx.teacher, candidates, cfg.gaussian_drop_half_term);
        } else {
            const std::string phase =
                "select_" + std::to_string(plan.steps.size() + 1);
            SaScoring scoring = sa_score(agent, env, sb, rb, *ctx.regressor,
                                         std::min(cfg.beta, remaining()), cfg.candidate_cap, rng,
                                         log, options(phase));
            used += scoring.steps_used;
            candidates = std::move(scoring.candidates);
            scores = std::move(scoring.scores);
            past = std::move(scoring.past);
            if (remaining() <= 0) return plan;
        }

        const SelectionOutcome picked = pick_start(candidates, scores, cfg, terminal_obs, rng);
        const Candidate& chosen = candidates[picked.candidate_index];

        CurriculumStepRecord record;
        record.start = chosen.state;
        record.observation = chosen.observation;
        record.state_key = env.state_key(chosen.state);
        record.selection_uncertainty = picked.uncertainty;
        record.candidate_count = picked.candidate_count;
        record.chosen_cluster = picked.chosen_region;
        record.cluster_count = picked.region_count;

        if (selection_log) {
            selection_log->push_back(SelectionLogRow{
                static_cast<int>(plan.steps.size()) + 1, picked.candidate_count,
                record.state_key, picked.uncertainty, heuristic_name(cfg.heuristic),
                picked.chosen_region, picked.region_count});
        }

        // Entropy of the selected state only, probed around every episode.
        ConvergenceCriterion conv = ConvergenceCriterion::entropy_no_reduction(
            [&, obs = chosen.observation, visits = chosen.visits](const Agent& a) {
                if (cfg.variant == Variant::TeacherDependent) {
                    return policy_kl(ctx.teacher->policy(obs), a.policy(obs),
                                     cfg.gaussian_drop_half_term);
                }
                const UncertaintyRecord rec = extract_features(*past, a, obs, visits);
                return ctx.regressor->predict(rec);
            },
            cfg.entropy_window);

        env.set_start(chosen.state);
        const TrainResult step_result =
            train(agent, env, std::move(conv), sb, rb, rng, log,
                  options("curriculum_" + std::to_string(plan.steps.size() + 1)));
        used += step_result.steps;
        episodes += step_result.episodes;
        record.steps = step_result.steps;
        record.episodes = step_result.episodes;
        record.entropy_trace = step_result.entropy_trace;
        plan.steps.push_back(std::move(record));
        if (!step_result.converged && remaining() <= 0) return plan;
    }

    // Final phase: restore the original start state and train to the reward
    // criterion.
    env.set_start(std::nullopt);
    if (remaining() <= 0) return plan;
    const TrainResult final_result =
        train(agent, env,
              ConvergenceCriterion::highest_reward(cfg.reward_threshold, cfg.reward_window), sb,
              rb, rng, log, options("final"));
    used += final_result.steps;
    plan.final_steps = final_result.steps;
    plan.final_converged = final_result.converged;
    plan.completed = static_cast<int>(plan.steps.size()) == cfg.max_length;
    return plan;
}

}  // namespace readc
