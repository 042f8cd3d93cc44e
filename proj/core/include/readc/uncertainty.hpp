#pragma once

#include <array>
#include <memory>
#include <optional>

#include "readc/agents.hpp"
#include "readc/buffers.hpp"
#include "readc/clustering.hpp"
#include "readc/train.hpp"

namespace readc {

// Dimension-independent description of how a state's policy moved between
// two checkpoints; the regressor's input row.
struct UncertaintyRecord {
    double rel_entropy = 0.0;  // current-vs-past policy divergence
    double entropy_cur = 0.0;
    double entropy_past = 0.0;
    double q_past_max = 0.0, q_past_mean = 0.0, q_past_std = 0.0;
    double q_cur_max = 0.0, q_cur_mean = 0.0, q_cur_std = 0.0;
    int visit_count = 0;

    static constexpr std::size_t kFeatureCount = 10;
    std::array<double, kFeatureCount> features() const;
};

// Predicts a state's uncertainty from an UncertaintyRecord; implemented by
// the fitted regression models.
class UncertaintyPredictor {
public:
    virtual ~UncertaintyPredictor() = default;
    virtual double predict(const UncertaintyRecord& rec) const = 0;
};

// Discrete-policy features from two Q-vectors: divergence and entropies of
// the softmax-transferred distributions plus (max, mean, std) summaries of
// the L2-normalized Q-values.
UncertaintyRecord extract_features(std::span<const double> q_past, std::span<const double> q_cur,
                                   int visits);

// Gaussian counterpart for continuous-action policies; summaries are taken
// over the L2-normalized concatenated (mean, stddev) parameter vectors.
UncertaintyRecord extract_features(const GaussianDist& past, const GaussianDist& cur, int visits);

UncertaintyRecord extract_features(const Agent& past, const Agent& cur, const StateVector& obs,
                                   int visits);

struct Candidate {
    EnvState state;
    StateVector observation;
    int visits = 1;
    int cluster = -1;  // -1 when clustering is off
};

// Scores within this distance count as tied and resolve to the lowest index.
inline constexpr double kScoreTieTolerance = 1e-12;

struct SelectionAudit {
    std::vector<double> state_uncertainty;
    std::vector<double> region_score;
    std::vector<std::size_t> region_size;
    int chosen_region = -1;
    std::size_t chosen_index = 0;
    double chosen_uncertainty = 0.0;
};

// Teacher-vs-agent divergence per candidate.
std::vector<double> td_scores(const Agent& agent, const Agent& teacher,
                              std::span<const Candidate> candidates,
                              bool gaussian_drop_half_term = false);

// Argmax over per-state scores, or over mean per-cluster scores with a
// uniform member draw when candidates carry cluster ids. Ties break to the
// lowest candidate (or cluster) index.
std::size_t select_from_scores(std::span<const Candidate> candidates,
                               std::span<const double> scores, Rng& rng,
                               SelectionAudit* audit = nullptr);

// READ-C-TD selection: score candidates against a converged teacher and pick
// the most divergent state (or cluster).
std::size_t td_select(const Agent& agent, const Agent& teacher,
                      std::span<const Candidate> candidates, Rng& rng,
                      SelectionAudit* audit = nullptr, bool gaussian_drop_half_term = false);

struct SaScoring {
    std::unique_ptr<Agent> past;        // snapshot taken before the extra training
    std::vector<std::size_t> subset;    // state-buffer indices scored
    std::vector<Candidate> candidates;  // materialized subset, unclustered
    std::vector<double> scores;         // regressor predictions
    long steps_used = 0;
};

// READ-C-SA scoring: snapshot the agent, train it beta further steps, then
// predict uncertainty for a sampled subset of visited states.
SaScoring sa_score(Agent& agent, Env& env, StateBuffer& sb, ReplayBuffer& rb,
                   const UncertaintyPredictor& regressor, long beta, std::size_t subset_cap,
                   Rng& rng, TrainLog* log = nullptr, const TrainOptions& options = {});

// Full READ-C-SA selection; returns the index into the state buffer.
std::size_t sa_select(Agent& agent, Env& env, StateBuffer& sb, ReplayBuffer& rb,
                      const UncertaintyPredictor& regressor, long beta, Rng& rng,
                      std::size_t subset_cap = 2000, SelectionAudit* audit = nullptr);

// Candidate subset of the state buffer: min(|SB|, cap) entries drawn
// uniformly without replacement, in buffer order.
std::vector<std::size_t> sample_candidate_indices(const StateBuffer& sb, std::size_t cap,
                                                  Rng& rng);

}  // namespace readc
