#pragma once

#include "readc/uncertainty.hpp"

namespace readc {

enum class Variant { TeacherDependent, SelfAssessed };
enum class Heuristic { MaxEntropy, Proximity, MaxDistance };

struct ClusterSettings {
    enum class Mode { Off, Cutoff, Count };
    Mode mode = Mode::Off;
    double cutoff = 3.0;
    std::size_t count = 100;
};

struct CurriculumConfig {
    Variant variant = Variant::TeacherDependent;
    int max_length = 4;
    long eta = 5000;   // initial training steps on the target
    long beta = 1500;  // extra training inside each self-assessed selection
    Heuristic heuristic = Heuristic::MaxEntropy;
    ClusterSettings clustering;
    std::size_t candidate_cap = 2000;
    int entropy_window = 10;
    double reward_threshold = 0.0;  // final-phase convergence
    int reward_window = 10;
    long step_budget = 300000;  // whole-run cap
    bool gaussian_drop_half_term = false;
};

struct CurriculumStepRecord {
    EnvState start;
    StateVector observation;
    std::string state_key;
    double selection_uncertainty = 0.0;
    std::size_t candidate_count = 0;
    int chosen_cluster = -1;
    std::size_t cluster_count = 0;
    long steps = 0;
    int episodes = 0;
    std::vector<double> entropy_trace;
};

struct CurriculumPlan {
    std::vector<CurriculumStepRecord> steps;
    long overhead_steps = 0;  // nonzero only for the max-policy-change baseline
    long warmup_steps = 0;
    long final_steps = 0;
    bool completed = false;        // every phase ran inside the budget
    bool final_converged = false;  // final phase met the reward criterion
};

// A group of candidate states scored as one unit. Without clustering each
// candidate is its own region.
struct Region {
    std::vector<std::size_t> members;  // candidate indices
    StateVector centroid;
    double score = 0.0;  // mean member uncertainty
};

std::vector<Region> build_regions(std::span<const Candidate> candidates,
                                  std::span<const double> scores,
                                  const ClusterSettings& settings);

// Keeps a subset of region indices per the configured heuristic:
//   MaxEntropy  — identity;
//   Proximity   — ceil(0.2*N) regions closest (mean member-to-terminal
//                 Euclidean distance) to positive-reward terminal encodings;
//   MaxDistance — the single high-scoring region (score > mean + 1 stddev)
//                 farthest from its nearest low-scoring region (score <
//                 mean - 1 stddev); falls back to identity when either class
//                 is empty.
std::vector<std::size_t> heuristic_filter(const std::vector<Region>& regions,
                                          std::span<const Candidate> candidates,
                                          std::span<const StateVector> terminal_observations,
                                          Heuristic heuristic);

struct ReadcContext {
    const Agent* teacher = nullptr;                // TeacherDependent
    const UncertaintyPredictor* regressor = nullptr;  // SelfAssessed
};

struct SelectionLogRow {
    int curriculum_step = 0;
    std::size_t candidate_count = 0;
    std::string chosen_state;
    double chosen_uncertainty = 0.0;
    std::string heuristic;
    int chosen_cluster = -1;
    std::size_t cluster_count = 0;
};

// The top-level loop: eta-step warm-up on the target, max_length rounds of
// {select an uncertain start, train there until the entropy criterion}, then
// final training from the original start until the reward criterion. The
// model and replay buffer persist throughout.
CurriculumPlan run_readc(Env& env, Agent& agent, const CurriculumConfig& cfg,
                         const ReadcContext& ctx, StateBuffer& sb, ReplayBuffer& rb, Rng& rng,
                         TrainLog* log = nullptr,
                         std::vector<SelectionLogRow>* selection_log = nullptr);

// One row per curriculum step: start state, selection score, steps consumed,
// and the '|'-joined entropy trace.
void write_plan_csv(std::ostream& out, const CurriculumPlan& plan, int run_id = 0,
                    bool with_header = true);

const char* heuristic_name(Heuristic h);

}  // namespace readc
