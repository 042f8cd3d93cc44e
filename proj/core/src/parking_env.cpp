#include "readc/parking_env.hpp"

#include <cmath>
#include <stdexcept>

namespace readc {

double wrap_angle(double a) {
    while (a > M_PI) a -= 2.0 * M_PI;
    while (a <= -M_PI) a += 2.0 * M_PI;
    return a;
}

ParkingEnv::ParkingEnv(ParkingSpec spec, std::uint64_t seed) : spec_(spec), rng_(seed) {
    if (spec_.n_spots < 1) throw std::invalid_argument("parking: need at least one spot");
    const int top = (spec_.n_spots + 1) / 2;
    const int bottom = spec_.n_spots / 2;
    auto row_x = [&](int i, int count) {
        return (static_cast<double>(i) - (count - 1) / 2.0) * spec_.spot_spacing;
    };
    for (int i = 0; i < top; ++i)
        spots_.push_back({row_x(i, top), spec_.row_offset, M_PI / 2.0});
    for (int i = 0; i < bottom; ++i)
        spots_.push_back({row_x(i, bottom), -spec_.row_offset, -M_PI / 2.0});
}

double ParkingEnv::goal_distance(const ParkingState& s) const {
    return std::hypot(s.x - s.goal_x, s.y - s.goal_y);
}

bool ParkingEnv::is_terminal_state(const EnvState& es) const {
    const auto* s = std::get_if<ParkingState>(&es);
    if (!s) throw std::invalid_argument("parking: state from another domain");
    return goal_distance(*s) <= spec_.goal_pos_tol &&
           std::fabs(wrap_angle(s->heading - s->goal_heading)) <= spec_.goal_heading_tol;
}

void ParkingEnv::validate_start(const EnvState& es) const {
    const auto* s = std::get_if<ParkingState>(&es);
    if (!s) throw std::invalid_argument("parking: invalid start: state from another domain");
    for (double v : {s->x, s->y, s->heading, s->vx, s->vy, s->ang_vel, s->goal_x, s->goal_y,
                     s->goal_heading}) {
        if (!std::isfinite(v))
            throw std::invalid_argument("parking: invalid start: non-finite component");
    }
    if (is_terminal_state(es))
        throw std::invalid_argument("parking: invalid start: state is already terminal");
}

void ParkingEnv::set_start(const std::optional<EnvState>& start) {
    if (!start) {
        start_override_.reset();
        return;
    }
    validate_start(*start);
    start_override_ = std::get<ParkingState>(*start);
}

StateVector ParkingEnv::reset() {
    if (start_override_) {
        cur_ = *start_override_;
    } else {
        cur_ = ParkingState{};
        cur_.heading = rng_.uniform(-M_PI, M_PI);
        const SpotPose& goal = spots_[rng_.uniform_index(spots_.size())];
        cur_.goal_x = goal.x;
        cur_.goal_y = goal.y;
        cur_.goal_heading = goal.heading;
    }
    step_index_ = 0;
    terminal_ = false;
    truncated_ = false;
    episode_started_ = true;
    return encode_state(cur_);
}

StepResult ParkingEnv::step(const Action& action) {
    if (!episode_started_) throw std::logic_error("parking: step before reset");
    if (episode_over()) throw std::logic_error("parking: step on a finished episode");
    const auto* a = std::get_if<std::vector<double>>(&action);
    if (!a || a->size() != 2)
        throw std::invalid_argument("parking: action must be a (velocity, angular velocity) pair");

    const double v = std::clamp((*a)[0], -1.0, 1.0);
    const double w = std::clamp((*a)[1], -1.0, 1.0);

    cur_.heading = wrap_angle(cur_.heading + w * spec_.dt);
    const double speed = v * spec_.speed_scale;
    cur_.vx = speed * std::cos(cur_.heading);
    cur_.vy = speed * std::sin(cur_.heading);
    cur_.ang_vel = w;
    cur_.x += cur_.vx * spec_.dt;
    cur_.y += cur_.vy * spec_.dt;

    StepResult result;
    result.reward = -spec_.distance_cost * goal_distance(cur_);
    if (is_terminal_state(EnvState{cur_})) terminal_ = true;

    ++step_index_;
    if (!terminal_ && step_index_ >= kStepCap) truncated_ = true;
    result.terminal = terminal_;
    result.truncated = truncated_;
    result.observation = encode_state(cur_);
    return result;
}

StateVector ParkingEnv::encode_state(const EnvState& es) const {
    const auto* s = std::get_if<ParkingState>(&es);
    if (!s) throw std::invalid_argument("parking: state from another domain");
    return {s->x, s->y, s->vx, s->vy, s->heading, s->ang_vel, s->goal_x, s->goal_y, s->goal_heading};
}

std::vector<EnvState> ParkingEnv::positive_terminals() const {
    std::vector<EnvState> result;
    result.reserve(spots_.size());
    for (const SpotPose& spot : spots_) {
        ParkingState s;
        s.x = spot.x;
        s.y = spot.y;
        s.heading = spot.heading;
        s.goal_x = spot.x;
        s.goal_y = spot.y;
        s.goal_heading = spot.heading;
        result.emplace_back(s);
    }
    return result;
}

std::string ParkingEnv::state_key(const EnvState& es) const {
    const StateVector v = encode_state(es);
    std::string key = "p:";
    for (double x : v) {
        key += std::to_string(static_cast<long long>(std::llround(x / 0.25)));
        key += ',';
    }
    return key;
}

std::unique_ptr<Env> ParkingEnv::clone() const {
    return std::make_unique<ParkingEnv>(*this);
}

}  // namespace readc
