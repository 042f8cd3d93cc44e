#include "readc/grid_env.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace readc {

namespace {

// N, E, S, W
constexpr int kDx[4] = {0, 1, 0, -1};
constexpr int kDy[4] = {-1, 0, 1, 0};

// Splits a displacement into four nonnegative cardinal slots [N, E, S, W].
void push_displacement(StateVector& out, int dx, int dy) {
    out.push_back(dy < 0 ? static_cast<double>(-dy) : 0.0);
    out.push_back(dx > 0 ? static_cast<double>(dx) : 0.0);
    out.push_back(dy > 0 ? static_cast<double>(dy) : 0.0);
    out.push_back(dx < 0 ? static_cast<double>(-dx) : 0.0);
}

}  // namespace

GridEnv::GridEnv(GridSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    domain_ = spec_.flags.empty() ? GridDomain::KeyLock : GridDomain::Flags;
    cur_ = GridState{spec_.default_start.x, spec_.default_start.y, 0, 0, 0};
}

std::string GridEnv::domain_name() const {
    return domain_ == GridDomain::KeyLock ? "keylock" : "flags";
}

int GridEnv::observation_dim() const {
    if (domain_ == GridDomain::KeyLock) return 4 + 4 + 4 + 4 + 8 + 2;
    return 4 * static_cast<int>(spec_.flags.size()) + 4 + 4 + 1;
}

bool GridEnv::obstacle_at(int x, int y) const {
    if (!spec_.in_bounds(x, y)) return true;  // edges behave like obstacles
    for (const Cell& c : spec_.obstacles)
        if (c.x == x && c.y == y) return true;
    return false;
}

bool GridEnv::pit_at(int x, int y) const {
    for (const Cell& c : spec_.pits)
        if (c.x == x && c.y == y) return true;
    return false;
}

int GridEnv::key_index_at(int x, int y) const {
    for (std::size_t i = 0; i < spec_.keys.size(); ++i)
        if (spec_.keys[i].x == x && spec_.keys[i].y == y) return static_cast<int>(i);
    return -1;
}

int GridEnv::lock_index_at(int x, int y) const {
    for (std::size_t i = 0; i < spec_.locks.size(); ++i)
        if (spec_.locks[i].x == x && spec_.locks[i].y == y) return static_cast<int>(i);
    return -1;
}

int GridEnv::flag_index_at(int x, int y) const {
    for (std::size_t i = 0; i < spec_.flags.size(); ++i)
        if (spec_.flags[i].x == x && spec_.flags[i].y == y) return static_cast<int>(i);
    return -1;
}

bool GridEnv::all_keys(const GridState& s) const {
    return s.keys_mask == (1u << spec_.keys.size()) - 1u;
}

bool GridEnv::all_locks(const GridState& s) const {
    return s.locks_mask == (1u << spec_.locks.size()) - 1u;
}

void GridEnv::collect_at(GridState& s) const {
    if (domain_ == GridDomain::KeyLock) {
        const int k = key_index_at(s.x, s.y);
        if (k >= 0) s.keys_mask |= 1u << k;
        const int l = lock_index_at(s.x, s.y);
        if (l >= 0 && all_keys(s)) s.locks_mask |= 1u << l;
    } else {
        const int f = flag_index_at(s.x, s.y);
        if (f == s.flags_captured) ++s.flags_captured;
    }
}

bool GridEnv::is_terminal_state(const EnvState& es) const {
    const auto* s = std::get_if<GridState>(&es);
    if (!s) throw std::invalid_argument("grid: state from another domain");
    if (domain_ == GridDomain::KeyLock) return all_keys(*s) && all_locks(*s);
    return s->flags_captured == static_cast<int>(spec_.flags.size());
}

void GridEnv::validate_start(const EnvState& es) const {
    const auto* s = std::get_if<GridState>(&es);
    if (!s) throw std::invalid_argument("grid: invalid start: state from another domain");
    if (!spec_.in_bounds(s->x, s->y))
        throw std::invalid_argument("grid: invalid start: out of bounds");
    if (obstacle_at(s->x, s->y))
        throw std::invalid_argument("grid: invalid start: inside an obstacle");
    if (pit_at(s->x, s->y))
        throw std::invalid_argument("grid: invalid start: inside a pit");
    if (domain_ == GridDomain::KeyLock) {
        if (s->flags_captured != 0)
            throw std::invalid_argument("grid: invalid start: flags state on a key-lock board");
        if (s->keys_mask >= (1u << spec_.keys.size()))
            throw std::invalid_argument("grid: invalid start: bad keys mask");
        if (s->locks_mask != 0 && !all_keys(*s))
            throw std::invalid_argument("grid: invalid start: lock collected before keys");
    } else {
        if (s->keys_mask != 0 || s->locks_mask != 0)
            throw std::invalid_argument("grid: invalid start: key-lock state on a flags board");
        if (s->flags_captured < 0 || s->flags_captured > static_cast<int>(spec_.flags.size()))
            throw std::invalid_argument("grid: invalid start: bad flag count");
    }
    GridState placed = *s;
    collect_at(placed);
    if (is_terminal_state(placed))
        throw std::invalid_argument("grid: invalid start: state is already terminal");
}

void GridEnv::set_start(const std::optional<EnvState>& start) {
    if (!start) {
        start_override_.reset();
        return;
    }
    validate_start(*start);
    start_override_ = std::get<GridState>(*start);
}

StateVector GridEnv::reset() {
    if (start_override_) {
        cur_ = *start_override_;
    } else {
        cur_ = GridState{spec_.default_start.x, spec_.default_start.y, 0, 0, 0};
    }
    collect_at(cur_);  // contact pickup applies on placement too
    step_index_ = 0;
    terminal_ = false;
    truncated_ = false;
    episode_started_ = true;
    return encode_grid(cur_);
}

StepResult GridEnv::step(const Action& action) {
    if (!episode_started_) throw std::logic_error("grid: step before reset");
    if (episode_over()) throw std::logic_error("grid: step on a finished episode");
    const int* a = std::get_if<int>(&action);
    if (!a || *a < 0 || *a >= kGridActions)
        throw std::invalid_argument("grid: action must be a direction index in [0,4)");

    StepResult result;
    result.reward = kStepReward;
    const int nx = cur_.x + kDx[*a];
    const int ny = cur_.y + kDy[*a];

    if (!obstacle_at(nx, ny)) {  // moving into an obstacle leaves the state unchanged
        cur_.x = nx;
        cur_.y = ny;
        if (domain_ == GridDomain::KeyLock) {
            if (pit_at(nx, ny)) {
                result.reward = kPitReward;
                terminal_ = true;
            } else {
                const int k = key_index_at(nx, ny);
                if (k >= 0 && !(cur_.keys_mask & (1u << k))) {
                    cur_.keys_mask |= 1u << k;
                    result.reward = kKeyReward;
                } else {
                    const int l = lock_index_at(nx, ny);
                    if (l >= 0 && !(cur_.locks_mask & (1u << l)) && all_keys(cur_)) {
                        cur_.locks_mask |= 1u << l;
                        result.reward = kLockReward;
                    }
                }
                if (all_keys(cur_) && all_locks(cur_)) terminal_ = true;
            }
        } else {
            const int f = flag_index_at(nx, ny);
            if (f == cur_.flags_captured) {
                ++cur_.flags_captured;
                result.reward = kFlagRewardUnit * cur_.flags_captured;
                if (cur_.flags_captured == static_cast<int>(spec_.flags.size())) terminal_ = true;
            }
        }
    }

    ++step_index_;
    if (!terminal_ && step_index_ >= kStepCap) truncated_ = true;
    result.terminal = terminal_;
    result.truncated = truncated_;
    result.observation = encode_grid(cur_);
    return result;
}

StateVector GridEnv::encode_state(const EnvState& es) const {
    const auto* s = std::get_if<GridState>(&es);
    if (!s) throw std::invalid_argument("grid: state from another domain");
    return encode_grid(*s);
}

StateVector GridEnv::encode_grid(const GridState& s) const {
    StateVector out;
    out.reserve(observation_dim());

    auto nearest_displacement = [&](const std::vector<Cell>& items, std::uint32_t collected_mask) {
        double best = std::numeric_limits<double>::infinity();
        int bx = 0, by = 0;
        bool found = false;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (collected_mask & (1u << i)) continue;
            const int dx = items[i].x - s.x;
            const int dy = items[i].y - s.y;
            const double d = std::sqrt(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy);
            if (d < best) {
                best = d;
                bx = dx;
                by = dy;
                found = true;
            }
        }
        // All items of this class collected: features are zero.
        push_displacement(out, found ? bx : 0, found ? by : 0);
    };

    if (domain_ == GridDomain::KeyLock) {
        nearest_displacement(spec_.keys, s.keys_mask);
        nearest_displacement(spec_.locks, s.locks_mask);
        for (int d = 0; d < 4; ++d) out.push_back(obstacle_at(s.x + kDx[d], s.y + kDy[d]) ? 1.0 : 0.0);
        for (int d = 0; d < 4; ++d) {
            const int nx = s.x + kDx[d];
            const int ny = s.y + kDy[d];
            const int k = key_index_at(nx, ny);
            const int l = lock_index_at(nx, ny);
            const bool item = (k >= 0 && !(s.keys_mask & (1u << k))) ||
                              (l >= 0 && !(s.locks_mask & (1u << l)));
            out.push_back(item ? 1.0 : 0.0);
        }
        for (int d = 0; d < 4; ++d) {
            for (int dist = 1; dist <= 2; ++dist)
                out.push_back(pit_at(s.x + dist * kDx[d], s.y + dist * kDy[d]) ? 1.0 : 0.0);
        }
        out.push_back(static_cast<double>(std::popcount(s.keys_mask)));
        out.push_back(static_cast<double>(std::popcount(s.locks_mask)));
    } else {
        for (std::size_t f = 0; f < spec_.flags.size(); ++f) {
            if (static_cast<int>(f) < s.flags_captured) {
                push_displacement(out, 0, 0);
            } else {
                push_displacement(out, spec_.flags[f].x - s.x, spec_.flags[f].y - s.y);
            }
        }
        for (int d = 0; d < 4; ++d) out.push_back(obstacle_at(s.x + kDx[d], s.y + kDy[d]) ? 1.0 : 0.0);
        for (int d = 0; d < 4; ++d) {
            const int f = flag_index_at(s.x + kDx[d], s.y + kDy[d]);
            out.push_back(f >= 0 && f >= s.flags_captured ? 1.0 : 0.0);
        }
        out.push_back(static_cast<double>(s.flags_captured));
    }
    return out;
}

std::vector<EnvState> GridEnv::positive_terminals() const {
    std::vector<EnvState> result;
    if (domain_ == GridDomain::KeyLock) {
        const auto full_keys = static_cast<std::uint32_t>((1u << spec_.keys.size()) - 1u);
        const auto full_locks = static_cast<std::uint32_t>((1u << spec_.locks.size()) - 1u);
        for (std::size_t l = 0; l < spec_.locks.size(); ++l) {
            GridState s{spec_.locks[l].x, spec_.locks[l].y, full_keys,
                        full_locks & ~(1u << l), 0};
            result.emplace_back(s);
        }
    } else {
        const Cell last = spec_.flags.back();
        GridState s{last.x, last.y, 0, 0, static_cast<int>(spec_.flags.size()) - 1};
        result.emplace_back(s);
    }
    return result;
}

std::string GridEnv::state_key(const EnvState& es) const {
    const auto* s = std::get_if<GridState>(&es);
    if (!s) throw std::invalid_argument("grid: state from another domain");
    return "g:" + std::to_string(s->x) + "," + std::to_string(s->y) + "," +
           std::to_string(s->keys_mask) + "," + std::to_string(s->locks_mask) + "," +
           std::to_string(s->flags_captured);
}

std::unique_ptr<Env> GridEnv::clone() const {
    return std::make_unique<GridEnv>(*this);
}

int GridEnv::optimal_moves_lower_bound() const {
    // Manhattan tour over the item sequence; obstacles make the true optimum
    // no shorter than this.
    int total = 0;
    int cx = spec_.default_start.x;
    int cy = spec_.default_start.y;
    auto visit = [&](const Cell& c) {
        total += std::abs(c.x - cx) + std::abs(c.y - cy);
        cx = c.x;
        cy = c.y;
    };
    if (domain_ == GridDomain::KeyLock) {
        for (const Cell& c : spec_.keys) visit(c);
        for (const Cell& c : spec_.locks) visit(c);
    } else {
        for (const Cell& c : spec_.flags) visit(c);
    }
    return total;
}

}  // namespace readc
