#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "readc/env.hpp"
#include "readc/rng.hpp"

namespace readc {

struct Transition {
    StateVector state;
    Action action;
    double reward = 0.0;
    bool terminal = false;  // next_state ended the task (not a step-cap cut)
    StateVector next_state;
};

// Fixed-capacity ring; oldest transitions are evicted first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 40000);

    void push(Transition t);
    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }

    // Logical index 0 is the oldest retained transition.
    const Transition& at(std::size_t i) const;

    // Uniform over current contents, with replacement.
    std::vector<const Transition*> sample(std::size_t batch, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<Transition> storage_;
};

// Unique visited states with visit counts, in first-visit order. Keys come
// from Env::state_key so the parking domain deduplicates on a lattice.
class StateBuffer {
public:
    struct Entry {
        EnvState state;
        StateVector observation;
        int visits = 0;
    };

    void record(const Env& env, const EnvState& s);
    std::size_t size() const { return entries_.size(); }
    const Entry& entry(std::size_t i) const { return entries_[i]; }
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace readc
