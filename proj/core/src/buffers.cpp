#include "readc/buffers.hpp"

#include <stdexcept>

namespace readc {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
    storage_.reserve(capacity_);
}

void ReplayBuffer::push(Transition t) {
    if (storage_.size() < capacity_) {
        storage_.push_back(std::move(t));
    } else {
        storage_[next_] = std::move(t);
        next_ = (next_ + 1) % capacity_;
    }
}

const Transition& ReplayBuffer::at(std::size_t i) const {
    if (i >= storage_.size()) throw std::out_of_range("ReplayBuffer::at");
    if (storage_.size() < capacity_) return storage_[i];
    return storage_[(next_ + i) % capacity_];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
    if (storage_.empty()) throw std::logic_error("ReplayBuffer::sample on empty buffer");
    std::vector<const Transition*> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i)
        out.push_back(&storage_[rng.uniform_index(storage_.size())]);
    return out;
}

void StateBuffer::record(const Env& env, const EnvState& s) {
    const std::string key = env.state_key(s);
    auto it = index_.find(key);
    if (it != index_.end()) {
        ++entries_[it->second].visits;
        return;
    }
    index_.emplace(key, entries_.size());
    entries_.push_back(Entry{s, env.encode_state(s), 1});
}

}  // namespace readc
