#include "starsec/rl/replay_buffer.hpp"

#include <algorithm>
#include <stdexcept>

namespace starsec::rl {

Batch make_batch(const std::vector<Transition>& items)
{
    if (items.empty()) {
        throw std::invalid_argument("empty batch");
    }
    const auto d = static_cast<Eigen::Index>(items.size());
    Batch b;
    b.states.resize(items.front().state.size(), d);
    b.actions.resize(items.front().action.size(), d);
    b.next_states.resize(items.front().next_state.size(), d);
    b.rewards.resize(d);
    b.continues.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        const Transition& t = items[static_cast<std::size_t>(i)];
        b.states.col(i) = t.state;
        b.actions.col(i) = t.action;
        b.next_states.col(i) = t.next_state;
        b.rewards(i) = t.reward;
        b.continues(i) = t.terminal ? 0.0 : 1.0;
    }
    return b;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity)
    : capacity_(capacity)
{
    if (capacity == 0) {
        throw std::invalid_argument("replay capacity must be positive");
    }
}

void ReplayBuffer::push(Transition t)
{
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
    } else {
        items_[cursor_] = std::move(t);
    }
    cursor_ = (cursor_ + 1) % capacity_;
}

std::optional<std::vector<std::size_t>> ReplayBuffer::sample_indices(std::size_t count, Rng& rng) const
{
    const std::size_t n = items_.size();
    if (count == 0 || n < count) {
        return std::nullopt;
    }
    // Floyd's subset sampling
    std::vector<std::size_t> picked;
    picked.reserve(count);
    for (std::size_t j = n - count; j < n; ++j) {
        std::uniform_int_distribution<std::size_t> u(0, j);
        const std::size_t t = u(rng);
        if (std::find(picked.begin(), picked.end(), t) == picked.end()) {
            picked.push_back(t);
        } else {
            picked.push_back(j);
        }
    }
    return picked;
}

std::optional<std::vector<Transition>> ReplayBuffer::sample(std::size_t count, Rng& rng) const
{
    auto idx = sample_indices(count, rng);
    if (!idx) {
        return std::nullopt;
    }
    std::vector<Transition> out;
    out.reserve(count);
    for (std::size_t i : *idx) out.push_back(items_[i]);
    return out;
}

std::optional<Batch> ReplayBuffer::sample_batch(std::size_t count, Rng& rng) const
{
    auto items = sample(count, rng);
    if (!items) {
        return std::nullopt;
    }
    return make_batch(*items);
}

} // namespace starsec::rl
