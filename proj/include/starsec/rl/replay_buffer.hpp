#pragma once

#include "starsec/types.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace starsec::rl {

struct Transition {
    VectorXd state;
    VectorXd action;
    double reward = 0.0;
    VectorXd next_state;
    bool terminal = false;
};

// Column-stacked minibatch.
struct Batch {
    MatrixXd states;      // state_dim x D
    MatrixXd actions;     // action_dim x D
    VectorXd rewards;     // D
    MatrixXd next_states; // state_dim x D
    VectorXd continues;   // D, 0 where the transition ends the episode

    int size() const { return static_cast<int>(rewards.size()); }
};

Batch make_batch(const std::vector<Transition>& items);

// Fixed-capacity ring; the oldest entry is overwritten once full.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return items_.at(i); }

    // D distinct slots drawn uniformly; nullopt while fewer than D are stored.
    std::optional<std::vector<std::size_t>> sample_indices(std::size_t count, Rng& rng) const;
    std::optional<std::vector<Transition>> sample(std::size_t count, Rng& rng) const;
    std::optional<Batch> sample_batch(std::size_t count, Rng& rng) const;

private:
    std::size_t capacity_;
    std::size_t cursor_ = 0;
    std::vector<Transition> items_;
};

} // namespace starsec::rl
