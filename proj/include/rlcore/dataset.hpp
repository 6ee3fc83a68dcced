#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rlcore/errors.hpp"
#include "rlcore/space.hpp"

namespace rlcore {

/// One environment step. `absorbing` means the dynamics ended the episode;
/// `last` additionally covers horizon cuts and run truncation, so
/// absorbing implies last.
struct Transition {
    State state;
    Action action;
    double reward = 0.0;
    State next_state;
    bool absorbing = false;
    bool last = false;
};

/// Ordered transition sequence with episode boundaries marked by `last`.
/// The unit of exchange between Core and Agent.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<Transition> data) : data_(std::move(data)) {}

    void push_back(Transition t) { data_.push_back(std::move(t)); }

    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }
    const Transition& operator[](std::size_t i) const { return data_[i]; }

    auto begin() const { return data_.begin(); }
    auto end() const { return data_.end(); }

    void clear() { data_.clear(); }

    std::size_t n_episodes() const {
        std::size_t n = 0;
        for (const auto& t : data_) n += t.last ? 1 : 0;
        return n;
    }

    /// [first, past-end) index ranges of episodes. A trailing run of
    /// transitions without a closing `last` flag is included only when
    /// `complete_only` is false.
    std::vector<std::pair<std::size_t, std::size_t>> episode_ranges(bool complete_only = false) const {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        std::size_t start = 0;
        for (std::size_t i = 0; i < data_.size(); ++i) {
            if (data_[i].last) {
                out.emplace_back(start, i + 1);
                start = i + 1;
            }
        }
        if (!complete_only && start < data_.size()) out.emplace_back(start, data_.size());
        return out;
    }

    /// Discounted return sum_t gamma^t r_t of each episode, in order.
    std::vector<double> compute_J(double gamma) const {
        std::vector<double> out;
        for (auto [b, e] : episode_ranges()) {
            double j = 0.0;
            double g = 1.0;
            for (std::size_t i = b; i < e; ++i) {
                j += g * data_[i].reward;
                g *= gamma;
            }
            out.push_back(j);
        }
        return out;
    }

    /// Throws unless the structural invariants hold: absorbing implies last,
    /// nothing follows a last flag within an episode (by construction of the
    /// ranges), and no episode exceeds the horizon.
    void check_invariants(const MdpInfo& info) const {
        for (const auto& t : data_)
            if (t.absorbing && !t.last) throw StateError("absorbing transition not marked last");
        for (auto [b, e] : episode_ranges()) {
            if (static_cast<std::int64_t>(e - b) > info.horizon)
                throw StateError("episode longer than horizon");
            for (std::size_t i = b; i + 1 < e; ++i)
                if (data_[i].last) throw StateError("transition follows a last flag");
        }
    }

private:
    std::vector<Transition> data_;
};

inline std::vector<double> compute_J(const Dataset& data, double gamma) {
    return data.compute_J(gamma);
}

} // namespace rlcore
