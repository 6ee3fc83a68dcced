#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "rlcore/dataset.hpp"
#include "rlcore/q_regressor.hpp"
#include "rlcore/space.hpp"

namespace rlcore {

/// The algorithm contract driven by the Core: act, learn from a dataset,
/// begin an episode, and snapshot/restore. Agents are single-threaded and own
/// their PRNG streams; reseed() re-derives them from a master seed by stable
/// component labels.
class Agent {
public:
    explicit Agent(MdpInfo info) : info_(std::move(info)) {}
    virtual ~Agent() = default;

    Agent(const Agent&) = delete;
    Agent& operator=(const Agent&) = delete;

    const MdpInfo& mdp_info() const { return info_; }

    virtual Action draw_action(const State& s) = 0;

    /// Consumes one fresh quantum of transitions produced by the Core.
    virtual void fit(const Dataset& d) = 0;

    /// Called exactly once before each episode's first draw_action. Clears
    /// per-episode state; learned parameters are untouched.
    virtual void episode_start() {}

    /// Switches the behavior policy to its greedy/deterministic evaluation
    /// mode (and back).
    virtual void set_evaluation(bool) {}

    /// Action-value view for metrics; null for policy-search agents.
    virtual const QFunction* q_function() const { return nullptr; }

    virtual std::string_view algorithm_name() const = 0;

    /// Serialized learnable state, framed for restore via load_agent().
    virtual std::string snapshot() const = 0;

    virtual void reseed(std::uint64_t master_seed) = 0;

protected:
    MdpInfo info_;
};

} // namespace rlcore
