#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "rlcore/errors.hpp"
#include "rlcore/rng.hpp"
#include "rlcore/space.hpp"

namespace rlcore {

/// Environment contract. Implementations own a seedable PRNG (no global
/// randomness) and are single-threaded: no concurrent step/reset calls on one
/// instance. Distinct instances may run on distinct threads.
class Environment {
public:
    virtual ~Environment() = default;

    virtual const MdpInfo& info() const = 0;

    struct StepResult {
        State next_state;
        double reward = 0.0;
        bool absorbing = false;
    };

    /// Starts a new episode, optionally from an explicit state.
    State reset(const std::optional<State>& initial_state = std::nullopt) {
        if (initial_state && !info().observation_space.contains(*initial_state))
            throw DomainError("initial state outside observation space");
        ready_ = true;
        return do_reset(initial_state);
    }

    /// Advances the dynamics one step.
    StepResult step(const Action& action) {
        if (!ready_) throw StateError("step called before reset");
        if (!info().action_space.contains(action)) throw DomainError("action outside action space");
        return do_step(action);
    }

    virtual void seed(std::uint64_t s) { rng_.seed(s); }

    /// Optional ASCII state dump, used by evaluate(render=true).
    virtual void render(std::ostream&) const {}

protected:
    virtual State do_reset(const std::optional<State>& initial_state) = 0;
    virtual StepResult do_step(const Action& action) = 0;

    Rng rng_;

private:
    bool ready_ = false;
};

} // namespace rlcore
