#pragma once

#include <optional>
#include <ostream>

#include "rlcore/environment.hpp"

namespace rlcore {

struct ChainConfig {
    std::int64_t n = 5;
    double slip = 0.1;
    double gamma = 0.9;
    std::int64_t horizon = 100;
};

/// N-state chain. Action 0 (forward) moves right but slips backwards with
/// probability `slip`; action 1 (back) moves left deterministically. Positions
/// clamp to [0, n-1]. Entering the rightmost state pays reward 1 and ends the
/// episode; every other step is reward 0. reset() without an explicit state
/// starts uniformly over the non-terminal states.
class Chain final : public Environment {
public:
    using Config = ChainConfig;

    explicit Chain(Config cfg = {}, std::uint64_t seed = 0)
        : cfg_(cfg), info_(Space::discrete(cfg.n), Space::discrete(2), cfg.gamma, cfg.horizon) {
        if (cfg_.n < 2) throw DomainError("chain needs n >= 2");
        if (cfg_.slip < 0.0 || cfg_.slip > 1.0) throw DomainError("slip must be in [0, 1]");
        rng_.seed(seed);
    }

    const MdpInfo& info() const override { return info_; }

    void render(std::ostream& os) const override {
        for (std::int64_t i = 0; i < cfg_.n; ++i) os << (i == pos_ ? '@' : (i + 1 == cfg_.n ? '$' : '.'));
        os << '\n';
    }

protected:
    State do_reset(const std::optional<State>& initial_state) override {
        pos_ = initial_state ? initial_state->idx() : rng_.uniform_int(cfg_.n - 1);
        return State::index(pos_);
    }

    StepResult do_step(const Action& action) override {
        std::int64_t dir = action.idx() == 0 ? 1 : -1;
        if (action.idx() == 0 && rng_.uniform() < cfg_.slip) dir = -1;
        pos_ = std::max<std::int64_t>(0, std::min(cfg_.n - 1, pos_ + dir));

        StepResult r;
        r.next_state = State::index(pos_);
        if (pos_ == cfg_.n - 1) {
            r.reward = 1.0;
            r.absorbing = true;
        }
        return r;
    }

private:
    Config cfg_;
    MdpInfo info_;
    std::int64_t pos_ = 0;
};

} // namespace rlcore
