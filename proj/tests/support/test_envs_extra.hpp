#pragma once

// Custom environments used only by tests: they exercise the Environment
// contract the same way user-defined problems would.

#include "rlcore/environment.hpp"

namespace testenv {

/// Maximization-bias MDP. State 0 (start) offers 8 actions: action 0 (left)
/// moves to state 1 at reward 0, every other action terminates at reward 0.
/// State 1 offers 8 arms, each terminating with reward ~ N(-0.1, 1). All arm
/// means are negative, so left is suboptimal; overestimating learners still
/// prefer it.
class BiasMdp final : public rlcore::Environment {
public:
    explicit BiasMdp(std::uint64_t seed = 0)
        : info_(rlcore::Space::discrete(3), rlcore::Space::discrete(8), 1.0, 10) {
        rng_.seed(seed);
    }

    const rlcore::MdpInfo& info() const override { return info_; }

protected:
    rlcore::State do_reset(const std::optional<rlcore::State>& initial) override {
        pos_ = initial ? initial->idx() : 0;
        return rlcore::State::index(pos_);
    }

    StepResult do_step(const rlcore::Action& a) override {
        StepResult r;
        if (pos_ == 0 && a.idx() == 0) {
            pos_ = 1;
            r.next_state = rlcore::State::index(1);
            return r;
        }
        if (pos_ == 1) r.reward = rng_.normal(-0.1, 1.0);
        pos_ = 2;
        r.next_state = rlcore::State::index(2);
        r.absorbing = true;
        return r;
    }

private:
    rlcore::MdpInfo info_;
    std::int64_t pos_ = 0;
};

/// One-step continuous-action bandit with reward -(a - target)^2. The state
/// is the constant vector [1], so a bias-free identity feature map makes the
/// policy mean equal its single parameter.
class QuadraticBandit final : public rlcore::Environment {
public:
    explicit QuadraticBandit(double target = 2.0)
        : target_(target),
          info_(rlcore::Space::box(rlcore::Vec::Constant(1, 1.0), rlcore::Vec::Constant(1, 1.0)),
                rlcore::Space::box(1), 1.0, 1) {}

    const rlcore::MdpInfo& info() const override { return info_; }

protected:
    rlcore::State do_reset(const std::optional<rlcore::State>&) override {
        return rlcore::State::vector(rlcore::Vec::Constant(1, 1.0));
    }

    StepResult do_step(const rlcore::Action& a) override {
        StepResult r;
        const double x = a.vec()[0] - target_;
        r.reward = -x * x;
        r.next_state = rlcore::State::vector(rlcore::Vec::Constant(1, 1.0));
        r.absorbing = true;
        return r;
    }

private:
    double target_;
    rlcore::MdpInfo info_;
};

} // namespace testenv
