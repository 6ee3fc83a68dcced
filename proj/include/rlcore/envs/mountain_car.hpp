#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>

#include "rlcore/environment.hpp"

namespace rlcore {

struct MountainCarConfig {
    double gamma = 1.0;
    std::int64_t horizon = 200;
};

/// Discrete-action mountain car:
///   v' = clip(v + 0.001*a - 0.0025*cos(3x), -0.07, 0.07)
///   x' = clip(x + v', -1.2, 0.6)
/// with a in {-1, 0, +1} (actions 0, 1, 2), reward -1 per step, and the goal
/// x >= 0.5 absorbing. reset() starts at x ~ U[-0.6, -0.4), v = 0.
class MountainCar final : public Environment {
public:
    using Config = MountainCarConfig;

    explicit MountainCar(Config cfg = {}, std::uint64_t seed = 0)
        : info_(make_obs_space(), Space::discrete(3), cfg.gamma, cfg.horizon) {
        rng_.seed(seed);
    }

    const MdpInfo& info() const override { return info_; }

    static constexpr double kMinPos = -1.2;
    static constexpr double kMaxPos = 0.6;
    static constexpr double kMaxSpeed = 0.07;
    static constexpr double kGoalPos = 0.5;

    void render(std::ostream& os) const override {
        os << "x=" << x_ << " v=" << v_ << '\n';
    }

protected:
    State do_reset(const std::optional<State>& initial_state) override {
        if (initial_state) {
            x_ = initial_state->vec()[0];
            v_ = initial_state->vec()[1];
        } else {
            x_ = rng_.uniform(-0.6, -0.4);
            v_ = 0.0;
        }
        return observation();
    }

    StepResult do_step(const Action& action) override {
        const double a = static_cast<double>(action.idx()) - 1.0;
        v_ = std::clamp(v_ + 0.001 * a - 0.0025 * std::cos(3.0 * x_), -kMaxSpeed, kMaxSpeed);
        x_ = std::clamp(x_ + v_, kMinPos, kMaxPos);

        StepResult r;
        r.next_state = observation();
        r.reward = -1.0;
        r.absorbing = x_ >= kGoalPos;
        return r;
    }

private:
    static Space make_obs_space() {
        Vec lo(2), hi(2);
        lo << kMinPos, -kMaxSpeed;
        hi << kMaxPos, kMaxSpeed;
        return Space::box(lo, hi);
    }

    State observation() const {
        Vec s(2);
        s << x_, v_;
        return State::vector(s);
    }

    MdpInfo info_;
    double x_ = 0.0;
    double v_ = 0.0;
};

} // namespace rlcore
