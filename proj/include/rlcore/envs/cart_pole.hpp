#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>

#include "rlcore/environment.hpp"

namespace rlcore {

struct CartPoleConfig {
    double gamma = 0.99;
    std::int64_t horizon = 500;
};

/// Cart-pole balancing with the standard parameterization: cart mass 1.0,
/// pole mass 0.1, pole half-length 0.5, g = 9.8, explicit Euler with
/// dt = 0.02, horizontal force +-10 N. The episode fails (absorbing) when
/// |angle| > 12 degrees or |x| > 2.4; reward is +1 per step. State is
/// (x, x_dot, theta, theta_dot); reset draws each component uniformly from
/// [-0.05, 0.05]. Actions: 0 pushes left, 1 pushes right.
class CartPole final : public Environment {
public:
    using Config = CartPoleConfig;

    explicit CartPole(Config cfg = {}, std::uint64_t seed = 0)
        : info_(make_obs_space(), Space::discrete(2), cfg.gamma, cfg.horizon) {
        rng_.seed(seed);
    }

    const MdpInfo& info() const override { return info_; }

    static constexpr double kGravity = 9.8;
    static constexpr double kCartMass = 1.0;
    static constexpr double kPoleMass = 0.1;
    static constexpr double kPoleHalfLength = 0.5;
    static constexpr double kForce = 10.0;
    static constexpr double kDt = 0.02;
    static constexpr double kAngleLimit = 12.0 * std::numbers::pi / 180.0;
    static constexpr double kPositionLimit = 2.4;

    /// One Euler step of the dynamics. Pure function, exposed so the update
    /// equations can be checked directly (e.g. at the equilibrium fixed point
    /// with zero force).
    static Eigen::Vector4d simulate(const Eigen::Vector4d& s, double force) {
        const double x = s[0], x_dot = s[1], theta = s[2], theta_dot = s[3];
        const double total_mass = kCartMass + kPoleMass;
        const double pole_mass_length = kPoleMass * kPoleHalfLength;
        const double cos_t = std::cos(theta);
        const double sin_t = std::sin(theta);

        const double temp = (force + pole_mass_length * theta_dot * theta_dot * sin_t) / total_mass;
        const double theta_acc =
            (kGravity * sin_t - cos_t * temp) /
            (kPoleHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / total_mass));
        const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

        Eigen::Vector4d out;
        out[0] = x + kDt * x_dot;
        out[1] = x_dot + kDt * x_acc;
        out[2] = theta + kDt * theta_dot;
        out[3] = theta_dot + kDt * theta_acc;
        return out;
    }

    void render(std::ostream& os) const override {
        os << "x=" << s_[0] << " x_dot=" << s_[1] << " theta=" << s_[2] << " theta_dot=" << s_[3]
           << '\n';
    }

protected:
    State do_reset(const std::optional<State>& initial_state) override {
        if (initial_state) {
            s_ = initial_state->vec();
        } else {
            for (int i = 0; i < 4; ++i) s_[i] = rng_.uniform(-0.05, 0.05);
        }
        return State::vector(s_);
    }

    StepResult do_step(const Action& action) override {
        const double force = action.idx() == 1 ? kForce : -kForce;
        s_ = simulate(s_, force);

        StepResult r;
        r.next_state = State::vector(s_);
        r.reward = 1.0;
        r.absorbing = std::abs(s_[2]) > kAngleLimit || std::abs(s_[0]) > kPositionLimit;
        return r;
    }

private:
    static Space make_obs_space() {
        const double inf = std::numeric_limits<double>::infinity();
        Vec lo(4), hi(4);
        lo << -2.0 * kPositionLimit, -inf, -std::numbers::pi, -inf;
        hi << 2.0 * kPositionLimit, inf, std::numbers::pi, inf;
        return Space::box(lo, hi);
    }

    MdpInfo info_;
    Eigen::Vector4d s_ = Eigen::Vector4d::Zero();
};

} // namespace rlcore
