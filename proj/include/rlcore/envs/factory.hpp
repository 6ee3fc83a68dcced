#pragma once

#include <memory>
#include <string>

#include "rlcore/envs/cart_pole.hpp"
#include "rlcore/envs/chain.hpp"
#include "rlcore/envs/grid_world.hpp"
#include "rlcore/envs/mountain_car.hpp"
#include "rlcore/params.hpp"

namespace rlcore {

inline const std::vector<std::string>& environment_names() {
    static const std::vector<std::string> names = {"gridworld", "chain", "cartpole",
                                                   "mountaincar"};
    return names;
}

/// Builds a built-in environment by name. Recognized parameter overrides:
///   gridworld:   width, height, start_x, start_y, goal_x, goal_y (-1 for no
///                goal), gamma, horizon
///   chain:       n, slip, gamma, horizon
///   cartpole:    gamma, horizon
///   mountaincar: gamma, horizon
inline std::unique_ptr<Environment> make_environment(const std::string& name,
                                                     const Params& params,
                                                     std::uint64_t seed) {
    if (name == "gridworld") {
        GridWorld::Config cfg;
        cfg.width = static_cast<int>(params.get_int("width", cfg.width));
        cfg.height = static_cast<int>(params.get_int("height", cfg.height));
        cfg.start_x = static_cast<int>(params.get_int("start_x", cfg.start_x));
        cfg.start_y = static_cast<int>(params.get_int("start_y", cfg.start_y));
        const int gx = static_cast<int>(params.get_int("goal_x", cfg.width - 1));
        const int gy = static_cast<int>(params.get_int("goal_y", cfg.height - 1));
        if (gx < 0 || gy < 0) cfg.goal.reset();
        else cfg.goal = std::make_pair(gx, gy);
        cfg.gamma = params.get_double("gamma", cfg.gamma);
        cfg.horizon = params.get_int("horizon", cfg.horizon);
        return std::make_unique<GridWorld>(cfg, seed);
    }
    if (name == "chain") {
        Chain::Config cfg;
        cfg.n = params.get_int("n", cfg.n);
        cfg.slip = params.get_double("slip", cfg.slip);
        cfg.gamma = params.get_double("gamma", cfg.gamma);
        cfg.horizon = params.get_int("horizon", cfg.horizon);
        return std::make_unique<Chain>(cfg, seed);
    }
    if (name == "cartpole") {
        CartPole::Config cfg;
        cfg.gamma = params.get_double("gamma", cfg.gamma);
        cfg.horizon = params.get_int("horizon", cfg.horizon);
        return std::make_unique<CartPole>(cfg, seed);
    }
    if (name == "mountaincar") {
        MountainCar::Config cfg;
        cfg.gamma = params.get_double("gamma", cfg.gamma);
        cfg.horizon = params.get_int("horizon", cfg.horizon);
        return std::make_unique<MountainCar>(cfg, seed);
    }
    std::string msg = "unknown environment '" + name + "'; valid names:";
    for (const auto& n : environment_names()) msg += " " + n;
    throw ConfigError(msg);
}

} // namespace rlcore
