#pragma once

#include <optional>
#include <ostream>

#include "rlcore/environment.hpp"

namespace rlcore {

struct GridWorldConfig {
    int width = 5;
    int height = 5;
    int start_x = 0;
    int start_y = 0;
    std::optional<std::pair<int, int>> goal = std::make_pair(4, 4);
    double gamma = 0.9;
    std::int64_t horizon = 100;
};

/// Deterministic four-action grid. Moves off the grid leave the agent in
/// place and cost -1; entering the goal pays +10 and ends the episode; every
/// other step is reward 0. Cells are indexed row-major, (0,0) top-left.
/// Actions: 0 = up, 1 = right, 2 = down, 3 = left.
class GridWorld final : public Environment {
public:
    using Config = GridWorldConfig;

    explicit GridWorld(Config cfg = {}, std::uint64_t seed = 0)
        : cfg_(cfg),
          info_(Space::discrete(static_cast<std::int64_t>(cfg.width) * cfg.height),
                Space::discrete(4), cfg.gamma, cfg.horizon) {
        if (cfg_.width < 1 || cfg_.height < 1) throw DomainError("grid needs positive size");
        if (!in_grid(cfg_.start_x, cfg_.start_y)) throw DomainError("start cell outside grid");
        if (cfg_.goal && !in_grid(cfg_.goal->first, cfg_.goal->second))
            throw DomainError("goal cell outside grid");
        rng_.seed(seed);
    }

    const MdpInfo& info() const override { return info_; }

    std::int64_t cell_index(int x, int y) const {
        return static_cast<std::int64_t>(y) * cfg_.width + x;
    }

    void render(std::ostream& os) const override {
        for (int y = 0; y < cfg_.height; ++y) {
            for (int x = 0; x < cfg_.width; ++x) {
                if (x == x_ && y == y_) os << '@';
                else if (cfg_.goal && cfg_.goal->first == x && cfg_.goal->second == y) os << 'G';
                else os << '.';
            }
            os << '\n';
        }
    }

protected:
    State do_reset(const std::optional<State>& initial_state) override {
        if (initial_state) {
            const std::int64_t i = initial_state->idx();
            x_ = static_cast<int>(i % cfg_.width);
            y_ = static_cast<int>(i / cfg_.width);
        } else {
            x_ = cfg_.start_x;
            y_ = cfg_.start_y;
        }
        return State::index(cell_index(x_, y_));
    }

    StepResult do_step(const Action& action) override {
        static constexpr int dx[4] = {0, 1, 0, -1};
        static constexpr int dy[4] = {-1, 0, 1, 0};
        const auto a = static_cast<int>(action.idx());
        const int nx = x_ + dx[a];
        const int ny = y_ + dy[a];

        StepResult r;
        if (!in_grid(nx, ny)) {
            r.reward = -1.0; // wall bump, stay in place
        } else {
            x_ = nx;
            y_ = ny;
            if (cfg_.goal && nx == cfg_.goal->first && ny == cfg_.goal->second) {
                r.reward = 10.0;
                r.absorbing = true;
            }
        }
        r.next_state = State::index(cell_index(x_, y_));
        return r;
    }

private:
    bool in_grid(int x, int y) const {
        return x >= 0 && x < cfg_.width && y >= 0 && y < cfg_.height;
    }

    Config cfg_;
    MdpInfo info_;
    int x_ = 0;
    int y_ = 0;
};

} // namespace rlcore
