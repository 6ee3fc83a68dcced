#pragma once

#include <functional>
#include <iostream>
#include <optional>
#include <vector>

#include "rlcore/agent.hpp"
#include "rlcore/dataset.hpp"
#include "rlcore/environment.hpp"

namespace rlcore {

/// Pure observer of fresh transition quanta; receives read-only views and
/// cannot mutate the dataset.
using Callback = std::function<void(const Dataset&)>;

/// Drives agent-environment interaction, builds datasets, invokes callbacks
/// and separates learning from evaluation. Strictly single-threaded;
/// parallelism exists only at the whole-experiment level.
class Core {
public:
    Core(Agent& agent, Environment& env, std::vector<Callback> callbacks = {})
        : agent_(agent), env_(env), callbacks_(std::move(callbacks)) {}

    /// Runs interaction, calling agent.fit (and then every callback) each
    /// time the per-fit quantum of fresh transitions accumulates. Exactly one
    /// of n_steps/n_episodes and exactly one of the per-fit quantities must
    /// be set. A trailing partial quantum is flushed to the callbacks without
    /// a fit.
    Dataset learn(std::optional<std::int64_t> n_steps, std::optional<std::int64_t> n_episodes,
                  std::optional<std::int64_t> n_steps_per_fit,
                  std::optional<std::int64_t> n_episodes_per_fit) {
        if (n_steps_per_fit.has_value() == n_episodes_per_fit.has_value())
            throw ConfigError("set exactly one of n_steps_per_fit/n_episodes_per_fit");
        return run(n_steps, n_episodes, n_steps_per_fit, n_episodes_per_fit, false);
    }

    /// Identical interaction loop with zero fit calls. Switch the agent to
    /// its greedy/deterministic evaluation mode beforehand if desired.
    Dataset evaluate(std::optional<std::int64_t> n_steps, std::optional<std::int64_t> n_episodes,
                     bool render = false) {
        return run(n_steps, n_episodes, std::nullopt, std::nullopt, render);
    }

private:
    Dataset run(std::optional<std::int64_t> n_steps, std::optional<std::int64_t> n_episodes,
                std::optional<std::int64_t> n_steps_per_fit,
                std::optional<std::int64_t> n_episodes_per_fit, bool render) {
        if (n_steps.has_value() == n_episodes.has_value())
            throw ConfigError("set exactly one of n_steps/n_episodes");
        if ((n_steps && *n_steps < 1) || (n_episodes && *n_episodes < 1))
            throw ConfigError("the run quantum must be positive");
        const bool learning = n_steps_per_fit || n_episodes_per_fit;

        Dataset dataset;
        Dataset fresh;
        std::int64_t fresh_episodes = 0;
        std::int64_t steps_done = 0;
        std::int64_t episodes_done = 0;
        std::int64_t episode_steps = 0;
        bool need_reset = true;
        State state;

        const auto finished = [&] {
            return n_steps ? steps_done >= *n_steps : episodes_done >= *n_episodes;
        };

        while (!finished()) {
            if (need_reset) {
                state = env_.reset();
                agent_.episode_start();
                episode_steps = 0;
                need_reset = false;
            }
            const Action action = agent_.draw_action(state);
            const auto result = env_.step(action);
            ++episode_steps;
            ++steps_done;
            if (render) env_.render(std::cout);

            Transition t;
            t.state = state;
            t.action = action;
            t.reward = result.reward;
            t.next_state = result.next_state;
            t.absorbing = result.absorbing;
            const bool horizon_cut = episode_steps >= env_.info().horizon;
            const bool out_of_steps = n_steps && steps_done >= *n_steps;
            t.last = result.absorbing || horizon_cut || out_of_steps;

            if (t.last) {
                ++episodes_done;
                ++fresh_episodes;
                need_reset = true;
            } else {
                state = result.next_state;
            }
            dataset.push_back(t);
            fresh.push_back(std::move(t));

            const bool quantum_full =
                learning && (n_steps_per_fit
                                 ? static_cast<std::int64_t>(fresh.size()) >= *n_steps_per_fit
                                 : fresh_episodes >= *n_episodes_per_fit);
            if (quantum_full) {
                agent_.fit(fresh);
                for (const auto& cb : callbacks_) cb(fresh);
                fresh.clear();
                fresh_episodes = 0;
            }
        }
        if (!fresh.empty())
            for (const auto& cb : callbacks_) cb(fresh);
        return dataset;
    }

    Agent& agent_;
    Environment& env_;
    std::vector<Callback> callbacks_;
};

} // namespace rlcore
