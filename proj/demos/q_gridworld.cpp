// Minimal end-to-end script: instantiate problem, policy and agent, hand them
// to the core, learn, then evaluate greedily.

#include <cstdio>

#include "rlcore/rlcore.hpp"

using namespace rlcore;

int main() {
    const std::uint64_t seed = 7;

    GridWorld mdp({}, split_seed(seed, "env"));
    const auto& info = mdp.info();

    auto q = std::make_shared<QRegressor>(std::make_unique<TabularRegressor>(
        info.observation_space.size(), info.action_space.size()));
    auto pi = std::make_shared<EpsGreedyPolicy>(
        q, std::make_unique<LinearDecaySchedule>(1.0, 0.01, 10000));
    QLearning agent(info, q, pi, std::make_unique<VisitDecaySchedule>(1.0, 0.8), seed);

    Core core(agent, mdp);
    core.learn(20000, std::nullopt, 1, std::nullopt);

    agent.set_evaluation(true);
    const Dataset data = core.evaluate(std::nullopt, 10);
    const auto j = compute_J(data, info.gamma);
    double mean = 0.0;
    for (double v : j) mean += v;
    std::printf("mean discounted return over %zu episodes: %.4f\n", j.size(),
                mean / static_cast<double>(j.size()));
    return 0;
}
