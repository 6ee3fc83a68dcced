// DQN on cart-pole through the experiment driver: alternating learn/evaluate
// epochs, metrics CSV, final snapshot.

#include <cstdio>

#include "rlcore/rlcore.hpp"

int main() {
    rlcore::ExperimentConfig cfg;
    cfg.env = "cartpole";
    cfg.algorithm = "dqn";
    cfg.epochs = 10;
    cfg.train_steps = 5000;
    cfg.eval_episodes = 10;
    cfg.seeds = {0};
    cfg.out_dir = "demo_dqn_out";

    const auto results = rlcore::run_experiment(cfg);
    for (const auto& r : results) {
        if (!r.ok) {
            std::fprintf(stderr, "seed %llu failed: %s\n",
                         static_cast<unsigned long long>(r.seed), r.error.c_str());
            return 1;
        }
        for (const auto& rec : r.records)
            std::printf("epoch %lld: mean eval length %.1f, max-Q %.3f\n",
                        static_cast<long long>(rec.epoch), rec.j_undiscounted,
                        rec.max_q_mean.value_or(0.0));
    }
    return 0;
}
