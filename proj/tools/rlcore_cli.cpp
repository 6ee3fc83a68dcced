// Experiment driver: configure an environment/algorithm pair, run alternating
// learn/evaluate epochs over one or more seeds (optionally in parallel), emit
// per-seed metrics CSVs plus a cross-seed aggregate, and snapshot trained
// agents. The eval subcommand loads a snapshot and evaluates it.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rlcore/rlcore.hpp"

namespace {

struct RunFlags {
    std::string env;
    std::string algorithm;
    std::int64_t epochs = -1;
    std::int64_t train_steps = -1;
    std::int64_t train_episodes = -1;
    std::int64_t eval_episodes = -1;
    std::vector<std::uint64_t> seeds;
    int parallel = -1;
    std::string out;
    std::int64_t snapshot_every = -1;
    std::string config;
    std::vector<std::string> params;
};

int do_run(const RunFlags& f) {
    rlcore::ExperimentConfig cfg;
    if (!f.config.empty()) rlcore::apply_config_file(f.config, cfg);

    // command-line flags override config-file values
    if (!f.env.empty()) cfg.env = f.env;
    if (!f.algorithm.empty()) cfg.algorithm = f.algorithm;
    if (f.epochs >= 0) cfg.epochs = f.epochs;
    if (f.train_steps >= 0) {
        cfg.train_steps = f.train_steps;
        cfg.train_episodes.reset();
    }
    if (f.train_episodes >= 0) {
        cfg.train_episodes = f.train_episodes;
        cfg.train_steps.reset();
    }
    if (f.eval_episodes >= 0) cfg.eval_episodes = f.eval_episodes;
    if (!f.seeds.empty()) cfg.seeds = f.seeds;
    if (f.parallel >= 0) cfg.parallel = f.parallel;
    if (!f.out.empty()) cfg.out_dir = f.out;
    if (f.snapshot_every >= 0) cfg.snapshot_every = f.snapshot_every;
    for (const auto& p : f.params) cfg.params.set_pair(p);

    const auto results = rlcore::run_parallel(cfg);
    bool all_ok = true;
    for (const auto& r : results) {
        if (r.ok) {
            std::printf("seed %llu: %zu epochs, metrics at %s\n",
                        static_cast<unsigned long long>(r.seed), r.records.size(),
                        rlcore::metrics_path(cfg, r.seed).c_str());
        } else {
            all_ok = false;
            std::fprintf(stderr, "seed %llu FAILED: %s\n",
                         static_cast<unsigned long long>(r.seed), r.error.c_str());
        }
    }
    return all_ok ? 0 : 1;
}

int do_eval(const std::string& snapshot, const std::string& env_name,
            std::int64_t eval_episodes, std::uint64_t seed,
            const std::vector<std::string>& params, bool render) {
    rlcore::Params p;
    for (const auto& kv : params) p.set_pair(kv);
    auto agent = rlcore::load_snapshot(snapshot);
    auto env = rlcore::make_environment(env_name, p, rlcore::split_seed(seed, "env"));
    if (rlcore::is_policy_search(std::string(agent->algorithm_name())) &&
        env->info().action_space.is_discrete())
        env = std::make_unique<rlcore::ContinuousActionAdapter>(std::move(env));
    agent->reseed(seed);
    agent->set_evaluation(true);

    rlcore::Core core(*agent, *env);
    const auto data = core.evaluate(std::nullopt, eval_episodes, render);
    const auto j = data.compute_J(env->info().gamma);
    double mean = 0.0;
    for (double v : j) mean += v;
    mean /= static_cast<double>(j.size());
    std::printf("episodes=%zu mean_J=%s\n", j.size(), rlcore::format_double(mean).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rlcore experiment driver"};
    app.require_subcommand(1);

    RunFlags f;
    auto* run = app.add_subcommand("run", "run a learn/evaluate experiment");
    run->add_option("--env", f.env, "environment name (gridworld|chain|cartpole|mountaincar)");
    run->add_option("--algorithm", f.algorithm, "algorithm name");
    run->add_option("--epochs", f.epochs, "number of learn+evaluate epochs");
    auto* ts = run->add_option("--train-steps", f.train_steps, "training steps per epoch");
    run->add_option("--train-episodes", f.train_episodes, "training episodes per epoch")
        ->excludes(ts);
    run->add_option("--eval-episodes", f.eval_episodes, "evaluation episodes per epoch");
    run->add_option("--seed", f.seeds, "experiment seed (repeatable)");
    run->add_option("--parallel", f.parallel, "max seeds to run concurrently");
    run->add_option("--out", f.out, "output directory (default $RL_OUT_DIR or '.')");
    run->add_option("--snapshot-every", f.snapshot_every,
                    "write a per-epoch agent snapshot every k epochs (0: final only)");
    run->add_option("--config", f.config, "flat key=value config file");
    run->add_option("--param", f.params, "algorithm/env parameter key=value (repeatable)");

    std::string snapshot_file, eval_env;
    std::int64_t eval_episodes = 10;
    std::uint64_t eval_seed = 0;
    std::vector<std::string> eval_params;
    bool render = false;
    auto* ev = app.add_subcommand("eval", "evaluate a snapshotted agent");
    ev->add_option("--snapshot", snapshot_file, "agent snapshot file")->required();
    ev->add_option("--env", eval_env, "environment name")->required();
    ev->add_option("--eval-episodes", eval_episodes, "episodes to evaluate");
    ev->add_option("--seed", eval_seed, "evaluation seed");
    ev->add_option("--param", eval_params, "env parameter key=value (repeatable)");
    ev->add_flag("--render", render, "ASCII state dump each step");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return do_run(f);
        return do_eval(snapshot_file, eval_env, eval_episodes, eval_seed, eval_params, render);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
