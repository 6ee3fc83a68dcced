#pragma once

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rlcore/core.hpp"
#include "rlcore/experiment/factory.hpp"

namespace rlcore {

/// Shortest round-trip decimal rendering; stable across runs.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct ExperimentConfig {
    std::string env;
    std::string algorithm;
    Params params;
    std::int64_t epochs = 1;
    std::optional<std::int64_t> train_steps;    // per epoch
    std::optional<std::int64_t> train_episodes; // per epoch
    std::int64_t eval_episodes = 10;
    std::vector<std::uint64_t> seeds = {0};
    int parallel = 1;
    std::string out_dir;
    std::int64_t snapshot_every = 0; // per-epoch snapshots every k epochs; 0 = final only

    void validate() const {
        if (env.empty()) throw ConfigError("no environment selected");
        if (algorithm.empty()) throw ConfigError("no algorithm selected");
        if (epochs < 1) throw ConfigError("epochs must be >= 1");
        if (train_steps.has_value() == train_episodes.has_value())
            throw ConfigError("set exactly one of train steps/episodes per epoch");
        if ((train_steps && *train_steps < 1) || (train_episodes && *train_episodes < 1))
            throw ConfigError("the train quantum must be positive");
        if (eval_episodes < 1) throw ConfigError("eval episodes must be >= 1");
        if (seeds.empty()) throw ConfigError("at least one seed required");
        if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
            throw ConfigError("seeds must be pairwise distinct");
        if (parallel < 1) throw ConfigError("parallelism degree must be >= 1");
        if (snapshot_every < 0) throw ConfigError("snapshot_every must be >= 0");
    }

    std::string resolved_out_dir() const {
        if (!out_dir.empty()) return out_dir;
        if (const char* env_dir = std::getenv("RL_OUT_DIR")) return env_dir;
        return ".";
    }
};

/// One learn-evaluate cycle's metrics for one seed.
struct EpochRecord {
    std::uint64_t seed = 0;
    std::int64_t epoch = 0;
    double j_discounted = 0.0;
    double j_undiscounted = 0.0;
    std::int64_t n_episodes = 0;
    std::optional<double> max_q_mean;
    double seconds = 0.0;
};

struct SeedResult {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    std::vector<EpochRecord> records;
};

inline constexpr const char* kMetricsHeader =
    "seed,epoch,j_discounted,j_undiscounted,n_episodes,max_q_mean,seconds";

inline std::string metrics_path(const ExperimentConfig& cfg, std::uint64_t seed) {
    return cfg.resolved_out_dir() + "/metrics_seed" + std::to_string(seed) + ".csv";
}

inline std::string snapshot_path(const ExperimentConfig& cfg, std::uint64_t seed,
                                 std::optional<std::int64_t> epoch = std::nullopt) {
    std::string p = cfg.resolved_out_dir() + "/agent_seed" + std::to_string(seed);
    if (epoch) p += "_epoch" + std::to_string(*epoch);
    else p += "_final";
    return p + ".snap";
}

namespace detail {

inline std::string csv_line(const EpochRecord& r) {
    std::string line = std::to_string(r.seed) + "," + std::to_string(r.epoch) + "," +
                       format_double(r.j_discounted) + "," + format_double(r.j_undiscounted) +
                       "," + std::to_string(r.n_episodes) + ",";
    if (r.max_q_mean) line += format_double(*r.max_q_mean);
    line += "," + format_double(r.seconds);
    return line;
}

inline double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

/// Fixed held-out states for the mean-max-Q metric, gathered by uniform
/// random rollouts on an independently seeded environment copy.
inline std::vector<State> collect_heldout_states(const std::string& env_name,
                                                 const Params& params,
                                                 std::uint64_t master_seed, std::size_t count) {
    auto env = make_environment(env_name, params, split_seed(master_seed, "heldout"));
    Rng rng(split_seed(master_seed, "heldout-actions"));
    std::vector<State> states;
    const auto n_actions = env->info().n_actions();
    State s = env->reset();
    std::int64_t episode_steps = 0;
    while (states.size() < count) {
        states.push_back(s);
        const auto r = env->step(Action::index(rng.uniform_int(n_actions)));
        ++episode_steps;
        if (r.absorbing || episode_steps >= env->info().horizon) {
            s = env->reset();
            episode_steps = 0;
        } else {
            s = r.next_state;
        }
    }
    return states;
}

inline void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to " + path);
}

} // namespace detail

/// Runs one seed's experiment: build env/agent/core from the derived seeds,
/// then alternate learn and evaluate epochs, appending one record per epoch
/// to this seed's metrics CSV (flushed per line).
inline SeedResult run_seed(const ExperimentConfig& cfg, std::uint64_t master_seed) {
    SeedResult result;
    result.seed = master_seed;

    // private copy: the used-key bookkeeping must not be shared across seeds
    const Params params = cfg.params;

    auto env = make_environment(cfg.env, params, split_seed(master_seed, "env"));
    if (is_policy_search(cfg.algorithm) && env->info().action_space.is_discrete())
        env = std::make_unique<ContinuousActionAdapter>(std::move(env));
    auto agent = make_agent(cfg.algorithm, env->info(), params, master_seed);

    // per-fit quantum: algorithm override, else family default
    std::optional<std::int64_t> fit_steps;
    std::optional<std::int64_t> fit_episodes;
    if (params.has("fit_steps")) {
        fit_steps = params.get_int("fit_steps", 1);
    } else if (auto* pg = dynamic_cast<EpisodicPgAgent*>(agent.get())) {
        fit_episodes = pg->n_episodes_per_fit();
    } else if (cfg.algorithm == "fqi" || cfg.algorithm == "lspi") {
        if (cfg.train_steps) fit_steps = *cfg.train_steps;
        else fit_episodes = *cfg.train_episodes;
    } else {
        fit_steps = 1;
    }
    if (params.has("fit_episodes")) {
        fit_episodes = params.get_int("fit_episodes", 1);
        fit_steps.reset();
    }

    const bool greedy_eval = params.get_bool("greedy_eval", true);
    const bool value_based = agent->q_function() != nullptr;
    std::vector<State> heldout;
    if (value_based)
        heldout = detail::collect_heldout_states(
            cfg.env, params, master_seed,
            static_cast<std::size_t>(params.get_int("heldout_states", 100)));

    std::ofstream csv(metrics_path(cfg, master_seed), std::ios::trunc);
    if (!csv) throw IoError("cannot write " + metrics_path(cfg, master_seed));
    csv << kMetricsHeader << '\n' << std::flush;

    Core core(*agent, *env);
    const double gamma = env->info().gamma;
    for (std::int64_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        core.learn(cfg.train_steps, cfg.train_episodes, fit_steps, fit_episodes);

        if (greedy_eval) agent->set_evaluation(true);
        const Dataset eval = core.evaluate(std::nullopt, cfg.eval_episodes);
        agent->set_evaluation(false);

        EpochRecord rec;
        rec.seed = master_seed;
        rec.epoch = epoch;
        const auto j_disc = eval.compute_J(gamma);
        const auto j_undisc = eval.compute_J(1.0);
        rec.j_discounted = detail::mean_of(j_disc);
        rec.j_undiscounted = detail::mean_of(j_undisc);
        rec.n_episodes = static_cast<std::int64_t>(eval.n_episodes());
        if (value_based) rec.max_q_mean = max_q_mean(*agent->q_function(), heldout);
        rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.records.push_back(rec);
        csv << detail::csv_line(rec) << '\n' << std::flush;

        if (cfg.snapshot_every > 0 && (epoch + 1) % cfg.snapshot_every == 0)
            detail::write_file(snapshot_path(cfg, master_seed, epoch), agent->snapshot());
    }
    detail::write_file(snapshot_path(cfg, master_seed), agent->snapshot());
    params.check_all_used();

    result.ok = true;
    return result;
}

/// Cross-seed aggregation: per-epoch mean and normal-approximation 95%
/// confidence half-width (1.96 s / sqrt(n)) of each metric.
inline void write_aggregate(const ExperimentConfig& cfg, const std::vector<SeedResult>& results) {
    std::ofstream out(cfg.resolved_out_dir() + "/aggregate.csv", std::ios::trunc);
    if (!out) throw IoError("cannot write aggregate.csv");
    out << "epoch,metric,mean,ci95\n";

    std::vector<const SeedResult*> ok;
    for (const auto& r : results)
        if (r.ok) ok.push_back(&r);
    if (ok.empty()) return;

    const auto emit = [&](std::int64_t epoch, const char* name, const std::vector<double>& xs) {
        if (xs.size() != ok.size()) return; // metric missing for some seed
        const double m = detail::mean_of(xs);
        double var = 0.0;
        for (double x : xs) var += (x - m) * (x - m);
        const double ci = xs.size() > 1
                              ? 1.96 * std::sqrt(var / static_cast<double>(xs.size() - 1)) /
                                    std::sqrt(static_cast<double>(xs.size()))
                              : 0.0;
        out << epoch << ',' << name << ',' << format_double(m) << ',' << format_double(ci)
            << '\n';
    };

    for (std::int64_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<double> jd, ju, mq;
        for (const auto* r : ok) {
            if (epoch >= static_cast<std::int64_t>(r->records.size())) continue;
            const auto& rec = r->records[static_cast<std::size_t>(epoch)];
            jd.push_back(rec.j_discounted);
            ju.push_back(rec.j_undiscounted);
            if (rec.max_q_mean) mq.push_back(*rec.max_q_mean);
        }
        emit(epoch, "j_discounted", jd);
        emit(epoch, "j_undiscounted", ju);
        emit(epoch, "max_q_mean", mq);
    }
}

/// Executes every seed, at most cfg.parallel at a time. Each seed is an
/// isolated single-threaded unit writing only its own files; per-seed
/// results are therefore invariant to the parallelism degree. A failing
/// seed is reported in its result; the others complete.
inline std::vector<SeedResult> run_parallel(const ExperimentConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.resolved_out_dir());

    std::vector<SeedResult> results(cfg.seeds.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cfg.seeds.size()) return;
            try {
                results[i] = run_seed(cfg, cfg.seeds[i]);
            } catch (const std::exception& e) {
                results[i].seed = cfg.seeds[i];
                results[i].ok = false;
                results[i].error = e.what();
            }
        }
    };

    const auto degree =
        std::min<std::size_t>(static_cast<std::size_t>(cfg.parallel), cfg.seeds.size());
    if (degree <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < degree; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    write_aggregate(cfg, results);
    return results;
}

/// Sequential convenience wrapper: all seeds in listed order.
inline std::vector<SeedResult> run_experiment(ExperimentConfig cfg) {
    cfg.parallel = 1;
    return run_parallel(cfg);
}

/// Flat key=value config file: blank lines and '#' comments ignored.
/// Recognized keys: env, algorithm, epochs, train_steps, train_episodes,
/// eval_episodes, seeds (comma-separated), parallel, out, snapshot_every,
/// and param.<key> entries feeding the parameter bag.
inline void apply_config_file(const std::string& path, ExperimentConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
            line.pop_back();
        std::size_t start = 0;
        while (start < line.size() && (line[start] == ' ' || line[start] == '\t')) ++start;
        line.erase(0, start);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "env") cfg.env = value;
        else if (key == "algorithm") cfg.algorithm = value;
        else if (key == "epochs") cfg.epochs = std::stoll(value);
        else if (key == "train_steps") cfg.train_steps = std::stoll(value);
        else if (key == "train_episodes") cfg.train_episodes = std::stoll(value);
        else if (key == "eval_episodes") cfg.eval_episodes = std::stoll(value);
        else if (key == "parallel") cfg.parallel = static_cast<int>(std::stoll(value));
        else if (key == "out") cfg.out_dir = value;
        else if (key == "snapshot_every") cfg.snapshot_every = std::stoll(value);
        else if (key == "seeds") {
            cfg.seeds.clear();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ',')) cfg.seeds.push_back(std::stoull(item));
        } else if (key.rfind("param.", 0) == 0) {
            cfg.params.set(key.substr(6), value);
        } else {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        }
    }
}

} // namespace rlcore
