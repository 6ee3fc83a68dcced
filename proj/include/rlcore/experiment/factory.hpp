#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "rlcore/agents/batch.hpp"
#include "rlcore/agents/dqn.hpp"
#include "rlcore/agents/pg.hpp"
#include "rlcore/agents/td.hpp"
#include "rlcore/agents/true_online_sarsa.hpp"
#include "rlcore/envs/factory.hpp"
#include "rlcore/params.hpp"

namespace rlcore {

inline const std::vector<std::string>& algorithm_names() {
    static const std::vector<std::string> names = {
        "q",       "double_q", "weighted_q", "speedy_q", "r",    "sarsa",
        "expected_sarsa", "true_online_sarsa_lambda", "fqi", "lspi", "reinforce",
        "gpomdp",  "enac",     "pgpe",       "rwr",      "dqn",  "ddqn",
        "averaged_dqn"};
    return names;
}

inline bool is_policy_search(const std::string& algorithm) {
    return algorithm == "reinforce" || algorithm == "gpomdp" || algorithm == "enac" ||
           algorithm == "pgpe" || algorithm == "rwr";
}

/// Presents a discrete-action environment as a 1-d continuous-action one, so
/// the episodic policy-search methods can drive it: the real-valued action is
/// rounded and clamped onto the underlying index set.
class ContinuousActionAdapter final : public Environment {
public:
    explicit ContinuousActionAdapter(std::unique_ptr<Environment> inner)
        : inner_(std::move(inner)),
          info_(inner_->info().observation_space, Space::box(1), inner_->info().gamma,
                inner_->info().horizon),
          n_actions_(inner_->info().n_actions()) {}

    const MdpInfo& info() const override { return info_; }
    void seed(std::uint64_t s) override { inner_->seed(s); }
    void render(std::ostream& os) const override { inner_->render(os); }

protected:
    State do_reset(const std::optional<State>& initial_state) override {
        return inner_->reset(initial_state);
    }

    StepResult do_step(const Action& action) override {
        const double raw = std::round(action.vec()[0]);
        const auto idx = static_cast<std::int64_t>(
            std::clamp(raw, 0.0, static_cast<double>(n_actions_ - 1)));
        const auto r = inner_->step(Action::index(idx));
        return {r.next_state, r.reward, r.absorbing};
    }

private:
    std::unique_ptr<Environment> inner_;
    MdpInfo info_;
    std::int64_t n_actions_;
};

namespace detail {

inline std::unique_ptr<Schedule> make_alpha(const Params& p, const std::string& default_mode) {
    const std::string mode = p.get_string("alpha_mode", default_mode);
    if (mode == "fixed") return std::make_unique<FixedSchedule>(p.get_double("alpha", 0.1));
    if (mode == "visit")
        return std::make_unique<VisitDecaySchedule>(p.get_double("alpha_v0", 1.0),
                                                    p.get_double("alpha_p", 0.8));
    throw ConfigError("alpha_mode must be 'fixed' or 'visit'");
}

inline std::unique_ptr<Schedule> make_epsilon(const Params& p) {
    const std::string mode = p.get_string("eps_mode", "linear");
    if (mode == "fixed") return std::make_unique<FixedSchedule>(p.get_double("eps", 0.1));
    if (mode == "linear")
        return std::make_unique<LinearDecaySchedule>(p.get_double("eps_v0", 1.0),
                                                     p.get_double("eps_min", 0.01),
                                                     p.get_int("eps_decay_steps", 10000));
    throw ConfigError("eps_mode must be 'fixed' or 'linear'");
}

inline std::shared_ptr<Policy> make_discrete_policy(const Params& p,
                                                    std::shared_ptr<const QFunction> q) {
    const std::string kind = p.get_string("policy", "epsgreedy");
    if (kind == "epsgreedy") return std::make_shared<EpsGreedyPolicy>(std::move(q), make_epsilon(p));
    if (kind == "boltzmann")
        return std::make_shared<BoltzmannPolicy>(
            std::move(q), std::make_unique<FixedSchedule>(p.get_double("beta", 1.0)));
    throw ConfigError("policy must be 'epsgreedy' or 'boltzmann'");
}

inline std::shared_ptr<QRegressor> make_tabular_q(const MdpInfo& info, int members,
                                                  TabularRegressor::FitMode mode) {
    if (!info.observation_space.is_discrete() || !info.action_space.is_discrete())
        throw ConfigError("tabular algorithms need discrete observation and action spaces");
    return std::make_shared<QRegressor>(
        std::make_unique<TabularRegressor>(info.observation_space.size(),
                                           info.action_space.size(), mode),
        members);
}

/// State features for the linear methods: one-hot over a discrete space,
/// tile coding over a bounded box.
inline std::unique_ptr<FeatureMap> make_state_features(const MdpInfo& info, const Params& p) {
    if (info.observation_space.is_discrete())
        return TileFeatures::one_hot(info.observation_space.size());
    const int n_tilings = static_cast<int>(p.get_int("n_tilings", 8));
    const int tiles = static_cast<int>(p.get_int("tiles_per_dim", 8));
    const auto& obs = info.observation_space;
    std::vector<int> per_dim(obs.dim(), tiles);
    return std::make_unique<TileFeatures>(n_tilings, per_dim, obs.low(), obs.high());
}

inline std::shared_ptr<GaussianLinearPolicy> make_gaussian_policy(const MdpInfo& info,
                                                                  const Params& p) {
    if (info.action_space.is_discrete())
        throw ConfigError("policy-search methods need a continuous action space "
                          "(the experiment driver adapts discrete environments)");
    const int action_dim = info.action_space.dim();
    const int state_dim = info.observation_space.dim();
    const bool bias = p.get_bool("policy_bias", true);
    std::unique_ptr<FeatureMap> phi;
    const std::string kind = p.get_string("policy_features", "identity");
    if (kind == "identity") {
        phi = std::make_unique<IdentityFeatures>(state_dim, bias);
    } else if (kind.rfind("poly", 0) == 0) {
        phi = std::make_unique<PolynomialFeatures>(
            state_dim, static_cast<int>(p.get_int("policy_degree", 2)), bias);
    } else {
        throw ConfigError("policy_features must be 'identity' or 'poly'");
    }
    const double sigma = p.get_double("sigma", 1.0);
    return std::make_shared<GaussianLinearPolicy>(std::move(phi), action_dim,
                                                  Vec::Constant(action_dim, sigma));
}

inline std::unique_ptr<Schedule> make_lr(const Params& p) {
    return std::make_unique<FixedSchedule>(p.get_double("lr", 0.01));
}

inline MlpRegressor::Config make_net_config(const Params& p) {
    MlpRegressor::Config net;
    net.hidden.clear();
    for (auto h : p.get_int_list("hidden", {80, 80})) net.hidden.push_back(static_cast<int>(h));
    net.learning_rate = p.get_double("net_lr", 1e-3);
    net.rms_decay = p.get_double("rms_decay", 0.95);
    net.rms_eps = p.get_double("rms_eps", 1e-8);
    net.epochs = 1;
    return net;
}

inline DqnAgent::Config make_dqn_config(const Params& p, DqnVariant variant) {
    DqnAgent::Config cfg;
    cfg.variant = variant;
    cfg.buffer_capacity = static_cast<std::size_t>(p.get_int("buffer", 50000));
    cfg.batch_size = static_cast<std::size_t>(p.get_int("batch", 32));
    cfg.initial_replay_size = static_cast<std::size_t>(p.get_int("initial_replay", 500));
    cfg.target_update_period = p.get_int("target_update", 200);
    cfg.n_target_copies = variant == DqnVariant::AveragedDqn
                              ? static_cast<int>(p.get_int("k", 5))
                              : 1;
    cfg.net = make_net_config(p);
    return cfg;
}

} // namespace detail

/// Builds an algorithm by name against an environment's metadata. The master
/// seed is split into the component streams inside each agent. Documented
/// framework defaults apply; params override them.
inline std::unique_ptr<Agent> make_agent(const std::string& algorithm, const MdpInfo& info,
                                         const Params& p, std::uint64_t master_seed) {
    using detail::make_alpha;
    using detail::make_discrete_policy;
    using detail::make_tabular_q;

    if (algorithm == "q" || algorithm == "double_q" || algorithm == "weighted_q" ||
        algorithm == "speedy_q" || algorithm == "r" || algorithm == "sarsa" ||
        algorithm == "expected_sarsa") {
        const int members = algorithm == "double_q" ? 2 : 1;
        auto q = make_tabular_q(info, members, TabularRegressor::FitMode::Assign);
        auto policy = make_discrete_policy(p, q);
        auto alpha = make_alpha(p, "visit");
        if (algorithm == "q")
            return std::make_unique<QLearning>(info, q, policy, std::move(alpha), master_seed);
        if (algorithm == "double_q")
            return std::make_unique<DoubleQLearning>(info, q, policy, std::move(alpha),
                                                     master_seed);
        if (algorithm == "weighted_q")
            return std::make_unique<WeightedQLearning>(
                info, q, policy, std::move(alpha), master_seed,
                p.get_double("prior_variance", 1e4),
                static_cast<int>(p.get_int("quadrature_points", 11)));
        if (algorithm == "speedy_q")
            return std::make_unique<SpeedyQLearning>(info, q, policy, std::move(alpha),
                                                     master_seed);
        if (algorithm == "r")
            return std::make_unique<RLearning>(
                info, q, policy, std::move(alpha),
                std::make_unique<FixedSchedule>(p.get_double("beta", 0.1)), master_seed);
        if (algorithm == "sarsa")
            return std::make_unique<Sarsa>(info, q, policy, std::move(alpha), master_seed);
        return std::make_unique<ExpectedSarsa>(info, q, policy, std::move(alpha), master_seed);
    }

    if (algorithm == "true_online_sarsa_lambda") {
        auto features = detail::make_state_features(info, p);
        return std::make_unique<TrueOnlineSarsaLambda>(
            info, std::move(features), p.get_double("lambda", 0.9), make_alpha(p, "fixed"),
            detail::make_epsilon(p), master_seed);
    }

    if (algorithm == "fqi") {
        auto q = make_tabular_q(info, 1, TabularRegressor::FitMode::Average);
        return std::make_unique<Fqi>(info, q, static_cast<int>(p.get_int("n_iterations", 20)),
                                     master_seed);
    }
    if (algorithm == "lspi") {
        auto features = detail::make_state_features(info, p);
        return std::make_unique<Lspi>(info, std::move(features),
                                      p.get_double("tolerance", 1e-4),
                                      static_cast<int>(p.get_int("max_iterations", 50)),
                                      master_seed);
    }

    if (is_policy_search(algorithm)) {
        auto policy = detail::make_gaussian_policy(info, p);
        auto lr = detail::make_lr(p);
        const int batch = static_cast<int>(p.get_int("fit_episodes", 10));
        if (algorithm == "reinforce")
            return std::make_unique<Reinforce>(info, policy, std::move(lr), batch, master_seed);
        if (algorithm == "gpomdp")
            return std::make_unique<Gpomdp>(info, policy, std::move(lr), batch, master_seed);
        if (algorithm == "enac")
            return std::make_unique<Enac>(info, policy, std::move(lr), batch, master_seed);
        if (algorithm == "pgpe") {
            const double hyper_sigma = p.get_double("pgpe_sigma", 1.0);
            return std::make_unique<Pgpe>(info, policy, std::move(lr), batch,
                                          Vec::Constant(policy->param_count(), hyper_sigma),
                                          master_seed);
        }
        return std::make_unique<Rwr>(info, policy, std::move(lr), batch,
                                     p.get_double("rwr_beta", 1.0), master_seed);
    }

    if (algorithm == "dqn" || algorithm == "ddqn" || algorithm == "averaged_dqn") {
        const DqnVariant variant = algorithm == "dqn"      ? DqnVariant::Dqn
                                   : algorithm == "ddqn"   ? DqnVariant::DoubleDqn
                                                           : DqnVariant::AveragedDqn;
        return std::make_unique<DqnAgent>(info, detail::make_dqn_config(p, variant),
                                          detail::make_epsilon(p), master_seed);
    }

    std::string msg = "unknown algorithm '" + algorithm + "'; valid names:";
    for (const auto& n : algorithm_names()) msg += " " + n;
    throw ConfigError(msg);
}

/// Rebuilds an agent from snapshot bytes (any algorithm).
inline std::unique_ptr<Agent> load_agent(std::string_view bytes) {
    BinaryReader r = snapshot_reader_expect(bytes, "agent");
    const std::string name = r.get_str();
    if (name == "q") return QLearning::load_payload(r);
    if (name == "double_q") return DoubleQLearning::load_payload(r);
    if (name == "weighted_q") return WeightedQLearning::load_payload(r);
    if (name == "speedy_q") return SpeedyQLearning::load_payload(r);
    if (name == "r") return RLearning::load_payload(r);
    if (name == "sarsa") return Sarsa::load_payload(r);
    if (name == "expected_sarsa") return ExpectedSarsa::load_payload(r);
    if (name == "true_online_sarsa_lambda") return TrueOnlineSarsaLambda::load_payload(r);
    if (name == "fqi") return Fqi::load_payload(r);
    if (name == "lspi") return Lspi::load_payload(r);
    if (name == "reinforce") return Reinforce::load_payload(r);
    if (name == "gpomdp") return Gpomdp::load_payload(r);
    if (name == "enac") return Enac::load_payload(r);
    if (name == "pgpe") return Pgpe::load_payload(r);
    if (name == "rwr") return Rwr::load_payload(r);
    if (name == "dqn" || name == "ddqn" || name == "averaged_dqn")
        return DqnAgent::load_payload(r);
    throw DecodeError("snapshot names unknown algorithm '" + name + "'");
}

/// Reads an agent snapshot file.
inline std::unique_ptr<Agent> load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open snapshot file " + path);
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_agent(bytes);
}

} // namespace rlcore
