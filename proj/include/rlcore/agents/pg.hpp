#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "rlcore/agent.hpp"
#include "rlcore/policy.hpp"
#include "rlcore/schedule.hpp"

namespace rlcore {

namespace detail {

/// Per-episode views of a dataset batch: score vectors, discounted rewards
/// and discounted returns. Incomplete trailing episodes are excluded.
struct EpisodeBatch {
    std::vector<std::vector<Vec>> scores;           // diff_log per step
    std::vector<std::vector<double>> disc_rewards;  // gamma^t r_t per step
    std::vector<double> returns;                    // G_e

    std::size_t n_episodes() const { return returns.size(); }
};

inline EpisodeBatch build_episode_batch(const Dataset& d, const GaussianLinearPolicy& policy,
                                        double gamma, bool with_scores = true) {
    EpisodeBatch batch;
    for (auto [b, e] : d.episode_ranges(/*complete_only=*/true)) {
        std::vector<Vec> scores;
        std::vector<double> rewards;
        double g = 1.0;
        double ret = 0.0;
        for (std::size_t i = b; i < e; ++i) {
            if (with_scores) scores.push_back(policy.diff_log(d[i].state, d[i].action));
            rewards.push_back(g * d[i].reward);
            ret += g * d[i].reward;
            g *= gamma;
        }
        batch.scores.push_back(std::move(scores));
        batch.disc_rewards.push_back(std::move(rewards));
        batch.returns.push_back(ret);
    }
    if (batch.returns.empty()) throw DomainError("batch holds no complete episode");
    return batch;
}

} // namespace detail

/// Shared machinery of the episodic policy-search methods: a linear-Gaussian
/// policy, a learning-rate schedule and an episode batch size (the fit
/// quantum the experiment driver should use).
class EpisodicPgAgent : public Agent {
public:
    Action draw_action(const State& s) override { return policy_->draw(s, policy_rng_); }

    void set_evaluation(bool on) override { policy_->set_evaluation(on); }

    GaussianLinearPolicy& policy() { return *policy_; }
    const GaussianLinearPolicy& policy() const { return *policy_; }
    int n_episodes_per_fit() const { return n_episodes_per_fit_; }

    void reseed(std::uint64_t master_seed) override {
        policy_rng_.seed(split_seed(master_seed, "policy"));
        agent_rng_.seed(split_seed(master_seed, "agent"));
    }

    /// The update direction the next fit() would apply: the gradient
    /// estimate, or the parameter delta for the weighted-regression variant.
    virtual Vec estimate_gradient(const Dataset& episodes) const = 0;

protected:
    EpisodicPgAgent(MdpInfo info, std::shared_ptr<GaussianLinearPolicy> policy,
                    std::unique_ptr<Schedule> lr, int n_episodes_per_fit,
                    std::uint64_t master_seed)
        : Agent(std::move(info)),
          policy_(std::move(policy)),
          lr_(std::move(lr)),
          n_episodes_per_fit_(n_episodes_per_fit) {
        if (n_episodes_per_fit_ < 1) throw DomainError("batch size must be >= 1");
        reseed(master_seed);
    }

    void save_common(BinaryWriter& w) const {
        info_.save(w);
        policy_->save(w);
        lr_->save(w);
        w.put_i64(n_episodes_per_fit_);
    }

    struct Parts {
        MdpInfo info;
        std::shared_ptr<GaussianLinearPolicy> policy;
        std::unique_ptr<Schedule> lr;
        int n_episodes_per_fit;
    };

    static Parts load_parts(BinaryReader& r) {
        MdpInfo info = MdpInfo::load(r);
        std::shared_ptr<GaussianLinearPolicy> policy = GaussianLinearPolicy::load(r);
        auto lr = Schedule::load(r);
        const int batch = static_cast<int>(r.get_i64());
        return {std::move(info), std::move(policy), std::move(lr), batch};
    }

    std::shared_ptr<GaussianLinearPolicy> policy_;
    std::unique_ptr<Schedule> lr_;
    int n_episodes_per_fit_;
    Rng policy_rng_;
    Rng agent_rng_;
};

/// REINFORCE with the variance-optimal scalar baseline per component:
///   g_j = mean_e (sum_t s_t)_j (G_e - b_j),
///   b_j = sum_e (sum_t s_t)_j^2 G_e / sum_e (sum_t s_t)_j^2.
class Reinforce final : public EpisodicPgAgent {
public:
    Reinforce(MdpInfo info, std::shared_ptr<GaussianLinearPolicy> policy,
              std::unique_ptr<Schedule> lr, int n_episodes_per_fit, std::uint64_t master_seed)
        : EpisodicPgAgent(std::move(info), std::move(policy), std::move(lr), n_episodes_per_fit,
                          master_seed) {}

    std::string_view algorithm_name() const override { return "reinforce"; }

    Vec estimate_gradient(const Dataset& episodes) const override {
        const auto batch = detail::build_episode_batch(episodes, *policy_, info_.gamma);
        const auto n = batch.n_episodes();
        const Eigen::Index dim = policy_->param_count();
        Mat score_sums(dim, n);
        for (std::size_t e = 0; e < n; ++e) {
            Vec ss = Vec::Zero(dim);
            for (const Vec& s : batch.scores[e]) ss += s;
            score_sums.col(static_cast<Eigen::Index>(e)) = ss;
        }
        Vec num = Vec::Zero(dim);
        Vec den = Vec::Zero(dim);
        for (std::size_t e = 0; e < n; ++e) {
            const Vec sq = score_sums.col(e).cwiseProduct(score_sums.col(e));
            num += sq * batch.returns[e];
            den += sq;
        }
        Vec grad = Vec::Zero(dim);
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double b = den[j] > 0.0 ? num[j] / den[j] : 0.0;
            double acc = 0.0;
            for (std::size_t e = 0; e < n; ++e)
                acc += score_sums(j, static_cast<Eigen::Index>(e)) * (batch.returns[e] - b);
            grad[j] = acc / static_cast<double>(n);
        }
        return grad;
    }

    void fit(const Dataset& episodes) override {
        const Vec g = estimate_gradient(episodes);
        policy_->set_params(policy_->get_params() + lr_->next() * g);
    }

    std::string snapshot() const override {
        BinaryWriter w = snapshot_writer("agent");
        w.put_str(algorithm_name());
        save_common(w);
        return w.take();
    }

    static std::unique_ptr<Reinforce> load_payload(BinaryReader& r) {
        Parts p = load_parts(r);
        return std::make_unique<Reinforce>(std::move(p.info), std::move(p.policy),
                                           std::move(p.lr), p.n_episodes_per_fit, 0);
    }
};

/// GPOMDP estimator with per-step componentwise optimal baselines:
///   g_j = mean_e sum_t (cum_t)_j (gamma^t r_t - b_{t,j}),
/// where cum_t is the score sum up to step t and b_{t,j} is the
/// squared-cum-weighted mean of gamma^t r_t over episodes reaching t.
class Gpomdp final : public EpisodicPgAgent {
public:
    Gpomdp(MdpInfo info, std::shared_ptr<GaussianLinearPolicy> policy,
           std::unique_ptr<Schedule> lr, int n_episodes_per_fit, std::uint64_t master_seed)
        : EpisodicPgAgent(std::move(info), std::move(policy), std::move(lr), n_episodes_per_fit,
                          master_seed) {}

    std::string_view algorithm_name() const override { return "gpomdp"; }

    Vec estimate_gradient(const Dataset& episodes) const override {
        const auto batch = detail::build_episode_batch(episodes, *policy_, info_.gamma);
        const auto n = batch.n_episodes();
        const Eigen::Index dim = policy_->param_count();
        std::size_t t_max = 0;
        for (const auto& s : batch.scores) t_max = std::max(t_max, s.size());

        // cumulative scores per episode, advanced step by step
        Mat cums = Mat::Zero(dim, n);
        Vec grad = Vec::Zero(dim);
        std::vector<Vec> contributions(n, Vec::Zero(dim));
        for (std::size_t t = 0; t < t_max; ++t) {
            Vec num = Vec::Zero(dim);
            Vec den = Vec::Zero(dim);
            for (std::size_t e = 0; e < n; ++e) {
                if (t >= batch.scores[e].size()) continue;
                cums.col(static_cast<Eigen::Index>(e)) += batch.scores[e][t];
                const Vec sq = cums.col(e).cwiseProduct(cums.col(e));
                num += sq * batch.disc_rewards[e][t];
                den += sq;
            }
            for (std::size_t e = 0; e < n; ++e) {
                if (t >= batch.scores[e].size()) continue;
                for (Eigen::Index j = 0; j < dim; ++j) {
                    const double b = den[j] > 0.0 ? num[j] / den[j] : 0.0;
                    contributions[e][j] +=
                        cums(j, static_cast<Eigen::Index>(e)) * (batch.disc_rewards[e][t] - b);
                }
            }
        }
        for (std::size_t e = 0; e < n; ++e) grad += contributions[e];
        return grad / static_cast<double>(n);
    }

    void fit(const Dataset& episodes) override {
        const Vec g = estimate_gradient(episodes);
        policy_->set_params(policy_->get_params() + lr_->next() * g);
    }

    std::string snapshot() const override {
        BinaryWriter w = snapshot_writer("agent");
        w.put_str(algorithm_name());
        save_common(w);
        return w.take();
    }

    static std::unique_ptr<Gpomdp> load_payload(BinaryReader& r) {
        Parts p = load_parts(r);
        return std::make_unique<Gpomdp>(std::move(p.info), std::move(p.policy), std::move(p.lr),
                                        p.n_episodes_per_fit, 0);
    }
};

/// Episodic natural actor-critic: least-squares fit of episode returns on
/// [sum of scores; 1]; the returned direction is the score-aligned weight
/// block (the bias weight is discarded). Normal equations are regularized
/// with 1e-8.
class Enac final : public EpisodicPgAgent {
public:
    Enac(MdpInfo info, std::shared_ptr<GaussianLinearPolicy> policy,
         std::unique_ptr<Schedule> lr, int n_episodes_per_fit, std::uint64_t master_seed)
        : EpisodicPgAgent(std::move(info), std::move(policy), std::move(lr), n_episodes_per_fit,
                          master_seed) {}

    std::string_view algorithm_name() const override { return "enac"; }

    Vec estimate_gradient(const Dataset& episodes) const override {
        const auto batch = detail::build_episode_batch(episodes, *policy_, info_.gamma);
        const auto n = batch.n_episodes();
        const Eigen::Index dim = policy_->param_count();
        Mat x(n, dim + 1);
        Vec g(static_cast<Eigen::Index>(n));
        for (std::size_t e = 0; e < n; ++e) {
            Vec ss = Vec::Zero(dim);
            for (const Vec& s : batch.scores[e]) ss += s;
            x.row(static_cast<Eigen::Index>(e)).head(dim) = ss.transpose();
            x(static_cast<Eigen::Index>(e), dim) = 1.0;
            g[static_cast<Eigen::Index>(e)] = batch.returns[e];
        }
        const Mat xtx = x.transpose() * x + 1e-8 * Mat::Identity(dim + 1, dim + 1);
        const Vec beta = xtx.ldlt().solve(x.transpose() * g);
        return beta.head(dim);
    }

    void fit(const Dataset& episodes) override {
        const Vec g = estimate_gradient(episodes);
        policy_->set_params(policy_->get_params() + lr_->next() * g);
    }

    std::string snapshot() const override {
        BinaryWriter w = snapshot_writer("agent");
        w.put_str(algorithm_name());
        save_common(w);
        return w.take();
    }

    static std::unique_ptr<Enac> load_payload(BinaryReader& r) {
        Parts p = load_parts(r);
        return std::make_unique<Enac>(std::move(p.info), std::move(p.policy), std::move(p.lr),
                                      p.n_episodes_per_fit, 0);
    }
};

/// PGPE: policy search over a Gaussian hyper-distribution N(mu, diag
/// sigma^2) on the policy parameters. Each training episode runs with a
/// fixed theta sampled at episode_start (the controller itself acts
/// deterministically); the likelihood-ratio gradient over (mu, sigma) uses
/// the batch mean return as baseline. Evaluation episodes run with theta =
/// mu.
class Pgpe final : public EpisodicPgAgent {
public:
    Pgpe(MdpInfo info, std::shared_ptr<GaussianLinearPolicy> policy,
         std::unique_ptr<Schedule> lr, int n_episodes_per_fit, Vec sigma_init,
         std::uint64_t master_seed)
        : EpisodicPgAgent(std::move(info), std::move(policy), std::move(lr), n_episodes_per_fit,
                          master_seed),
          mu_(policy_->get_params()),
          sigma_(std::move(sigma_init)) {
        if (sigma_.size() != mu_.size()) throw DomainError("one sigma per policy parameter");
        for (Eigen::Index i = 0; i < sigma_.size(); ++i)
            if (sigma_[i] <= 0.0) throw DomainError("hyper sigma must be positive");
    }

    std::string_view algorithm_name() const override { return "pgpe"; }

    /// The controller is deterministic; exploration lives in theta sampling.
    Action draw_action(const State& s) override {
        return Action::vector(policy_->mean(s));
    }

    void episode_start() override {
        if (policy_->evaluation()) {
            policy_->set_params(mu_);
            return;
        }
        Vec theta(mu_.size());
        for (Eigen::Index i = 0; i < theta.size(); ++i)
            theta[i] = mu_[i] + sigma_[i] * agent_rng_.normal();
        policy_->set_params(theta);
        sampled_.push_back(std::move(theta));
    }

    /// Concatenated (mu, sigma) gradient for the recorded thetas.
    Vec estimate_gradient(const Dataset& episodes) const override {
        const auto batch =
            detail::build_episode_batch(episodes, *policy_, info_.gamma, /*with_scores=*/false);
        const auto n = batch.n_episodes();
        if (sampled_.size() != n)
            throw StateError("PGPE needs one sampled theta per complete episode (fit with an "
                             "episode-based quantum)");
        double baseline = 0.0;
        for (double g : batch.returns) baseline += g;
        baseline /= static_cast<double>(n);

        const Eigen::Index dim = mu_.size();
        Vec g_mu = Vec::Zero(dim);
        Vec g_sigma = Vec::Zero(dim);
        for (std::size_t e = 0; e < n; ++e) {
            const Vec& theta = sampled_[e];
            const double adv = batch.returns[e] - baseline;
            for (Eigen::Index i = 0; i < dim; ++i) {
                const double d = theta[i] - mu_[i];
                const double s2 = sigma_[i] * sigma_[i];
                g_mu[i] += d / s2 * adv;
                g_sigma[i] += (d * d - s2) / (s2 * sigma_[i]) * adv;
            }
        }
        Vec out(2 * dim);
        out.head(dim) = g_mu / static_cast<double>(n);
        out.tail(dim) = g_sigma / static_cast<double>(n);
        return out;
    }

    void fit(const Dataset& episodes) override {
        const Vec g = estimate_gradient(episodes);
        sampled_.clear();
        const Eigen::Index dim = mu_.size();
        const double lr = lr_->next();
        mu_ += lr * g.head(dim);
        sigma_ += lr * g.tail(dim);
        sigma_ = sigma_.cwiseMax(1e-6);
        policy_->set_params(mu_);
    }

    const Vec& mu() const { return mu_; }
    const Vec& sigma() const { return sigma_; }

    std::string snapshot() const override {
        BinaryWriter w = snapshot_writer("agent");
        w.put_str(algorithm_name());
        save_common(w);
        w.put_vec(mu_);
        w.put_vec(sigma_);
        return w.take();
    }

    static std::unique_ptr<Pgpe> load_payload(BinaryReader& r) {
        Parts p = load_parts(r);
        Vec mu = r.get_vec();
        Vec sigma = r.get_vec();
        auto a = std::make_unique<Pgpe>(std::move(p.info), std::move(p.policy), std::move(p.lr),
                                        p.n_episodes_per_fit, std::move(sigma), 0);
        a->mu_ = std::move(mu);
        a->policy_->set_params(a->mu_);
        return a;
    }

private:
    Vec mu_;
    Vec sigma_;
    std::vector<Vec> sampled_;
};

/// Reward-weighted regression: a weighted maximum-likelihood update, not a
/// gradient step. Episode weights are exp(beta (G_e - max_e G_e)); the new
/// parameters come from the weighted least-squares fit of actions on policy
/// features, and fit() ignores the learning rate by definition.
class Rwr final : public EpisodicPgAgent {
public:
    Rwr(MdpInfo info, std::shared_ptr<GaussianLinearPolicy> policy,
        std::unique_ptr<Schedule> lr, int n_episodes_per_fit, double beta,
        std::uint64_t master_seed)
        : EpisodicPgAgent(std::move(info), std::move(policy), std::move(lr), n_episodes_per_fit,
                          master_seed),
          beta_(beta) {
        if (beta_ <= 0.0) throw DomainError("RWR beta must be positive");
    }

    std::string_view algorithm_name() const override { return "rwr"; }

    /// Returns theta_new - theta (flattened).
    Vec estimate_gradient(const Dataset& episodes) const override {
        return fit_weighted_ml(episodes) - policy_->get_params();
    }

    void fit(const Dataset& episodes) override {
        policy_->set_params(fit_weighted_ml(episodes));
    }

    double beta() const { return beta_; }

    std::string snapshot() const override {
        BinaryWriter w = snapshot_writer("agent");
        w.put_str(algorithm_name());
        save_common(w);
        w.put_f64(beta_);
        return w.take();
    }

    static std::unique_ptr<Rwr> load_payload(BinaryReader& r) {
        Parts p = load_parts(r);
        const double beta = r.get_f64();
        return std::make_unique<Rwr>(std::move(p.info), std::move(p.policy), std::move(p.lr),
                                     p.n_episodes_per_fit, beta, 0);
    }

private:
    Vec fit_weighted_ml(const Dataset& episodes) const {
        const auto ranges = episodes.episode_ranges(/*complete_only=*/true);
        if (ranges.empty()) throw DomainError("batch holds no complete episode");
        std::vector<double> returns;
        for (auto [b, e] : ranges) {
            double g = 1.0, ret = 0.0;
            for (std::size_t i = b; i < e; ++i) {
                ret += g * episodes[i].reward;
                g *= info_.gamma;
            }
            returns.push_back(ret);
        }
        const double max_ret = *std::max_element(returns.begin(), returns.end());

        std::size_t n_steps = 0;
        for (auto [b, e] : ranges) n_steps += e - b;
        const Eigen::Index d = policy_->features().output_dim();
        const int m = policy_->action_dim();
        Mat phi(n_steps, d);
        Mat acts(n_steps, m);
        Eigen::Index row = 0;
        for (std::size_t k = 0; k < ranges.size(); ++k) {
            // max-shift inside the exponential for overflow safety
            const double w = std::sqrt(std::exp(beta_ * (returns[k] - max_ret)));
            for (std::size_t i = ranges[k].first; i < ranges[k].second; ++i, ++row) {
                phi.row(row) = w * policy_->features().apply(episodes[i].state).transpose();
                acts.row(row) = w * episodes[i].action.vec().transpose();
            }
        }
        Mat theta(d, m);
        const auto cod = phi.completeOrthogonalDecomposition();
        for (int j = 0; j < m; ++j) theta.col(j) = cod.solve(acts.col(j));
        return Eigen::Map<const Vec>(theta.data(), theta.size());
    }

    double beta_;
};

} // namespace rlcore
