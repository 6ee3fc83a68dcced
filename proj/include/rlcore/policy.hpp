#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "rlcore/features.hpp"
#include "rlcore/q_regressor.hpp"
#include "rlcore/rng.hpp"
#include "rlcore/schedule.hpp"

namespace rlcore {

/// Action-selection rule. Policies hold references to value functions owned
/// by the agent and are single-threaded. In evaluation mode the policy acts
/// greedily / deterministically and schedules do not advance.
class Policy {
public:
    virtual ~Policy() = default;

    /// Samples an action using only the supplied rng.
    virtual Action draw(const State& s, Rng& rng) = 0;

    /// Exact action distribution; discrete policies only.
    virtual Vec probabilities(const State& s) const {
        throw UnsupportedError("probabilities() requires a discrete policy");
    }

    virtual void set_evaluation(bool on) { evaluation_ = on; }
    bool evaluation() const { return evaluation_; }

protected:
    bool evaluation_ = false;
};

namespace detail {

inline std::vector<int> argmax_set(const Vec& q) {
    std::vector<int> best;
    double m = q[0];
    for (Eigen::Index i = 0; i < q.size(); ++i) {
        if (q[i] > m) {
            m = q[i];
            best.clear();
        }
        if (q[i] == m) best.push_back(static_cast<int>(i));
    }
    return best;
}

/// Greedy action with exact ties broken uniformly at random.
inline int greedy_action(const Vec& q, Rng& rng) {
    const auto best = argmax_set(q);
    if (best.size() == 1) return best[0];
    return best[static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(best.size())))];
}

} // namespace detail

/// epsilon-greedy over a Q-function. The greedy action has probability
/// 1 - eps + eps/n, each other action eps/n; exact ties share the greedy
/// mass uniformly. The epsilon schedule advances once per training draw.
class EpsGreedyPolicy final : public Policy {
public:
    EpsGreedyPolicy(std::shared_ptr<const QFunction> q, std::unique_ptr<Schedule> epsilon)
        : q_(std::move(q)), eps_(std::move(epsilon)) {}

    Action draw(const State& s, Rng& rng) override {
        const Vec q = q_->q_values(s);
        if (!evaluation_) {
            const double eps = eps_->next();
            if (rng.uniform() < eps)
                return Action::index(rng.uniform_int(q.size()));
        }
        return Action::index(detail::greedy_action(q, rng));
    }

    Vec probabilities(const State& s) const override {
        const Vec q = q_->q_values(s);
        const double eps = evaluation_ ? 0.0 : eps_->peek();
        const auto n = q.size();
        Vec p = Vec::Constant(n, eps / static_cast<double>(n));
        const auto best = detail::argmax_set(q);
        for (int b : best) p[b] += (1.0 - eps) / static_cast<double>(best.size());
        return p;
    }

    Schedule& epsilon() { return *eps_; }
    const Schedule& epsilon() const { return *eps_; }

private:
    std::shared_ptr<const QFunction> q_;
    std::unique_ptr<Schedule> eps_;
};

/// Softmax policy p(a) proportional to exp(beta * Q(s,a)), computed with
/// max-subtraction. Evaluation mode acts greedily.
class BoltzmannPolicy final : public Policy {
public:
    BoltzmannPolicy(std::shared_ptr<const QFunction> q, std::unique_ptr<Schedule> beta)
        : q_(std::move(q)), beta_(std::move(beta)) {}

    Action draw(const State& s, Rng& rng) override {
        if (evaluation_) return Action::index(detail::greedy_action(q_->q_values(s), rng));
        const Vec p = probs(q_->q_values(s), beta_->next());
        double u = rng.uniform();
        for (Eigen::Index i = 0; i < p.size(); ++i) {
            u -= p[i];
            if (u < 0.0) return Action::index(i);
        }
        return Action::index(p.size() - 1);
    }

    Vec probabilities(const State& s) const override {
        const Vec q = q_->q_values(s);
        if (evaluation_) {
            const auto best = detail::argmax_set(q);
            Vec p = Vec::Zero(q.size());
            for (int b : best) p[b] = 1.0 / static_cast<double>(best.size());
            return p;
        }
        return probs(q, beta_->peek());
    }

    Schedule& beta() { return *beta_; }
    const Schedule& beta() const { return *beta_; }

private:
    static Vec probs(const Vec& q, double beta) {
        Vec z = beta * q;
        const double m = z.maxCoeff();
        Vec e = (z.array() - m).exp().matrix();
        return e / e.sum();
    }

    std::shared_ptr<const QFunction> q_;
    std::unique_ptr<Schedule> beta_;
};

/// Serializes a discrete-action behavior policy (kind + schedule state); the
/// Q-function reference is rebound on load.
inline void save_discrete_policy(BinaryWriter& w, const Policy& p) {
    if (const auto* eg = dynamic_cast<const EpsGreedyPolicy*>(&p)) {
        w.put_u8(0);
        eg->epsilon().save(w);
        return;
    }
    if (const auto* bz = dynamic_cast<const BoltzmannPolicy*>(&p)) {
        w.put_u8(1);
        bz->beta().save(w);
        return;
    }
    throw UnsupportedError("cannot serialize this policy kind");
}

inline std::shared_ptr<Policy> load_discrete_policy(BinaryReader& r,
                                                    std::shared_ptr<const QFunction> q) {
    const std::uint8_t kind = r.get_u8();
    auto schedule = Schedule::load(r);
    if (kind == 0) return std::make_shared<EpsGreedyPolicy>(std::move(q), std::move(schedule));
    if (kind == 1) return std::make_shared<BoltzmannPolicy>(std::move(q), std::move(schedule));
    throw DecodeError("unknown policy kind");
}

/// Linear-Gaussian policy for continuous actions: a ~ N(theta^T phi(s),
/// diag(sigma^2)) with fixed per-dimension sigma. Evaluation mode returns the
/// mean action. Parameters flatten column-major (theta column j = action
/// dimension j).
class GaussianLinearPolicy final : public Policy {
public:
    GaussianLinearPolicy(std::unique_ptr<FeatureMap> phi, int action_dim, Vec sigma)
        : phi_(std::move(phi)),
          theta_(Mat::Zero(phi_->output_dim(), action_dim)),
          sigma_(std::move(sigma)) {
        if (action_dim < 1) throw DomainError("need action_dim >= 1");
        if (sigma_.size() != action_dim) throw DomainError("one sigma per action dimension");
        for (Eigen::Index i = 0; i < sigma_.size(); ++i)
            if (sigma_[i] <= 0.0) throw DomainError("sigma must be positive");
    }

    Action draw(const State& s, Rng& rng) override {
        Vec a = mean(s);
        if (!evaluation_)
            for (Eigen::Index j = 0; j < a.size(); ++j) a[j] += sigma_[j] * rng.normal();
        return Action::vector(std::move(a));
    }

    Vec mean(const State& s) const { return theta_.transpose() * phi_->apply(s); }

    /// Score function grad_theta log pi(a|s) = phi(s) ((a - mean)/sigma^2)^T,
    /// flattened in parameter order.
    Vec diff_log(const State& s, const Action& a) const {
        const Vec f = phi_->apply(s);
        const Vec d = (a.vec() - theta_.transpose() * f).cwiseQuotient(
            sigma_.cwiseProduct(sigma_));
        Mat g = f * d.transpose();
        return Eigen::Map<const Vec>(g.data(), g.size());
    }

    double log_density(const State& s, const Action& a) const {
        const Vec m = mean(s);
        const Vec& av = a.vec();
        double lp = 0.0;
        for (Eigen::Index j = 0; j < av.size(); ++j) {
            const double z = (av[j] - m[j]) / sigma_[j];
            lp += -0.5 * z * z - std::log(sigma_[j]) - 0.5 * std::log(2.0 * std::numbers::pi);
        }
        return lp;
    }

    int param_count() const { return static_cast<int>(theta_.size()); }
    int action_dim() const { return static_cast<int>(theta_.cols()); }

    Vec get_params() const { return Eigen::Map<const Vec>(theta_.data(), theta_.size()); }
    void set_params(const Vec& p) {
        if (p.size() != theta_.size()) throw DomainError("parameter size mismatch");
        Eigen::Map<Vec>(theta_.data(), theta_.size()) = p;
    }

    const Mat& theta() const { return theta_; }
    const Vec& sigma() const { return sigma_; }
    const FeatureMap& features() const { return *phi_; }

    void save(BinaryWriter& w) const {
        phi_->save(w);
        w.put_mat(theta_);
        w.put_vec(sigma_);
    }

    static std::unique_ptr<GaussianLinearPolicy> load(BinaryReader& r) {
        auto phi = FeatureMap::load(r);
        Mat theta = r.get_mat();
        Vec sigma = r.get_vec();
        auto p = std::make_unique<GaussianLinearPolicy>(std::move(phi),
                                                        static_cast<int>(theta.cols()),
                                                        std::move(sigma));
        p->theta_ = std::move(theta);
        return p;
    }

private:
    std::unique_ptr<FeatureMap> phi_;
    Mat theta_; // features x action_dim
    Vec sigma_;
};

} // namespace rlcore
