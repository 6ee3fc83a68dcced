#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <utility>

#include <Eigen/Eigenvalues>

#include "rlcore/agent.hpp"
#include "rlcore/policy.hpp"
#include "rlcore/regressor.hpp"
#include "rlcore/schedule.hpp"

namespace rlcore {

namespace detail {

/// Gauss-Hermite nodes/weights for integrals against exp(-x^2), computed from
/// the Jacobi matrix (Golub-Welsch).
inline std::pair<Vec, Vec> gauss_hermite(int n) {
    Mat j = Mat::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double off = std::sqrt(k / 2.0);
        j(k, k - 1) = off;
        j(k - 1, k) = off;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(j);
    Vec nodes = es.eigenvalues();
    Vec weights(n);
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    for (int k = 0; k < n; ++k) {
        const double v0 = es.eigenvectors()(0, k);
        weights[k] = sqrt_pi * v0 * v0;
    }
    return {std::move(nodes), std::move(weights)};
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

} // namespace detail

/// Shared machinery of the tabular TD methods: a (possibly two-member)
/// tabular Q ensemble, a behavior policy over its mean, and a per-(s,a)
/// step-size schedule.
class TabularTdAgent : public Agent {
public:
    Action draw_action(const State& s) override {
        if (pending_action_) {
            Action a = *std::exchange(pending_action_, std::nullopt);
            return a;
        }
        return policy_->draw(s, policy_rng_);
    }

    void fit(const Dataset& d) override {
        for (std::size_t i = 0; i < d.size(); ++i) {
            const Transition& t = d[i];
            const Action* next_from_stream =
                (!t.last && i + 1 < d.size()) ? &d[i + 1].action : nullptr;
            fit_transition(t, next_from_stream);
        }
    }

    void episode_start() override { pending_action_.reset(); }

    void set_evaluation(bool on) override { policy_->set_evaluation(on); }

    const QFunction* q_function() const override { return q_.get(); }
    const QRegressor& q() const { return *q_; }

    void reseed(std::uint64_t master_seed) override {
        policy_rng_.seed(split_seed(master_seed, "policy"));
        agent_rng_.seed(split_seed(master_seed, "agent"));
    }

    std::string snapshot() const override {
        BinaryWriter w = snapshot_writer("agent");
        w.put_str(algorithm_name());
        info_.save(w);
        q_->save(w);
        save_discrete_policy(w, *policy_);
        alpha_->save(w);
        save_extras(w);
        return w.take();
    }

protected:
    TabularTdAgent(MdpInfo info, std::shared_ptr<QRegressor> q, std::shared_ptr<Policy> policy,
                   std::unique_ptr<Schedule> alpha, std::uint64_t master_seed,
                   int expected_members = 1)
        : Agent(std::move(info)),
          q_(std::move(q)),
          policy_(std::move(policy)),
          alpha_(std::move(alpha)) {
        if (q_->n_members() != expected_members)
            throw DomainError("this algorithm needs a " + std::to_string(expected_members) +
                              "-member Q ensemble");
        for (int k = 0; k < q_->n_members(); ++k)
            if (!dynamic_cast<TabularRegressor*>(&q_->member(k)))
                throw DomainError("this algorithm needs a tabular Q regressor");
        reseed(master_seed);
    }

    virtual void fit_transition(const Transition& t, const Action* next_from_stream) = 0;
    virtual void save_extras(BinaryWriter&) const {}

    Mat& table(int k = 0) { return static_cast<TabularRegressor&>(q_->member(k)).table(); }
    const Mat& table(int k = 0) const {
        return static_cast<const TabularRegressor&>(q_->member(k)).table();
    }

    std::size_t cell(const Transition& t) const {
        return static_cast<std::size_t>(t.state.idx()) * info_.n_actions() +
               static_cast<std::size_t>(t.action.idx());
    }

    /// Common payload of every tabular TD snapshot.
    struct Parts {
        MdpInfo info;
        std::shared_ptr<QRegressor> q;
        std::shared_ptr<Policy> policy;
        std::unique_ptr<Schedule> alpha;
    };

    static Parts load_parts(BinaryReader& r) {
        MdpInfo info = MdpInfo::load(r);
        std::shared_ptr<QRegressor> q = QRegressor::load(r);
        std::shared_ptr<Policy> policy = load_discrete_policy(r, q);
        std::unique_ptr<Schedule> alpha = Schedule::load(r);
        return {std::move(info), std::move(q), std::move(policy), std::move(alpha)};
    }

    std::shared_ptr<QRegressor> q_;
    std::shared_ptr<Policy> policy_;
    std::unique_ptr<Schedule> alpha_;
    Rng policy_rng_;
    Rng agent_rng_;
    std::optional<Action> pending_action_;
};

/// Off-policy one-step Q-Learning:
///   Q(s,a) += alpha (r + gamma max_b Q(s',b) - Q(s,a)).
class QLearning final : public TabularTdAgent {
public:
    QLearning(MdpInfo info, std::shared_ptr<QRegressor> q, std::shared_ptr<Policy> policy,
              std::unique_ptr<Schedule> alpha, std::uint64_t master_seed)
        : TabularTdAgent(std::move(info), std::move(q), std::move(policy), std::move(alpha),
                         master_seed) {}

    std::string_view algorithm_name() const override { return "q"; }

    static std::unique_ptr<QLearning> load_payload(BinaryReader& r) {
        Parts p = load_parts(r);
        return std::make_unique<QLearning>(std::move(p.info), std::move(p.q),
                                           std::move(p.policy), std::move(p.alpha), 0);
    }

protected:
    void fit_transition(const Transition& t, const Action*) override {
        Mat& q = table();
        const auto s = t.state.idx();
        const auto a = t.action.idx();
        const double boot = t.absorbing ? 0.0 : q.row(t.next_state.idx()).maxCoeff();
        const double delta = t.reward + info_.gamma * boot - q(s, a);
        const double alpha = alpha_->next(cell(t));
        q(s, a) += alpha * delta;
    }
};

/// Double Q-Learning: a fair coin picks one of two tables; the picked table
/// moves toward r + gamma Q_other(s', argmax_b Q_picked(s',b)). The behavior
/// policy acts on the mean of the tables (the ensemble view).
class DoubleQLearning final : public TabularTdAgent {
public:
    DoubleQLearning(MdpInfo info, std::shared_ptr<QRegressor> q, std::shared_ptr<Policy> policy,
                    std::unique_ptr<Schedule> alpha, std::uint64_t master_seed)
        : TabularTdAgent(std::move(info), std::move(q), std::move(policy), std::move(alpha),
                         master_seed, 2) {}

    std::string_view algorithm_name() const override { return "double_q"; }

    const std::array<std::uint64_t, 2>& update_counts() const { return updates_; }

    static std::unique_ptr<DoubleQLearning> load_payload(BinaryReader& r) {
        Parts p = load_parts(r);
        auto a = std::make_unique<DoubleQLearning>(std::move(p.info), std::move(p.q),
                                                   std::move(p.policy), std::move(p.alpha), 0);
        a->updates_[0] = r.get_u64();
        a->updates_[1] = r.get_u64();
        return a;
    }

protected:
    void fit_transition(const Transition& t, const Action*) override {
        const int pick = static_cast<int>(agent_rng_.uniform_int(2));
        const int other = 1 - pick;
        Mat& qp = table(pick);
        const Mat& qo = table(other);
        const auto s = t.state.idx();
        const auto a = t.action.idx();
        double boot = 0.0;
        if (!t.absorbing) {
            const Vec next = qp.row(t.next_state.idx()).transpose();
            const int best = detail::greedy_action(next, agent_rng_);
            boot = qo(t.next_state.idx(), best);
        }
        const double target = t.reward + info_.gamma * boot;
        const double alpha = alpha_->next(cell(t));
        qp(s, a) += alpha * (target - qp(s, a));
        ++updates_[pick];
    }

    void save_extras(BinaryWriter& w) const override {
        w.put_u64(updates_[0]);
        w.put_u64(updates_[1]);
    }

private:
    std::array<std::uint64_t, 2> updates_ = {0, 0};
};

/// Weighted Q-Learning: the bootstrap is sum_b w_b Q(s',b) where w_b is the
/// probability that action b is the maximizer under independent Gaussians
/// N(mean(s',b), var(s',b)/n(s',b)) built from running statistics of the
/// observed targets. Actions visited fewer than twice use a prior variance.
class WeightedQLearning final : public TabularTdAgent {
public:
    WeightedQLearning(MdpInfo info, std::shared_ptr<QRegressor> q, std::shared_ptr<Policy> policy,
                      std::unique_ptr<Schedule> alpha, std::uint64_t master_seed,
                      double prior_variance = 1e4, int quadrature_points = 11)
        : TabularTdAgent(std::move(info), std::move(q), std::move(policy), std::move(alpha),
                         master_seed),
          prior_variance_(prior_variance),
          quadrature_points_(quadrature_points),
          mean_(Mat::Zero(table().rows(), table().cols())),
          m2_(Mat::Zero(table().rows(), table().cols())),
          count_(Mat::Zero(table().rows(), table().cols())) {
        if (prior_variance_ <= 0.0) throw DomainError("prior variance must be positive");
        if (quadrature_points_ < 2) throw DomainError("need >= 2 quadrature points");
    }

    std::string_view algorithm_name() const override { return "weighted_q"; }

    /// P(b = argmax) for independent Gaussians, via Gauss-Hermite quadrature
    /// of each density against the product of the other actions' CDFs. The
    /// result is normalized to sum exactly to 1.
    static Vec maximum_weights(const Vec& means, const Vec& variances, int points = 11) {
        const auto [nodes, weights] = detail::gauss_hermite(points);
        const auto n = means.size();
        Vec out(n);
        for (Eigen::Index b = 0; b < n; ++b) {
            const double sb = std::sqrt(std::max(variances[b], 1e-12));
            double acc = 0.0;
            for (Eigen::Index i = 0; i < nodes.size(); ++i) {
                const double x = means[b] + std::numbers::sqrt2 * sb * nodes[i];
                double prod = 1.0;
                for (Eigen::Index c = 0; c < n; ++c) {
                    if (c == b) continue;
                    const double sc = std::sqrt(std::max(variances[c], 1e-12));
                    prod *= detail::normal_cdf((x - means[c]) / sc);
                }
                acc += weights[i] * prod;
            }
            out[b] = acc / std::sqrt(std::numbers::pi);
        }
        return out / out.sum();
    }

    static std::unique_ptr<WeightedQLearning> load_payload(BinaryReader& r) {
        Parts p = load_parts(r);
        const double prior = r.get_f64();
        const int points = static_cast<int>(r.get_i64());
        auto a = std::make_unique<WeightedQLearning>(std::move(p.info), std::move(p.q),
                                                     std::move(p.policy), std::move(p.alpha), 0,
                                                     prior, points);
        a->mean_ = r.get_mat();
        a->m2_ = r.get_mat();
        a->count_ = r.get_mat();
        return a;
    }

protected:
    void fit_transition(const Transition& t, const Action*) override {
        Mat& q = table();
        const auto s = t.state.idx();
        const auto a = t.action.idx();
        double target = t.reward;
        if (!t.absorbing) {
            const auto sn = t.next_state.idx();
            const auto n_actions = q.cols();
            Vec means(n_actions), variances(n_actions);
            for (Eigen::Index b = 0; b < n_actions; ++b) {
                means[b] = mean_(sn, b);
                if (count_(sn, b) < 2.0) {
                    variances[b] = prior_variance_;
                } else {
                    const double sample_var = m2_(sn, b) / (count_(sn, b) - 1.0);
                    variances[b] = sample_var / count_(sn, b);
                }
            }
            const Vec w = maximum_weights(means, variances, quadrature_points_);
            target += info_.gamma * w.dot(q.row(sn).transpose());
        }
        const double alpha = alpha_->next(cell(t));
        q(s, a) += alpha * (target - q(s, a));

        // Welford running statistics of the targets seen at (s,a)
        count_(s, a) += 1.0;
        const double d1 = target - mean_(s, a);
        mean_(s, a) += d1 / count_(s, a);
        m2_(s, a) += d1 * (target - mean_(s, a));
    }

    void save_extras(BinaryWriter& w) const override {
        w.put_f64(prior_variance_);
        w.put_i64(quadrature_points_);
        w.put_mat(mean_);
        w.put_mat(m2_);
        w.put_mat(count_);
    }

private:
    double prior_variance_;
    int quadrature_points_;
    Mat mean_, m2_, count_;
};

/// Speedy Q-Learning: keeps the previous-iterate table and applies
///   Q_{k+1}(s,a) = Q_k + alpha (T Q_{k-1} - Q_k) + (1 - alpha)(T Q_k - T Q_{k-1})
/// with the empirical Bellman application T Q = r + gamma max_b Q(s',b). The
/// previous iterate is synchronized to the pre-update table once per step.
class SpeedyQLearning final : public TabularTdAgent {
public:
    SpeedyQLearning(MdpInfo info, std::shared_ptr<QRegressor> q, std::shared_ptr<Policy> policy,
                    std::unique_ptr<Schedule> alpha, std::uint64_t master_seed)
        : TabularTdAgent(std::move(info), std::move(q), std::move(policy), std::move(alpha),
                         master_seed),
          prev_(table()) {}

    std::string_view algorithm_name() const override { return "speedy_q"; }

    static std::unique_ptr<SpeedyQLearning> load_payload(BinaryReader& r) {
        Parts p = load_parts(r);
        auto a = std::make_unique<SpeedyQLearning>(std::move(p.info), std::move(p.q),
                                                   std::move(p.policy), std::move(p.alpha), 0);
        a->prev_ = r.get_mat();
        return a;
    }

protected:
    void fit_transition(const Transition& t, const Action*) override {
        Mat& q = table();
        const auto s = t.state.idx();
        const auto a = t.action.idx();
        const double q_sa = q(s, a);
        double tq_prev = t.reward;
        double tq_cur = t.reward;
        if (!t.absorbing) {
            tq_prev += info_.gamma * prev_.row(t.next_state.idx()).maxCoeff();
            tq_cur += info_.gamma * q.row(t.next_state.idx()).maxCoeff();
        }
        const double alpha = alpha_->next(cell(t));
        prev_ = q;
        q(s, a) = q_sa + alpha * (tq_prev - q_sa) + (1.0 - alpha) * (tq_cur - tq_prev);
    }

    void save_extras(BinaryWriter& w) const override { w.put_mat(prev_); }

private:
    Mat prev_;
};

/// R-Learning (average-reward criterion, gamma unused):
///   Q(s,a) += alpha (r - rho + max_b Q(s',b) - Q(s,a))
/// and, when a was greedy under the pre-update table,
///   rho += beta (r + max_b Q(s',b) - max_b Q(s,b) - rho).
class RLearning final : public TabularTdAgent {
public:
    RLearning(MdpInfo info, std::shared_ptr<QRegressor> q, std::shared_ptr<Policy> policy,
              std::unique_ptr<Schedule> alpha, std::unique_ptr<Schedule> beta,
              std::uint64_t master_seed)
        : TabularTdAgent(std::move(info), std::move(q), std::move(policy), std::move(alpha),
                         master_seed),
          beta_(std::move(beta)) {}

    std::string_view algorithm_name() const override { return "r"; }

    double average_reward() const { return rho_; }

    static std::unique_ptr<RLearning> load_payload(BinaryReader& r) {
        Parts p = load_parts(r);
        auto beta = Schedule::load(r);
        const double rho = r.get_f64();
        auto a = std::make_unique<RLearning>(std::move(p.info), std::move(p.q),
                                             std::move(p.policy), std::move(p.alpha),
                                             std::move(beta), 0);
        a->rho_ = rho;
        return a;
    }

protected:
    void fit_transition(const Transition& t, const Action*) override {
        Mat& q = table();
        const auto s = t.state.idx();
        const auto a = t.action.idx();
        const double max_here = q.row(s).maxCoeff();
        const bool was_greedy = q(s, a) == max_here;
        const double max_next = t.absorbing ? 0.0 : q.row(t.next_state.idx()).maxCoeff();

        const double alpha = alpha_->next(cell(t));
        q(s, a) += alpha * (t.reward - rho_ + max_next - q(s, a));
        if (was_greedy) {
            const double beta = beta_->next();
            rho_ += beta * (t.reward + max_next - max_here - rho_);
        }
    }

    void save_extras(BinaryWriter& w) const override {
        beta_->save(w);
        w.put_f64(rho_);
    }

private:
    std::unique_ptr<Schedule> beta_;
    double rho_ = 0.0;
};

/// On-policy SARSA. The bootstrap action is drawn by the agent's own policy;
/// when fitting mid-stream the action actually taken at the next step is
/// used, and for the batch's final unfinished transition the freshly drawn
/// action is cached and returned by the next draw_action call.
class Sarsa final : public TabularTdAgent {
public:
    Sarsa(MdpInfo info, std::shared_ptr<QRegressor> q, std::shared_ptr<Policy> policy,
          std::unique_ptr<Schedule> alpha, std::uint64_t master_seed)
        : TabularTdAgent(std::move(info), std::move(q), std::move(policy), std::move(alpha),
                         master_seed) {}

    std::string_view algorithm_name() const override { return "sarsa"; }

    static std::unique_ptr<Sarsa> load_payload(BinaryReader& r) {
        Parts p = load_parts(r);
        return std::make_unique<Sarsa>(std::move(p.info), std::move(p.q), std::move(p.policy),
                                       std::move(p.alpha), 0);
    }

protected:
    void fit_transition(const Transition& t, const Action* next_from_stream) override {
        Mat& q = table();
        const auto s = t.state.idx();
        const auto a = t.action.idx();
        double boot = 0.0;
        if (!t.absorbing) {
            Action next_action = next_from_stream
                                     ? *next_from_stream
                                     : policy_->draw(t.next_state, policy_rng_);
            boot = q(t.next_state.idx(), next_action.idx());
            if (!next_from_stream && !t.last) pending_action_ = std::move(next_action);
        }
        const double qsa = q(s, a);
        const double delta = t.reward + info_.gamma * boot - qsa;
        const double alpha = alpha_->next(cell(t));
        q(s, a) += alpha * delta;
    }
};

/// Expected SARSA: bootstraps with the policy expectation
/// sum_b pi(b|s') Q(s',b).
class ExpectedSarsa final : public TabularTdAgent {
public:
    ExpectedSarsa(MdpInfo info, std::shared_ptr<QRegressor> q, std::shared_ptr<Policy> policy,
                  std::unique_ptr<Schedule> alpha, std::uint64_t master_seed)
        : TabularTdAgent(std::move(info), std::move(q), std::move(policy), std::move(alpha),
                         master_seed) {}

    std::string_view algorithm_name() const override { return "expected_sarsa"; }

    static std::unique_ptr<ExpectedSarsa> load_payload(BinaryReader& r) {
        Parts p = load_parts(r);
        return std::make_unique<ExpectedSarsa>(std::move(p.info), std::move(p.q),
                                               std::move(p.policy), std::move(p.alpha), 0);
    }

protected:
    void fit_transition(const Transition& t, const Action*) override {
        Mat& q = table();
        const auto s = t.state.idx();
        const auto a = t.action.idx();
        double boot = 0.0;
        if (!t.absorbing) {
            const Vec pi = policy_->probabilities(t.next_state);
            boot = pi.dot(q.row(t.next_state.idx()).transpose());
        }
        const double alpha = alpha_->next(cell(t));
        q(s, a) += alpha * (t.reward + info_.gamma * boot - q(s, a));
    }
};

} // namespace rlcore
