#pragma once

#include <memory>
#include <optional>
#include <utility>

#include "rlcore/agent.hpp"
#include "rlcore/features.hpp"
#include "rlcore/policy.hpp"
#include "rlcore/schedule.hpp"

namespace rlcore {

/// True online SARSA(lambda) with linear function approximation over
/// per-action blocks of a state feature map. Implements the dutch-trace
/// recursion; with x = psi(s,a), x' = psi(s',a'), Q = w.x, Q' = w.x':
///
///   delta = r + gamma Q' - Q
///   e     = gamma lambda e + (1 - alpha gamma lambda e.x) x
///   w    += alpha delta e + alpha (Q - q_old)(e - x)
///   q_old = Q'
///
/// The trace and q_old reset at episode_start. With lambda = 0 and one-hot
/// features the weight update reduces to the plain SARSA table update, term
/// by term.
class TrueOnlineSarsaLambda final : public Agent, public QFunction {
public:
    TrueOnlineSarsaLambda(MdpInfo info, std::unique_ptr<FeatureMap> features, double lambda,
                          std::unique_ptr<Schedule> alpha, std::unique_ptr<Schedule> epsilon,
                          std::uint64_t master_seed)
        : Agent(std::move(info)),
          phi_(std::move(features)),
          lambda_(lambda),
          alpha_(std::move(alpha)) {
        if (lambda_ < 0.0 || lambda_ > 1.0) throw DomainError("lambda must be in [0, 1]");
        n_actions_ = static_cast<int>(info_.n_actions());
        d_ = phi_->output_dim();
        w_ = Vec::Zero(static_cast<Eigen::Index>(d_) * n_actions_);
        trace_ = Vec::Zero(w_.size());
        policy_ = std::make_shared<EpsGreedyPolicy>(
            std::shared_ptr<const QFunction>(std::shared_ptr<void>(), this),
            std::move(epsilon));
        reseed(master_seed);
    }

    std::string_view algorithm_name() const override { return "true_online_sarsa_lambda"; }

    Vec q_values(const State& s) const override {
        const Vec f = phi_->apply(s);
        Vec q(n_actions_);
        for (int a = 0; a < n_actions_; ++a) q[a] = w_.segment(a * d_, d_).dot(f);
        return q;
    }

    Action draw_action(const State& s) override {
        if (pending_action_) return *std::exchange(pending_action_, std::nullopt);
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

    void episode_start() override {
        trace_.setZero();
        q_old_ = 0.0;
        pending_action_.reset();
    }

    void set_evaluation(bool on) override { policy_->set_evaluation(on); }

    const QFunction* q_function() const override { return this; }

    const Vec& weights() const { return w_; }
    const Vec& trace() const { return trace_; }

    void reseed(std::uint64_t master_seed) override {
        policy_rng_.seed(split_seed(master_seed, "policy"));
    }

    std::string snapshot() const override {
        BinaryWriter w = snapshot_writer("agent");
        w.put_str(algorithm_name());
        info_.save(w);
        phi_->save(w);
        w.put_f64(lambda_);
        alpha_->save(w);
        policy_->epsilon().save(w);
        w.put_vec(w_);
        return w.take();
    }

    static std::unique_ptr<TrueOnlineSarsaLambda> load_payload(BinaryReader& r) {
        MdpInfo info = MdpInfo::load(r);
        auto phi = FeatureMap::load(r);
        const double lambda = r.get_f64();
        auto alpha = Schedule::load(r);
        auto eps = Schedule::load(r);
        Vec w = r.get_vec();
        auto a = std::make_unique<TrueOnlineSarsaLambda>(std::move(info), std::move(phi), lambda,
                                                         std::move(alpha), std::move(eps), 0);
        if (w.size() != a->w_.size()) throw DecodeError("weight size mismatch");
        a->w_ = std::move(w);
        return a;
    }

private:
    void fit_transition(const Transition& t, const Action* next_from_stream) {
        const Vec f = phi_->apply(t.state);
        const auto a = static_cast<int>(t.action.idx());
        const Eigen::Index off = static_cast<Eigen::Index>(a) * d_;

        const double q_sa = w_.segment(off, d_).dot(f);
        double q_next = 0.0;
        Eigen::Index off_next = 0;
        Vec f_next;
        if (!t.absorbing) {
            Action next_action = next_from_stream
                                     ? *next_from_stream
                                     : policy_->draw(t.next_state, policy_rng_);
            f_next = phi_->apply(t.next_state);
            off_next = static_cast<Eigen::Index>(next_action.idx()) * d_;
            q_next = w_.segment(off_next, d_).dot(f_next);
            if (!next_from_stream && !t.last) pending_action_ = std::move(next_action);
        }

        const double delta = t.reward + info_.gamma * q_next - q_sa;
        const double alpha = alpha_->next();
        const double gl = info_.gamma * lambda_;

        const double e_dot_x = trace_.segment(off, d_).dot(f);
        trace_ *= gl;
        trace_.segment(off, d_) += (1.0 - alpha * gl * e_dot_x) * f;

        // two-term form so the second term vanishes exactly when e == x
        w_ += (alpha * delta) * trace_;
        Vec e_minus_x = trace_;
        e_minus_x.segment(off, d_) -= f;
        w_ += (alpha * (q_sa - q_old_)) * e_minus_x;

        q_old_ = q_next;
    }

    std::unique_ptr<FeatureMap> phi_;
    double lambda_;
    std::unique_ptr<Schedule> alpha_;
    std::shared_ptr<EpsGreedyPolicy> policy_;
    Rng policy_rng_;
    int n_actions_ = 0;
    int d_ = 0;
    Vec w_;
    Vec trace_;
    double q_old_ = 0.0;
    std::optional<Action> pending_action_;
};

} // namespace rlcore
