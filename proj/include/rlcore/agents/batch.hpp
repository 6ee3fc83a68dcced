#pragma once

#include <memory>
#include <vector>

#include "rlcore/agent.hpp"
#include "rlcore/features.hpp"
#include "rlcore/policy.hpp"
#include "rlcore/regressor.hpp"

namespace rlcore {

/// Fitted Q-iteration. Each fit() call runs n_iterations sweeps of
///   y_i = r_i + gamma max_b Q(s'_i, b)   (0 bootstrap when absorbing)
///   Q  <- regress((s_i, a_i) -> y_i)
/// over the whole dataset. Acting is greedy with uniform tie-breaking, so an
/// untrained agent (all-zero Q) explores uniformly at random.
class Fqi final : public Agent {
public:
    Fqi(MdpInfo info, std::shared_ptr<QRegressor> q, int n_iterations,
        std::uint64_t master_seed)
        : Agent(std::move(info)), q_(std::move(q)), n_iterations_(n_iterations) {
        if (n_iterations_ < 1) throw DomainError("need n_iterations >= 1");
        if (q_->n_members() != 1) throw DomainError("FQI uses a single-member Q");
        reseed(master_seed);
    }

    std::string_view algorithm_name() const override { return "fqi"; }

    Action draw_action(const State& s) override {
        return Action::index(detail::greedy_action(q_->predict(s), policy_rng_));
    }

    void fit(const Dataset& d) override {
        if (d.empty()) throw DomainError("FQI needs a nonempty dataset");
        std::vector<State> states;
        std::vector<int> actions;
        states.reserve(d.size());
        actions.reserve(d.size());
        for (const auto& t : d) {
            states.push_back(t.state);
            actions.push_back(static_cast<int>(t.action.idx()));
        }
        Vec targets(static_cast<Eigen::Index>(d.size()));
        for (int k = 0; k < n_iterations_; ++k) {
            for (std::size_t i = 0; i < d.size(); ++i) {
                const Transition& t = d[i];
                double y = t.reward;
                if (!t.absorbing) y += info_.gamma * q_->predict(t.next_state).maxCoeff();
                targets[static_cast<Eigen::Index>(i)] = y;
            }
            q_->fit(0, states, actions, targets);
        }
    }

    const QFunction* q_function() const override { return q_.get(); }
    const QRegressor& q() const { return *q_; }

    void reseed(std::uint64_t master_seed) override {
        policy_rng_.seed(split_seed(master_seed, "policy"));
    }

    std::string snapshot() const override {
        BinaryWriter w = snapshot_writer("agent");
        w.put_str(algorithm_name());
        info_.save(w);
        q_->save(w);
        w.put_i64(n_iterations_);
        return w.take();
    }

    static std::unique_ptr<Fqi> load_payload(BinaryReader& r) {
        MdpInfo info = MdpInfo::load(r);
        std::shared_ptr<QRegressor> q = QRegressor::load(r);
        const int n_iterations = static_cast<int>(r.get_i64());
        return std::make_unique<Fqi>(std::move(info), std::move(q), n_iterations, 0);
    }

private:
    std::shared_ptr<QRegressor> q_;
    int n_iterations_;
    Rng policy_rng_;
};

/// Least-squares policy iteration over per-action blocks of a state feature
/// map. Each policy-iteration step solves the LSTD-Q system
///   A = sum_i x_i (x_i - gamma x'_i)^T,  b = sum_i x_i r_i
/// with x = psi(s,a), x' = psi(s', greedy(s')) (dropped when absorbing), via
/// the minimum-norm pseudo-inverse, until the weight change falls below the
/// tolerance. Greedy ties break uniformly at random, so the w = 0 cold start
/// acts as a uniformly random policy.
class Lspi final : public Agent, public QFunction {
public:
    Lspi(MdpInfo info, std::unique_ptr<FeatureMap> features, double tolerance,
         int max_iterations, std::uint64_t master_seed)
        : Agent(std::move(info)),
          phi_(std::move(features)),
          tolerance_(tolerance),
          max_iterations_(max_iterations) {
        if (tolerance_ <= 0.0) throw DomainError("tolerance must be positive");
        if (max_iterations_ < 1) throw DomainError("need max_iterations >= 1");
        n_actions_ = static_cast<int>(info_.n_actions());
        d_ = phi_->output_dim();
        w_ = Vec::Zero(static_cast<Eigen::Index>(d_) * n_actions_);
        reseed(master_seed);
    }

    std::string_view algorithm_name() const override { return "lspi"; }

    Vec q_values(const State& s) const override {
        const Vec f = phi_->apply(s);
        Vec q(n_actions_);
        for (int a = 0; a < n_actions_; ++a) q[a] = w_.segment(a * d_, d_).dot(f);
        return q;
    }

    Action draw_action(const State& s) override {
        return Action::index(detail::greedy_action(q_values(s), policy_rng_));
    }

    void fit(const Dataset& d) override {
        if (d.empty()) throw DomainError("LSPI needs a nonempty dataset");
        const auto n = d.size();
        const Eigen::Index dim = w_.size();
        std::vector<Vec> feats(n), feats_next(n);
        for (std::size_t i = 0; i < n; ++i) {
            feats[i] = phi_->apply(d[i].state);
            if (!d[i].absorbing) feats_next[i] = phi_->apply(d[i].next_state);
        }

        last_iterations_ = 0;
        converged_ = false;
        for (int it = 0; it < max_iterations_; ++it) {
            Mat A = Mat::Zero(dim, dim);
            Vec b = Vec::Zero(dim);
            Vec x = Vec::Zero(dim);
            Vec xn = Vec::Zero(dim);
            for (std::size_t i = 0; i < n; ++i) {
                const auto a = static_cast<int>(d[i].action.idx());
                x.setZero();
                x.segment(a * d_, d_) = feats[i];
                if (d[i].absorbing) {
                    A += x * x.transpose();
                } else {
                    const int an = greedy(feats_next[i]);
                    xn.setZero();
                    xn.segment(an * d_, d_) = feats_next[i];
                    A += x * (x - info_.gamma * xn).transpose();
                }
                b += x * d[i].reward;
            }
            Vec w_new = A.completeOrthogonalDecomposition().solve(b);
            const double change = (w_new - w_).lpNorm<Eigen::Infinity>();
            w_ = std::move(w_new);
            ++last_iterations_;
            if (change < tolerance_) {
                converged_ = true;
                break;
            }
        }
    }

    const QFunction* q_function() const override { return this; }
    const Vec& weights() const { return w_; }
    int last_iterations() const { return last_iterations_; }
    bool converged() const { return converged_; }

    void reseed(std::uint64_t master_seed) override {
        policy_rng_.seed(split_seed(master_seed, "policy"));
    }

    std::string snapshot() const override {
        BinaryWriter w = snapshot_writer("agent");
        w.put_str(algorithm_name());
        info_.save(w);
        phi_->save(w);
        w.put_f64(tolerance_);
        w.put_i64(max_iterations_);
        w.put_vec(w_);
        return w.take();
    }

    static std::unique_ptr<Lspi> load_payload(BinaryReader& r) {
        MdpInfo info = MdpInfo::load(r);
        auto phi = FeatureMap::load(r);
        const double tol = r.get_f64();
        const int max_it = static_cast<int>(r.get_i64());
        Vec w = r.get_vec();
        auto a = std::make_unique<Lspi>(std::move(info), std::move(phi), tol, max_it, 0);
        if (w.size() != a->w_.size()) throw DecodeError("weight size mismatch");
        a->w_ = std::move(w);
        return a;
    }

private:
    int greedy(const Vec& f) {
        Vec q(n_actions_);
        for (int a = 0; a < n_actions_; ++a) q[a] = w_.segment(a * d_, d_).dot(f);
        return detail::greedy_action(q, policy_rng_);
    }

    std::unique_ptr<FeatureMap> phi_;
    double tolerance_;
    int max_iterations_;
    int n_actions_ = 0;
    int d_ = 0;
    Vec w_;
    Rng policy_rng_;
    int last_iterations_ = 0;
    bool converged_ = false;
};

} // namespace rlcore
