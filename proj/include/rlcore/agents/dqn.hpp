#pragma once

#include <memory>
#include <vector>

#include "rlcore/agent.hpp"
#include "rlcore/mlp.hpp"
#include "rlcore/policy.hpp"
#include "rlcore/schedule.hpp"

namespace rlcore {

/// Fixed-capacity ring of transitions with strictly FIFO eviction and
/// uniform-with-replacement sampling.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity_ < 1) throw DomainError("replay capacity must be >= 1");
        buf_.reserve(capacity_);
    }

    void push(Transition t) {
        if (buf_.size() < capacity_) {
            buf_.push_back(std::move(t));
        } else {
            buf_[next_] = std::move(t);
        }
        next_ = (next_ + 1) % capacity_;
    }

    std::size_t size() const { return buf_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return buf_.empty(); }

    /// Oldest-first access, for inspection in tests.
    const Transition& at(std::size_t i) const { return buf_.at(i); }

    std::vector<Transition> sample(std::size_t n, Rng& rng) const {
        if (buf_.empty()) throw StateError("sample from an empty replay buffer");
        std::vector<Transition> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(buf_[static_cast<std::size_t>(
                rng.uniform_int(static_cast<std::int64_t>(buf_.size())))]);
        return out;
    }

private:
    std::size_t capacity_;
    std::vector<Transition> buf_;
    std::size_t next_ = 0;
};

enum class DqnVariant { Dqn, DoubleDqn, AveragedDqn };

/// Replay-based deep value learning (desk scale). One gradient step on the
/// squared TD error per environment step once the buffer holds
/// initial_replay_size transitions; target networks change only by whole-
/// parameter copy every target_update_period fits. The Averaged variant
/// keeps a ring of the last K target copies and bootstraps from their mean.
class DqnAgent final : public Agent {
public:
    struct Config {
        DqnVariant variant = DqnVariant::Dqn;
        std::size_t buffer_capacity = 50000;
        std::size_t batch_size = 32;
        std::size_t initial_replay_size = 500;
        std::int64_t target_update_period = 200;
        int n_target_copies = 1; // K, > 1 only for the Averaged variant
        MlpRegressor::Config net;
    };

    DqnAgent(MdpInfo info, Config cfg, std::unique_ptr<Schedule> epsilon,
             std::uint64_t master_seed)
        : Agent(std::move(info)), cfg_(cfg), buffer_(cfg.buffer_capacity) {
        if (cfg_.batch_size < 1) throw DomainError("batch size must be >= 1");
        if (cfg_.target_update_period < 1) throw DomainError("target update period must be >= 1");
        if (cfg_.n_target_copies < 1) throw DomainError("need K >= 1 target copies");
        if (cfg_.variant != DqnVariant::AveragedDqn && cfg_.n_target_copies != 1)
            throw DomainError("only the Averaged variant keeps K > 1 targets");
        if (!info_.action_space.is_discrete())
            throw DomainError("DQN needs a discrete action space");

        reseed(master_seed);
        const int in_dim = info_.observation_space.dim();
        const int n_actions = static_cast<int>(info_.n_actions());
        online_ = std::make_shared<QRegressor>(
            std::make_unique<MlpRegressor>(in_dim, n_actions, cfg_.net, agent_rng_));
        for (int k = 0; k < cfg_.n_target_copies; ++k)
            targets_.push_back(std::unique_ptr<MlpRegressor>(
                static_cast<MlpRegressor*>(online_net().clone().release())));
        policy_ = std::make_shared<EpsGreedyPolicy>(online_, std::move(epsilon));
    }

    std::string_view algorithm_name() const override {
        switch (cfg_.variant) {
            case DqnVariant::Dqn: return "dqn";
            case DqnVariant::DoubleDqn: return "ddqn";
            default: return "averaged_dqn";
        }
    }

    Action draw_action(const State& s) override { return policy_->draw(s, policy_rng_); }

    void set_evaluation(bool on) override { policy_->set_evaluation(on); }

    const QFunction* q_function() const override { return online_.get(); }
    const QRegressor& online() const { return *online_; }
    const MlpRegressor& target_net(int k = 0) const { return *targets_.at(k); }
    const ReplayBuffer& buffer() const { return buffer_; }
    std::int64_t fit_count() const { return fit_count_; }

    /// Per-transition regression target of the configured variant
    /// (0 bootstrap when absorbing).
    Vec compute_target(const std::vector<Transition>& batch) const {
        Vec y(static_cast<Eigen::Index>(batch.size()));
        for (std::size_t i = 0; i < batch.size(); ++i) {
            const Transition& t = batch[i];
            double boot = 0.0;
            if (!t.absorbing) {
                switch (cfg_.variant) {
                    case DqnVariant::DoubleDqn: {
                        const Vec q_online = online_net().predict(t.next_state);
                        Eigen::Index best = 0;
                        q_online.maxCoeff(&best);
                        boot = targets_[0]->predict(t.next_state)[best];
                        break;
                    }
                    case DqnVariant::Dqn:
                    case DqnVariant::AveragedDqn: {
                        Vec q = targets_[0]->predict(t.next_state);
                        for (std::size_t k = 1; k < targets_.size(); ++k)
                            q += targets_[k]->predict(t.next_state);
                        q /= static_cast<double>(targets_.size());
                        boot = q.maxCoeff();
                        break;
                    }
                }
            }
            y[static_cast<Eigen::Index>(i)] = t.reward + info_.gamma * boot;
        }
        return y;
    }

    void fit(const Dataset& d) override {
        for (const auto& t : d) buffer_.push(t);
        if (buffer_.size() < cfg_.initial_replay_size) return;

        const auto batch = buffer_.sample(cfg_.batch_size, replay_rng_);
        const Vec y = compute_target(batch);
        std::vector<State> states;
        std::vector<int> actions;
        states.reserve(batch.size());
        actions.reserve(batch.size());
        for (const auto& t : batch) {
            states.push_back(t.state);
            actions.push_back(static_cast<int>(t.action.idx()));
        }
        online_->fit(0, states, actions, y);

        ++fit_count_;
        if (fit_count_ % cfg_.target_update_period == 0) {
            targets_[static_cast<std::size_t>(target_ring_)]->copy_params_from(online_net());
            target_ring_ = (target_ring_ + 1) % cfg_.n_target_copies;
        }
    }

    void reseed(std::uint64_t master_seed) override {
        policy_rng_.seed(split_seed(master_seed, "policy"));
        agent_rng_.seed(split_seed(master_seed, "agent"));
        replay_rng_.seed(split_seed(master_seed, "replay"));
    }

    /// Snapshot carries the networks and counters, not the replay contents:
    /// it restores evaluation behavior exactly, not a mid-run buffer.
    std::string snapshot() const override {
        BinaryWriter w = snapshot_writer("agent");
        w.put_str(algorithm_name());
        info_.save(w);
        w.put_u8(static_cast<std::uint8_t>(cfg_.variant));
        w.put_u64(cfg_.buffer_capacity);
        w.put_u64(cfg_.batch_size);
        w.put_u64(cfg_.initial_replay_size);
        w.put_i64(cfg_.target_update_period);
        w.put_i64(cfg_.n_target_copies);
        w.put_i64(fit_count_);
        w.put_i64(target_ring_);
        save_discrete_policy(w, *policy_);
        online_net().save(w);
        for (const auto& t : targets_) t->save(w);
        return w.take();
    }

    static std::unique_ptr<DqnAgent> load_payload(BinaryReader& r) {
        MdpInfo info = MdpInfo::load(r);
        Config cfg;
        cfg.variant = static_cast<DqnVariant>(r.get_u8());
        cfg.buffer_capacity = r.get_u64();
        cfg.batch_size = r.get_u64();
        cfg.initial_replay_size = r.get_u64();
        cfg.target_update_period = r.get_i64();
        cfg.n_target_copies = static_cast<int>(r.get_i64());
        const std::int64_t fit_count = r.get_i64();
        const std::int64_t ring = r.get_i64();
        const std::uint8_t policy_kind = r.get_u8();
        auto eps = Schedule::load(r);
        if (policy_kind != 0) throw DecodeError("DQN snapshots use an eps-greedy policy");

        auto online = load_net(r);
        cfg.net = online->config();
        auto agent = std::make_unique<DqnAgent>(std::move(info), cfg, eps->clone(), 0);
        // replace the freshly initialized nets wholesale so optimizer state
        // restores along with the weights
        agent->online_ = std::make_shared<QRegressor>(std::move(online));
        agent->targets_.clear();
        for (int k = 0; k < cfg.n_target_copies; ++k) agent->targets_.push_back(load_net(r));
        agent->policy_ = std::make_shared<EpsGreedyPolicy>(agent->online_, std::move(eps));
        agent->fit_count_ = fit_count;
        agent->target_ring_ = ring;
        return agent;
    }

private:
    static std::unique_ptr<MlpRegressor> load_net(BinaryReader& r) {
        auto reg = Regressor::load(r);
        auto* mlp = dynamic_cast<MlpRegressor*>(reg.get());
        if (!mlp) throw DecodeError("expected an MLP payload");
        reg.release();
        return std::unique_ptr<MlpRegressor>(mlp);
    }

    MlpRegressor& online_net() { return static_cast<MlpRegressor&>(online_->member(0)); }
    const MlpRegressor& online_net() const {
        return static_cast<const MlpRegressor&>(online_->member(0));
    }

    Config cfg_;
    ReplayBuffer buffer_;
    std::shared_ptr<QRegressor> online_;
    std::vector<std::unique_ptr<MlpRegressor>> targets_;
    std::shared_ptr<EpsGreedyPolicy> policy_;
    Rng policy_rng_;
    Rng agent_rng_;
    Rng replay_rng_;
    std::int64_t fit_count_ = 0;
    std::int64_t target_ring_ = 0;
};

} // namespace rlcore
