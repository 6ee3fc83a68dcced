#pragma once

#include <memory>
#include <vector>

#include "rlcore/mlp.hpp"
#include "rlcore/regressor.hpp"

namespace rlcore {

/// Read-only action-value view used by policies and metrics. Implementations
/// return the Q(s, .) vector for all actions.
class QFunction {
public:
    virtual ~QFunction() = default;
    virtual Vec q_values(const State& s) const = 0;
};

/// Per-action output convention shared by every value-based algorithm: the
/// inner regressor has one output per action. Optionally keeps an ensemble of
/// K fully independent copies (no shared parameters); the QFunction view
/// averages the members, which is also the behavior rule for the two-table
/// methods.
class QRegressor final : public QFunction {
public:
    QRegressor(std::unique_ptr<Regressor> prototype, int n_members = 1) {
        if (n_members < 1) throw DomainError("ensemble size must be >= 1");
        members_.reserve(n_members);
        members_.push_back(std::move(prototype));
        for (int k = 1; k < n_members; ++k) members_.push_back(members_[0]->clone());
    }

    explicit QRegressor(std::vector<std::unique_ptr<Regressor>> members)
        : members_(std::move(members)) {
        if (members_.empty()) throw DomainError("ensemble size must be >= 1");
        for (const auto& m : members_)
            if (m->n_outputs() != members_[0]->n_outputs())
                throw DomainError("ensemble members disagree on n_actions");
    }

    int n_actions() const { return members_[0]->n_outputs(); }
    int n_members() const { return static_cast<int>(members_.size()); }

    Regressor& member(int k = 0) { return *members_.at(k); }
    const Regressor& member(int k = 0) const { return *members_.at(k); }

    /// Q(s, .) of one member; length n_actions.
    Vec predict(const State& s, int k = 0) const { return members_.at(k)->predict(s); }

    double predict(const State& s, int action, int k) const {
        return members_.at(k)->predict(s, action);
    }

    /// Ensemble mean of Q(s, .).
    Vec predict_mean(const State& s) const {
        Vec q = members_[0]->predict(s);
        for (std::size_t k = 1; k < members_.size(); ++k) q += members_[k]->predict(s);
        return q / static_cast<double>(members_.size());
    }

    Vec q_values(const State& s) const override { return predict_mean(s); }

    void fit(int k, std::span<const State> inputs, std::span<const int> actions,
             const Vec& targets, const Vec* sample_weights = nullptr) {
        members_.at(k)->fit(inputs, actions, targets, sample_weights);
    }

    std::unique_ptr<QRegressor> clone() const {
        std::vector<std::unique_ptr<Regressor>> copies;
        copies.reserve(members_.size());
        for (const auto& m : members_) copies.push_back(m->clone());
        return std::make_unique<QRegressor>(std::move(copies));
    }

    void save(BinaryWriter& w) const {
        w.put_i64(static_cast<std::int64_t>(members_.size()));
        for (const auto& m : members_) m->save(w);
    }

    static std::unique_ptr<QRegressor> load(BinaryReader& r) {
        const std::int64_t n = r.get_i64();
        if (n < 1) throw DecodeError("bad ensemble size");
        std::vector<std::unique_ptr<Regressor>> members;
        for (std::int64_t k = 0; k < n; ++k) members.push_back(Regressor::load(r));
        return std::make_unique<QRegressor>(std::move(members));
    }

private:
    std::vector<std::unique_ptr<Regressor>> members_;
};

/// Mean over states of max_a Q(s, a).
template <typename States>
double max_q_mean(const QFunction& q, const States& states) {
    if (std::size(states) == 0) throw DomainError("max_q_mean over an empty state set");
    double acc = 0.0;
    for (const State& s : states) acc += q.q_values(s).maxCoeff();
    return acc / static_cast<double>(std::size(states));
}

} // namespace rlcore
