#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rlcore/binary_io.hpp"
#include "rlcore/errors.hpp"
#include "rlcore/features.hpp"
#include "rlcore/space.hpp"

namespace rlcore {

/// fit/predict abstraction shared by the tabular, linear and MLP
/// approximators. A regressor maps a state to n_outputs values; Q-functions
/// use one output per action. fit() regresses targets onto the selected
/// output of each input (the action taken).
///
/// Regressors are single-writer; concurrent predict calls on an unchanging
/// regressor are safe.
class Regressor {
public:
    virtual ~Regressor() = default;

    virtual int n_outputs() const = 0;

    virtual Vec predict(const State& s) const = 0;

    double predict(const State& s, int output) const {
        if (output < 0 || output >= n_outputs()) throw DomainError("output index out of range");
        return predict(s)[output];
    }

    /// inputs, outputs and targets are parallel; sample_weights may be null.
    virtual void fit(std::span<const State> inputs, std::span<const int> outputs,
                     const Vec& targets, const Vec* sample_weights = nullptr) = 0;

    virtual std::unique_ptr<Regressor> clone() const = 0;

    /// Payload serialization (variant tag + parameters). The framed container
    /// is added by snapshot()/restore() below.
    virtual void save(BinaryWriter& w) const = 0;
    static std::unique_ptr<Regressor> load(BinaryReader& r);

protected:
    static void check_fit_args(std::span<const State> inputs, std::span<const int> outputs,
                               const Vec& targets, const Vec* sample_weights) {
        if (inputs.empty()) throw DomainError("fit requires a nonempty input set");
        if (inputs.size() != outputs.size() ||
            static_cast<Eigen::Index>(inputs.size()) != targets.size())
            throw DomainError("fit inputs/outputs/targets length mismatch");
        if (sample_weights) {
            if (sample_weights->size() != targets.size())
                throw DomainError("sample weight length mismatch");
            for (Eigen::Index i = 0; i < sample_weights->size(); ++i)
                if ((*sample_weights)[i] < 0.0) throw DomainError("sample weights must be >= 0");
        }
    }
};

/// Serializes a regressor as a framed snapshot blob.
inline std::string snapshot(const Regressor& r) {
    BinaryWriter w = snapshot_writer("regressor");
    r.save(w);
    return w.take();
}

/// Inverse of snapshot(). restore(snapshot(r)) predicts identically to r.
inline std::unique_ptr<Regressor> restore_regressor(std::string_view bytes) {
    BinaryReader r = snapshot_reader_expect(bytes, "regressor");
    return Regressor::load(r);
}

/// Dense (state, action) table over discrete spaces. fit() either assigns
/// targets to cells (later duplicates win) or averages all targets per cell;
/// untouched cells keep their values.
class TabularRegressor final : public Regressor {
public:
    enum class FitMode { Assign, Average };

    TabularRegressor(std::int64_t n_states, std::int64_t n_actions,
                     FitMode mode = FitMode::Assign)
        : table_(Mat::Zero(n_states, n_actions)), mode_(mode) {
        if (n_states < 1 || n_actions < 1) throw DomainError("table needs positive dimensions");
    }

    int n_outputs() const override { return static_cast<int>(table_.cols()); }

    Vec predict(const State& s) const override { return table_.row(check_row(s)).transpose(); }

    void fit(std::span<const State> inputs, std::span<const int> outputs, const Vec& targets,
             const Vec* sample_weights = nullptr) override {
        check_fit_args(inputs, outputs, targets, sample_weights);
        if (mode_ == FitMode::Assign) {
            for (std::size_t i = 0; i < inputs.size(); ++i)
                table_(check_row(inputs[i]), check_col(outputs[i])) = targets[i];
            return;
        }
        Mat wsum = Mat::Zero(table_.rows(), table_.cols());
        Mat tsum = Mat::Zero(table_.rows(), table_.cols());
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            const double w = sample_weights ? (*sample_weights)[i] : 1.0;
            wsum(check_row(inputs[i]), check_col(outputs[i])) += w;
            tsum(check_row(inputs[i]), check_col(outputs[i])) += w * targets[i];
        }
        for (Eigen::Index r = 0; r < table_.rows(); ++r)
            for (Eigen::Index c = 0; c < table_.cols(); ++c)
                if (wsum(r, c) > 0.0) table_(r, c) = tsum(r, c) / wsum(r, c);
    }

    Mat& table() { return table_; }
    const Mat& table() const { return table_; }

    std::unique_ptr<Regressor> clone() const override {
        auto c = std::make_unique<TabularRegressor>(table_.rows(), table_.cols(), mode_);
        c->table_ = table_;
        return c;
    }

    void save(BinaryWriter& w) const override {
        w.put_u8(0);
        w.put_u8(mode_ == FitMode::Assign ? 0 : 1);
        w.put_mat(table_);
    }

    static std::unique_ptr<TabularRegressor> load_payload(BinaryReader& r) {
        const FitMode mode = r.get_u8() == 0 ? FitMode::Assign : FitMode::Average;
        Mat t = r.get_mat();
        auto out = std::make_unique<TabularRegressor>(t.rows(), t.cols(), mode);
        out->table_ = std::move(t);
        return out;
    }

private:
    Eigen::Index check_row(const State& s) const {
        const std::int64_t i = s.idx();
        if (i >= table_.rows()) throw DomainError("state index exceeds table");
        return static_cast<Eigen::Index>(i);
    }

    Eigen::Index check_col(int a) const {
        if (a < 0 || a >= table_.cols()) throw DomainError("action index exceeds table");
        return a;
    }

    Mat table_;
    FitMode mode_;
};

/// Linear-in-features model with one weight column per output. fit() solves a
/// (weighted) least-squares problem per output on the samples taken with that
/// output; degeneracy resolves to the minimum-norm pseudo-inverse solution.
class LinearRegressor final : public Regressor {
public:
    LinearRegressor(std::unique_ptr<FeatureMap> features, int n_outputs)
        : features_(std::move(features)),
          weights_(Mat::Zero(features_->output_dim(), n_outputs)) {
        if (n_outputs < 1) throw DomainError("need n_outputs >= 1");
    }

    int n_outputs() const override { return static_cast<int>(weights_.cols()); }

    Vec predict(const State& s) const override {
        return weights_.transpose() * features_->apply(s);
    }

    void fit(std::span<const State> inputs, std::span<const int> outputs, const Vec& targets,
             const Vec* sample_weights = nullptr) override {
        check_fit_args(inputs, outputs, targets, sample_weights);
        const int d = features_->output_dim();
        for (int col = 0; col < n_outputs(); ++col) {
            std::vector<std::size_t> rows;
            for (std::size_t i = 0; i < inputs.size(); ++i)
                if (outputs[i] == col) rows.push_back(i);
            if (rows.empty()) continue;
            Mat phi(rows.size(), d);
            Vec y(rows.size());
            for (std::size_t k = 0; k < rows.size(); ++k) {
                const double sw =
                    sample_weights ? std::sqrt((*sample_weights)[rows[k]]) : 1.0;
                phi.row(static_cast<Eigen::Index>(k)) =
                    sw * features_->apply(inputs[rows[k]]).transpose();
                y[static_cast<Eigen::Index>(k)] = sw * targets[rows[k]];
            }
            weights_.col(col) = phi.completeOrthogonalDecomposition().solve(y);
        }
    }

    const Mat& weights() const { return weights_; }
    Mat& weights() { return weights_; }
    const FeatureMap& features() const { return *features_; }

    std::unique_ptr<Regressor> clone() const override {
        auto c = std::make_unique<LinearRegressor>(features_->clone(), n_outputs());
        c->weights_ = weights_;
        return c;
    }

    void save(BinaryWriter& w) const override {
        w.put_u8(1);
        features_->save(w);
        w.put_mat(weights_);
    }

    static std::unique_ptr<LinearRegressor> load_payload(BinaryReader& r) {
        auto features = FeatureMap::load(r);
        Mat weights = r.get_mat();
        auto out = std::make_unique<LinearRegressor>(std::move(features),
                                                     static_cast<int>(weights.cols()));
        if (out->weights_.rows() != weights.rows()) throw DecodeError("weight shape mismatch");
        out->weights_ = std::move(weights);
        return out;
    }

private:
    std::unique_ptr<FeatureMap> features_;
    Mat weights_; // features x outputs
};

} // namespace rlcore
