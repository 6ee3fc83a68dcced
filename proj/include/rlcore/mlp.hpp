#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "rlcore/regressor.hpp"
#include "rlcore/rng.hpp"

namespace rlcore {

/// Fully-connected multilayer perceptron with a linear output layer.
/// Training is full-batch RMSProp on the mean squared error of the selected
/// outputs; gradient() exposes the exact analytic parameter gradient of
/// 1/2 (prediction - target)^2 for a single sample.
///
/// Flattened parameter order: per layer, the weight matrix in column-major
/// order followed by the bias vector.
class MlpRegressor final : public Regressor {
public:
    enum class Activation : std::uint8_t { ReLU = 0, Tanh = 1 };

    struct Config {
        std::vector<int> hidden = {80, 80};
        Activation activation = Activation::ReLU;
        double learning_rate = 1e-3;
        double rms_decay = 0.95;
        double rms_eps = 1e-8;
        int epochs = 1;
    };

    MlpRegressor(int in_dim, int out_dim, Config cfg, Rng& init_rng)
        : in_dim_(in_dim), out_dim_(out_dim), cfg_(std::move(cfg)) {
        if (in_dim < 1 || out_dim < 1) throw DomainError("MLP needs positive dimensions");
        std::vector<int> sizes;
        sizes.push_back(in_dim);
        for (int h : cfg_.hidden) {
            if (h < 1) throw DomainError("hidden layer sizes must be positive");
            sizes.push_back(h);
        }
        sizes.push_back(out_dim);
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
            const int fan_in = sizes[l];
            const int fan_out = sizes[l + 1];
            Mat w(fan_out, fan_in);
            const double scale = std::sqrt(2.0 / fan_in); // He-style
            for (Eigen::Index c = 0; c < w.cols(); ++c)
                for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = scale * init_rng.normal();
            W_.push_back(std::move(w));
            b_.push_back(Vec::Zero(fan_out));
        }
        reset_optimizer();
    }

    int n_outputs() const override { return out_dim_; }
    int input_dim() const { return in_dim_; }
    const Config& config() const { return cfg_; }

    Vec predict(const State& s) const override {
        Vec x = s.as_vec();
        if (x.size() != in_dim_) throw DomainError("MLP input dimension mismatch");
        for (std::size_t l = 0; l < W_.size(); ++l) {
            x = (W_[l] * x + b_[l]).eval();
            if (l + 1 < W_.size()) activate(x);
        }
        return x;
    }

    void fit(std::span<const State> inputs, std::span<const int> outputs, const Vec& targets,
             const Vec* sample_weights = nullptr) override {
        check_fit_args(inputs, outputs, targets, sample_weights);
        const auto batch = static_cast<Eigen::Index>(inputs.size());
        Mat x(in_dim_, batch);
        for (Eigen::Index i = 0; i < batch; ++i) {
            Vec v = inputs[i].as_vec();
            if (v.size() != in_dim_) throw DomainError("MLP input dimension mismatch");
            x.col(i) = v;
        }
        for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
            std::vector<Mat> grad_w;
            std::vector<Vec> grad_b;
            backprop_batch(x, outputs, targets, sample_weights, grad_w, grad_b);
            for (std::size_t l = 0; l < W_.size(); ++l) {
                rms_step(W_[l], grad_w[l], cache_w_[l]);
                rms_step(b_[l], grad_b[l], cache_b_[l]);
            }
        }
    }

    /// Flattened gradient of 1/2 (predict(input)[output] - target)^2.
    Vec gradient(const State& input, double target, int output = 0) const {
        if (output < 0 || output >= out_dim_) throw DomainError("output index out of range");
        Vec x = input.as_vec();
        if (x.size() != in_dim_) throw DomainError("MLP input dimension mismatch");

        std::vector<Vec> acts;   // a_0 .. a_L
        std::vector<Vec> preacts; // z_1 .. z_L
        acts.push_back(x);
        for (std::size_t l = 0; l < W_.size(); ++l) {
            Vec z = W_[l] * acts.back() + b_[l];
            preacts.push_back(z);
            if (l + 1 < W_.size()) activate(z);
            acts.push_back(std::move(z));
        }

        Vec delta = Vec::Zero(out_dim_);
        delta[output] = acts.back()[output] - target;

        Vec flat(param_count());
        Eigen::Index pos = flat.size();
        for (std::size_t li = W_.size(); li-- > 0;) {
            const Mat gw = delta * acts[li].transpose();
            pos -= b_[li].size();
            flat.segment(pos, b_[li].size()) = delta;
            pos -= gw.size();
            flat.segment(pos, gw.size()) = Eigen::Map<const Vec>(gw.data(), gw.size());
            if (li > 0) {
                Vec da = W_[li].transpose() * delta;
                delta = da.cwiseProduct(activation_grad(preacts[li - 1]));
            }
        }
        return flat;
    }

    Eigen::Index param_count() const {
        Eigen::Index n = 0;
        for (std::size_t l = 0; l < W_.size(); ++l) n += W_[l].size() + b_[l].size();
        return n;
    }

    Vec get_params() const {
        Vec flat(param_count());
        Eigen::Index pos = 0;
        for (std::size_t l = 0; l < W_.size(); ++l) {
            flat.segment(pos, W_[l].size()) = Eigen::Map<const Vec>(W_[l].data(), W_[l].size());
            pos += W_[l].size();
            flat.segment(pos, b_[l].size()) = b_[l];
            pos += b_[l].size();
        }
        return flat;
    }

    void set_params(const Vec& flat) {
        if (flat.size() != param_count()) throw DomainError("parameter vector size mismatch");
        Eigen::Index pos = 0;
        for (std::size_t l = 0; l < W_.size(); ++l) {
            Eigen::Map<Vec>(W_[l].data(), W_[l].size()) = flat.segment(pos, W_[l].size());
            pos += W_[l].size();
            b_[l] = flat.segment(pos, b_[l].size());
            pos += b_[l].size();
        }
    }

    /// Copies another net's parameters without touching optimizer state.
    void copy_params_from(const MlpRegressor& other) {
        if (other.param_count() != param_count()) throw DomainError("incompatible MLP shapes");
        W_ = other.W_;
        b_ = other.b_;
    }

    std::unique_ptr<Regressor> clone() const override {
        return std::make_unique<MlpRegressor>(*this);
    }

    void save(BinaryWriter& w) const override {
        w.put_u8(2);
        w.put_i64(in_dim_);
        w.put_i64(out_dim_);
        w.put_i64(static_cast<std::int64_t>(cfg_.hidden.size()));
        for (int h : cfg_.hidden) w.put_i64(h);
        w.put_u8(static_cast<std::uint8_t>(cfg_.activation));
        w.put_f64(cfg_.learning_rate);
        w.put_f64(cfg_.rms_decay);
        w.put_f64(cfg_.rms_eps);
        w.put_i64(cfg_.epochs);
        for (std::size_t l = 0; l < W_.size(); ++l) {
            w.put_mat(W_[l]);
            w.put_vec(b_[l]);
            w.put_mat(cache_w_[l]);
            w.put_vec(cache_b_[l]);
        }
    }

    static std::unique_ptr<MlpRegressor> load_payload(BinaryReader& r) {
        const int in_dim = static_cast<int>(r.get_i64());
        const int out_dim = static_cast<int>(r.get_i64());
        Config cfg;
        cfg.hidden.resize(r.get_i64());
        for (auto& h : cfg.hidden) h = static_cast<int>(r.get_i64());
        cfg.activation = static_cast<Activation>(r.get_u8());
        cfg.learning_rate = r.get_f64();
        cfg.rms_decay = r.get_f64();
        cfg.rms_eps = r.get_f64();
        cfg.epochs = static_cast<int>(r.get_i64());
        Rng dummy(0);
        auto net = std::make_unique<MlpRegressor>(in_dim, out_dim, cfg, dummy);
        for (std::size_t l = 0; l < net->W_.size(); ++l) {
            Mat w = r.get_mat();
            Vec b = r.get_vec();
            Mat cw = r.get_mat();
            Vec cb = r.get_vec();
            if (w.rows() != net->W_[l].rows() || w.cols() != net->W_[l].cols())
                throw DecodeError("MLP layer shape mismatch");
            net->W_[l] = std::move(w);
            net->b_[l] = std::move(b);
            net->cache_w_[l] = std::move(cw);
            net->cache_b_[l] = std::move(cb);
        }
        return net;
    }

private:
    void reset_optimizer() {
        cache_w_.clear();
        cache_b_.clear();
        for (std::size_t l = 0; l < W_.size(); ++l) {
            cache_w_.push_back(Mat::Zero(W_[l].rows(), W_[l].cols()));
            cache_b_.push_back(Vec::Zero(b_[l].size()));
        }
    }

    void activate(Vec& z) const {
        if (cfg_.activation == Activation::ReLU)
            z = z.cwiseMax(0.0);
        else
            z = z.array().tanh().matrix();
    }

    void activate(Mat& z) const {
        if (cfg_.activation == Activation::ReLU)
            z = z.cwiseMax(0.0);
        else
            z = z.array().tanh().matrix();
    }

    Vec activation_grad(const Vec& z) const {
        if (cfg_.activation == Activation::ReLU)
            return (z.array() > 0.0).cast<double>().matrix();
        const Vec t = z.array().tanh().matrix();
        return (1.0 - t.array().square()).matrix();
    }

    Mat activation_grad(const Mat& z) const {
        if (cfg_.activation == Activation::ReLU)
            return (z.array() > 0.0).cast<double>().matrix();
        const Mat t = z.array().tanh().matrix();
        return (1.0 - t.array().square()).matrix();
    }

    void backprop_batch(const Mat& x, std::span<const int> outputs, const Vec& targets,
                        const Vec* sample_weights, std::vector<Mat>& grad_w,
                        std::vector<Vec>& grad_b) const {
        const Eigen::Index batch = x.cols();
        std::vector<Mat> acts;
        std::vector<Mat> preacts;
        acts.push_back(x);
        for (std::size_t l = 0; l < W_.size(); ++l) {
            Mat z = (W_[l] * acts.back()).colwise() + b_[l];
            preacts.push_back(z);
            if (l + 1 < W_.size()) activate(z);
            acts.push_back(std::move(z));
        }

        // mean over the batch of 1/2 w_i (out[a_i] - y_i)^2
        Mat delta = Mat::Zero(out_dim_, batch);
        for (Eigen::Index i = 0; i < batch; ++i) {
            const int a = outputs[i];
            if (a < 0 || a >= out_dim_) throw DomainError("output index out of range");
            const double w = sample_weights ? (*sample_weights)[i] : 1.0;
            delta(a, i) = w * (acts.back()(a, i) - targets[i]) / static_cast<double>(batch);
        }

        grad_w.assign(W_.size(), Mat());
        grad_b.assign(W_.size(), Vec());
        for (std::size_t li = W_.size(); li-- > 0;) {
            grad_w[li] = delta * acts[li].transpose();
            grad_b[li] = delta.rowwise().sum();
            if (li > 0) {
                Mat da = W_[li].transpose() * delta;
                delta = da.cwiseProduct(activation_grad(preacts[li - 1]));
            }
        }
    }

    template <typename T>
    void rms_step(T& param, const T& grad, T& cache) const {
        cache = cfg_.rms_decay * cache + (1.0 - cfg_.rms_decay) * grad.cwiseProduct(grad);
        param -= cfg_.learning_rate *
                 grad.cwiseQuotient(cache.cwiseSqrt() + T::Constant(cache.rows(), cache.cols(),
                                                                   cfg_.rms_eps));
    }

    int in_dim_, out_dim_;
    Config cfg_;
    std::vector<Mat> W_;
    std::vector<Vec> b_;
    std::vector<Mat> cache_w_;
    std::vector<Vec> cache_b_;
};

inline std::unique_ptr<Regressor> Regressor::load(BinaryReader& r) {
    const std::uint8_t kind = r.get_u8();
    if (kind == 0) return TabularRegressor::load_payload(r);
    if (kind == 1) return LinearRegressor::load_payload(r);
    if (kind == 2) return MlpRegressor::load_payload(r);
    throw DecodeError("unknown regressor kind");
}

} // namespace rlcore
