#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "rlcore/binary_io.hpp"
#include "rlcore/errors.hpp"
#include "rlcore/space.hpp"

namespace rlcore {

/// Feature construction behind the linear function approximators. The output
/// dimension is fixed and queryable without evaluating.
class FeatureMap {
public:
    virtual ~FeatureMap() = default;
    virtual int input_dim() const = 0;
    virtual int output_dim() const = 0;
    virtual Vec operator()(const Vec& x) const = 0;
    virtual std::unique_ptr<FeatureMap> clone() const = 0;
    virtual void save(BinaryWriter& w) const = 0;

    static std::unique_ptr<FeatureMap> load(BinaryReader& r);

    Vec apply(const State& s) const {
        Vec x = s.as_vec();
        if (x.size() != input_dim()) throw DomainError("feature input dimension mismatch");
        return (*this)(x);
    }
};

/// Pass-through, by default with an appended constant bias feature:
/// x -> [x; 1].
class IdentityFeatures final : public FeatureMap {
public:
    explicit IdentityFeatures(int dim, bool with_bias = true) : dim_(dim), bias_(with_bias) {
        if (dim < 1) throw DomainError("identity features need dim >= 1");
    }

    int input_dim() const override { return dim_; }
    int output_dim() const override { return dim_ + (bias_ ? 1 : 0); }

    Vec operator()(const Vec& x) const override {
        if (!bias_) return x;
        Vec out(dim_ + 1);
        out.head(dim_) = x;
        out[dim_] = 1.0;
        return out;
    }

    std::unique_ptr<FeatureMap> clone() const override {
        return std::make_unique<IdentityFeatures>(dim_, bias_);
    }

    void save(BinaryWriter& w) const override {
        w.put_u8(0);
        w.put_i64(dim_);
        w.put_u8(bias_ ? 1 : 0);
    }

private:
    int dim_;
    bool bias_;
};

/// All monomials of total degree <= degree. The degree-0 monomial (the bias)
/// is included by default.
class PolynomialFeatures final : public FeatureMap {
public:
    PolynomialFeatures(int dim, int degree, bool with_bias = true)
        : dim_(dim), degree_(degree), bias_(with_bias) {
        if (dim < 1 || degree < 1) throw DomainError("polynomial features need dim, degree >= 1");
        std::vector<int> exps(dim, 0);
        enumerate(0, degree, exps);
        if (!bias_)
            std::erase_if(exponents_, [](const std::vector<int>& e) {
                for (int v : e)
                    if (v != 0) return false;
                return true;
            });
    }

    int input_dim() const override { return dim_; }
    int output_dim() const override { return static_cast<int>(exponents_.size()); }

    Vec operator()(const Vec& x) const override {
        Vec out(output_dim());
        for (std::size_t k = 0; k < exponents_.size(); ++k) {
            double v = 1.0;
            for (int d = 0; d < dim_; ++d)
                for (int e = 0; e < exponents_[k][d]; ++e) v *= x[d];
            out[static_cast<Eigen::Index>(k)] = v;
        }
        return out;
    }

    std::unique_ptr<FeatureMap> clone() const override {
        return std::make_unique<PolynomialFeatures>(dim_, degree_, bias_);
    }

    void save(BinaryWriter& w) const override {
        w.put_u8(1);
        w.put_i64(dim_);
        w.put_i64(degree_);
        w.put_u8(bias_ ? 1 : 0);
    }

private:
    void enumerate(int d, int budget, std::vector<int>& exps) {
        if (d == dim_) {
            exponents_.push_back(exps);
            return;
        }
        for (int e = 0; e <= budget; ++e) {
            exps[d] = e;
            enumerate(d + 1, budget - e, exps);
        }
        exps[d] = 0;
    }

    int dim_, degree_;
    bool bias_;
    std::vector<std::vector<int>> exponents_;
};

/// Gaussian radial basis functions exp(-|x - c_i|^2 / (2 w_i^2)). No bias.
class RadialBasisFeatures final : public FeatureMap {
public:
    RadialBasisFeatures(Mat centers, Vec widths)
        : centers_(std::move(centers)), widths_(std::move(widths)) {
        if (centers_.rows() != widths_.size())
            throw DomainError("one width per RBF center required");
        if (centers_.rows() < 1) throw DomainError("at least one RBF center required");
        for (Eigen::Index i = 0; i < widths_.size(); ++i)
            if (widths_[i] <= 0.0) throw DomainError("RBF widths must be positive");
    }

    int input_dim() const override { return static_cast<int>(centers_.cols()); }
    int output_dim() const override { return static_cast<int>(centers_.rows()); }

    Vec operator()(const Vec& x) const override {
        Vec out(centers_.rows());
        for (Eigen::Index i = 0; i < centers_.rows(); ++i) {
            const double d2 = (x.transpose() - centers_.row(i)).squaredNorm();
            out[i] = std::exp(-d2 / (2.0 * widths_[i] * widths_[i]));
        }
        return out;
    }

    std::unique_ptr<FeatureMap> clone() const override {
        return std::make_unique<RadialBasisFeatures>(centers_, widths_);
    }

    void save(BinaryWriter& w) const override {
        w.put_u8(2);
        w.put_mat(centers_);
        w.put_vec(widths_);
    }

private:
    Mat centers_;
    Vec widths_;
};

/// Tile coding over a bounded box. Each of the n_tilings grids is offset by a
/// fraction of a tile width; inputs are clamped to the box, so the output is
/// binary with exactly n_tilings ones. With n_tilings = 1 and integer-valued
/// 1-d inputs on [0, n) this is a one-hot encoding.
class TileFeatures final : public FeatureMap {
public:
    TileFeatures(int n_tilings, std::vector<int> tiles_per_dim, Vec low, Vec high)
        : n_tilings_(n_tilings),
          tiles_per_dim_(std::move(tiles_per_dim)),
          low_(std::move(low)),
          high_(std::move(high)) {
        if (n_tilings_ < 1) throw DomainError("need n_tilings >= 1");
        if (static_cast<Eigen::Index>(tiles_per_dim_.size()) != low_.size() ||
            low_.size() != high_.size())
            throw DomainError("tile dimensions inconsistent");
        tiles_total_ = 1;
        for (std::size_t d = 0; d < tiles_per_dim_.size(); ++d) {
            if (tiles_per_dim_[d] < 1) throw DomainError("need >= 1 tile per dimension");
            if (!std::isfinite(low_[d]) || !std::isfinite(high_[d]) || low_[d] >= high_[d])
                throw DomainError("tile coding needs finite bounds with low < high");
            tiles_total_ *= tiles_per_dim_[d];
        }
    }

    static std::unique_ptr<TileFeatures> one_hot(std::int64_t n) {
        return std::make_unique<TileFeatures>(1, std::vector<int>{static_cast<int>(n)},
                                              Vec::Constant(1, 0.0),
                                              Vec::Constant(1, static_cast<double>(n)));
    }

    int input_dim() const override { return static_cast<int>(low_.size()); }
    int output_dim() const override { return n_tilings_ * tiles_total_; }

    Vec operator()(const Vec& x) const override {
        Vec out = Vec::Zero(output_dim());
        for (int t = 0; t < n_tilings_; ++t) {
            int index = 0;
            int stride = 1;
            for (std::size_t d = 0; d < tiles_per_dim_.size(); ++d) {
                const int n = tiles_per_dim_[d];
                const double width = (high_[d] - low_[d]) / n;
                const double offset = width * static_cast<double>(t) / n_tilings_;
                int c = static_cast<int>(std::floor((x[d] - low_[d] + offset) / width));
                c = std::clamp(c, 0, n - 1);
                index += c * stride;
                stride *= n;
            }
            out[t * tiles_total_ + index] = 1.0;
        }
        return out;
    }

    std::unique_ptr<FeatureMap> clone() const override {
        return std::make_unique<TileFeatures>(n_tilings_, tiles_per_dim_, low_, high_);
    }

    void save(BinaryWriter& w) const override {
        w.put_u8(3);
        w.put_i64(n_tilings_);
        w.put_i64(static_cast<std::int64_t>(tiles_per_dim_.size()));
        for (int n : tiles_per_dim_) w.put_i64(n);
        w.put_vec(low_);
        w.put_vec(high_);
    }

private:
    int n_tilings_;
    std::vector<int> tiles_per_dim_;
    Vec low_, high_;
    int tiles_total_ = 1;
};

inline std::unique_ptr<FeatureMap> FeatureMap::load(BinaryReader& r) {
    const std::uint8_t kind = r.get_u8();
    if (kind == 0) {
        const int dim = static_cast<int>(r.get_i64());
        const bool bias = r.get_u8() != 0;
        return std::make_unique<IdentityFeatures>(dim, bias);
    }
    if (kind == 1) {
        const int dim = static_cast<int>(r.get_i64());
        const int degree = static_cast<int>(r.get_i64());
        const bool bias = r.get_u8() != 0;
        return std::make_unique<PolynomialFeatures>(dim, degree, bias);
    }
    if (kind == 2) {
        Mat centers = r.get_mat();
        Vec widths = r.get_vec();
        return std::make_unique<RadialBasisFeatures>(std::move(centers), std::move(widths));
    }
    if (kind == 3) {
        const int n_tilings = static_cast<int>(r.get_i64());
        const auto nd = r.get_i64();
        std::vector<int> tiles(nd);
        for (auto& v : tiles) v = static_cast<int>(r.get_i64());
        Vec lo = r.get_vec();
        Vec hi = r.get_vec();
        return std::make_unique<TileFeatures>(n_tilings, std::move(tiles), std::move(lo),
                                              std::move(hi));
    }
    throw DecodeError("unknown feature map kind");
}

} // namespace rlcore
