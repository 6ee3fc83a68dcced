#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "rlcore/binary_io.hpp"
#include "rlcore/errors.hpp"

namespace rlcore {

/// Time- or visit-dependent scalar (learning rates, exploration epsilons).
/// next() consumes one use and returns the value for that use; peek() reads
/// without consuming. Decay variants are non-increasing and bounded below.
class Schedule {
public:
    virtual ~Schedule() = default;
    virtual double next(std::size_t index = 0) = 0;
    virtual double peek(std::size_t index = 0) const = 0;
    virtual std::unique_ptr<Schedule> clone() const = 0;
    virtual void save(BinaryWriter& w) const = 0;

    static std::unique_ptr<Schedule> load(BinaryReader& r);
};

class FixedSchedule final : public Schedule {
public:
    explicit FixedSchedule(double v) : v_(v) {}

    double next(std::size_t) override { return v_; }
    double peek(std::size_t) const override { return v_; }

    std::unique_ptr<Schedule> clone() const override { return std::make_unique<FixedSchedule>(v_); }

    void save(BinaryWriter& w) const override {
        w.put_u8(0);
        w.put_f64(v_);
    }

private:
    double v_;
};

/// Linear interpolation from v0 down to v_min over n_steps uses, flat after.
class LinearDecaySchedule final : public Schedule {
public:
    LinearDecaySchedule(double v0, double v_min, std::int64_t n_steps, std::int64_t t = 0)
        : v0_(v0), v_min_(v_min), n_steps_(n_steps), t_(t) {
        if (v_min < 0.0 || v0 < v_min) throw DomainError("need v0 >= v_min >= 0");
        if (n_steps < 1) throw DomainError("decay needs n_steps >= 1");
    }

    double next(std::size_t) override { return value(t_++); }
    double peek(std::size_t) const override { return value(t_); }

    std::unique_ptr<Schedule> clone() const override {
        return std::make_unique<LinearDecaySchedule>(v0_, v_min_, n_steps_, t_);
    }

    void save(BinaryWriter& w) const override {
        w.put_u8(1);
        w.put_f64(v0_);
        w.put_f64(v_min_);
        w.put_i64(n_steps_);
        w.put_i64(t_);
    }

private:
    double value(std::int64_t t) const {
        const double frac = std::min(1.0, static_cast<double>(t) / static_cast<double>(n_steps_));
        return v0_ + (v_min_ - v0_) * frac;
    }

    double v0_, v_min_;
    std::int64_t n_steps_;
    std::int64_t t_;
};

/// Per-index polynomial decay v0 / n^p, where n counts the uses of that
/// index. The n-th use of an index returns v0 / n^p.
class VisitDecaySchedule final : public Schedule {
public:
    VisitDecaySchedule(double v0, double p) : v0_(v0), p_(p) {
        if (p <= 0.0 || p > 1.0) throw DomainError("visit decay exponent must be in (0, 1]");
    }

    double next(std::size_t index) override {
        if (index >= counts_.size()) counts_.resize(index + 1, 0);
        const auto n = ++counts_[index];
        return v0_ / std::pow(static_cast<double>(n), p_);
    }

    double peek(std::size_t index) const override {
        const std::uint64_t n = index < counts_.size() ? counts_[index] : 0;
        return v0_ / std::pow(static_cast<double>(n + 1), p_);
    }

    std::unique_ptr<Schedule> clone() const override {
        auto c = std::make_unique<VisitDecaySchedule>(v0_, p_);
        c->counts_ = counts_;
        return c;
    }

    void save(BinaryWriter& w) const override {
        w.put_u8(2);
        w.put_f64(v0_);
        w.put_f64(p_);
        w.put_u64(counts_.size());
        for (auto c : counts_) w.put_u64(c);
    }

private:
    friend class Schedule;

    double v0_, p_;
    std::vector<std::uint64_t> counts_;
};

inline std::unique_ptr<Schedule> Schedule::load(BinaryReader& r) {
    const std::uint8_t kind = r.get_u8();
    if (kind == 0) return std::make_unique<FixedSchedule>(r.get_f64());
    if (kind == 1) {
        const double v0 = r.get_f64();
        const double v_min = r.get_f64();
        const std::int64_t n = r.get_i64();
        const std::int64_t t = r.get_i64();
        return std::make_unique<LinearDecaySchedule>(v0, v_min, n, t);
    }
    if (kind == 2) {
        const double v0 = r.get_f64();
        const double p = r.get_f64();
        auto s = std::make_unique<VisitDecaySchedule>(v0, p);
        const std::uint64_t n = r.get_u64();
        s->counts_.resize(n);
        for (std::uint64_t i = 0; i < n; ++i) s->counts_[i] = r.get_u64();
        return s;
    }
    throw DecodeError("unknown schedule kind");
}

} // namespace rlcore
