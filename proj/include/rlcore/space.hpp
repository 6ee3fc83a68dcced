#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <variant>

#include <Eigen/Dense>

#include "rlcore/binary_io.hpp"
#include "rlcore/errors.hpp"

namespace rlcore {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class State;

/// Observation or action space: either a finite index set or a real box
/// (componentwise bounds, +-inf permitted).
class Space {
public:
    static Space discrete(std::int64_t n) {
        if (n < 1) throw DomainError("Discrete space needs n >= 1");
        return Space(n);
    }

    static Space box(Vec low, Vec high) {
        if (low.size() != high.size()) throw DomainError("Box bounds length mismatch");
        for (Eigen::Index i = 0; i < low.size(); ++i)
            if (low[i] > high[i]) throw DomainError("Box low > high");
        return Space(std::move(low), std::move(high));
    }

    /// Unbounded box of the given dimension.
    static Space box(int dim) {
        const double inf = std::numeric_limits<double>::infinity();
        return box(Vec::Constant(dim, -inf), Vec::Constant(dim, inf));
    }

    bool is_discrete() const { return std::holds_alternative<std::int64_t>(v_); }

    std::int64_t size() const {
        if (!is_discrete()) throw UnsupportedError("size() on a Box space");
        return std::get<std::int64_t>(v_);
    }

    const Vec& low() const { return bounds().first; }
    const Vec& high() const { return bounds().second; }

    /// Dimension of a point of the space (1 for Discrete).
    int dim() const { return is_discrete() ? 1 : static_cast<int>(low().size()); }

    bool contains(const State& s) const;

    void save(BinaryWriter& w) const {
        if (is_discrete()) {
            w.put_u8(0);
            w.put_i64(size());
        } else {
            w.put_u8(1);
            w.put_vec(low());
            w.put_vec(high());
        }
    }

    static Space load(BinaryReader& r) {
        const std::uint8_t kind = r.get_u8();
        if (kind == 0) return discrete(r.get_i64());
        if (kind == 1) {
            Vec lo = r.get_vec();
            Vec hi = r.get_vec();
            return box(std::move(lo), std::move(hi));
        }
        throw DecodeError("unknown space kind");
    }

    bool operator==(const Space& o) const {
        if (is_discrete() != o.is_discrete()) return false;
        if (is_discrete()) return size() == o.size();
        return low() == o.low() && high() == o.high();
    }

private:
    explicit Space(std::int64_t n) : v_(n) {}
    Space(Vec lo, Vec hi) : v_(std::make_pair(std::move(lo), std::move(hi))) {}

    const std::pair<Vec, Vec>& bounds() const {
        if (is_discrete()) throw UnsupportedError("bounds of a Discrete space");
        return std::get<std::pair<Vec, Vec>>(v_);
    }

    std::variant<std::int64_t, std::pair<Vec, Vec>> v_;
};

/// A point of a space: an index into a Discrete space or a vector of a Box.
/// Actions use the same representation.
class State {
public:
    State() : v_(std::int64_t{0}) {}

    static State index(std::int64_t i) {
        if (i < 0) throw DomainError("state index must be nonnegative");
        return State(i);
    }

    static State vector(Vec x) { return State(std::move(x)); }

    bool is_index() const { return std::holds_alternative<std::int64_t>(v_); }

    std::int64_t idx() const {
        if (!is_index()) throw DomainError("vector state used where an index was required");
        return std::get<std::int64_t>(v_);
    }

    const Vec& vec() const {
        if (is_index()) throw DomainError("index state used where a vector was required");
        return std::get<Vec>(v_);
    }

    /// Uniform numeric view: indices become 1-d vectors. Used by function
    /// approximators that accept either state kind.
    Vec as_vec() const {
        if (is_index()) return Vec::Constant(1, static_cast<double>(idx()));
        return vec();
    }

    bool operator==(const State& o) const {
        if (is_index() != o.is_index()) return false;
        if (is_index()) return idx() == o.idx();
        return vec() == o.vec();
    }

    void save(BinaryWriter& w) const {
        if (is_index()) {
            w.put_u8(0);
            w.put_i64(idx());
        } else {
            w.put_u8(1);
            w.put_vec(vec());
        }
    }

    static State load(BinaryReader& r) {
        const std::uint8_t kind = r.get_u8();
        if (kind == 0) return index(r.get_i64());
        if (kind == 1) return vector(r.get_vec());
        throw DecodeError("unknown state kind");
    }

private:
    explicit State(std::int64_t i) : v_(i) {}
    explicit State(Vec x) : v_(std::move(x)) {}

    std::variant<std::int64_t, Vec> v_;
};

using Action = State;

inline bool Space::contains(const State& s) const {
    if (is_discrete()) return s.is_index() && s.idx() < size();
    if (s.is_index()) return false;
    const Vec& x = s.vec();
    if (x.size() != low().size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x[i] < low()[i] || x[i] > high()[i]) return false;
    return true;
}

/// Environment metadata handed to agents: spaces, discount, episode cap.
struct MdpInfo {
    Space observation_space;
    Space action_space;
    double gamma = 0.99;
    std::int64_t horizon = 1;

    MdpInfo(Space obs, Space act, double g, std::int64_t h)
        : observation_space(std::move(obs)), action_space(std::move(act)), gamma(g), horizon(h) {
        if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("gamma must be in (0, 1]");
        if (horizon < 1) throw DomainError("horizon must be >= 1");
    }

    std::int64_t n_actions() const { return action_space.size(); }

    void save(BinaryWriter& w) const {
        observation_space.save(w);
        action_space.save(w);
        w.put_f64(gamma);
        w.put_i64(horizon);
    }

    static MdpInfo load(BinaryReader& r) {
        Space obs = Space::load(r);
        Space act = Space::load(r);
        const double g = r.get_f64();
        const std::int64_t h = r.get_i64();
        return MdpInfo(std::move(obs), std::move(act), g, h);
    }
};

} // namespace rlcore
