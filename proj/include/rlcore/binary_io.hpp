#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "rlcore/errors.hpp"

namespace rlcore {

// Snapshot container layout (all integers little-endian):
//   magic "RLSN" | u32 format version | tagged payload
// The tag names what was serialized ("regressor/tabular", "agent/q", ...);
// payload layout is owned by the tagged type. Floats are IEEE-754 binary64.
inline constexpr char kSnapshotMagic[4] = {'R', 'L', 'S', 'N'};
inline constexpr std::uint32_t kSnapshotVersion = 1;

class BinaryWriter {
public:
    void put_u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }

    void put_u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }

    void put_u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    }

    void put_i64(std::int64_t v) { put_u64(static_cast<std::uint64_t>(v)); }

    void put_f64(double v) { put_u64(std::bit_cast<std::uint64_t>(v)); }

    void put_str(std::string_view s) {
        put_u64(s.size());
        buf_.append(s.data(), s.size());
    }

    void put_vec(const Eigen::VectorXd& v) {
        put_i64(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) put_f64(v[i]);
    }

    void put_mat(const Eigen::MatrixXd& m) {
        put_i64(m.rows());
        put_i64(m.cols());
        // row-major stream order
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c) put_f64(m(r, c));
    }

    const std::string& bytes() const { return buf_; }
    std::string take() { return std::move(buf_); }

private:
    std::string buf_;
};

class BinaryReader {
public:
    explicit BinaryReader(std::string_view bytes) : data_(bytes) {}

    std::uint8_t get_u8() {
        need(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }

    std::uint32_t get_u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint64_t get_u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }

    std::int64_t get_i64() { return static_cast<std::int64_t>(get_u64()); }

    double get_f64() { return std::bit_cast<double>(get_u64()); }

    std::string get_str() {
        const std::uint64_t n = get_u64();
        if (n > data_.size() - pos_) throw DecodeError("truncated string field");
        std::string s(data_.substr(pos_, n));
        pos_ += n;
        return s;
    }

    Eigen::VectorXd get_vec() {
        const std::int64_t n = get_i64();
        if (n < 0 || static_cast<std::uint64_t>(n) * 8 > data_.size() - pos_)
            throw DecodeError("bad vector length");
        Eigen::VectorXd v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = get_f64();
        return v;
    }

    Eigen::MatrixXd get_mat() {
        const std::int64_t rows = get_i64();
        const std::int64_t cols = get_i64();
        if (rows < 0 || cols < 0) throw DecodeError("bad matrix shape");
        if (rows > 0 && static_cast<std::uint64_t>(rows) * static_cast<std::uint64_t>(cols) * 8 >
                            data_.size() - pos_)
            throw DecodeError("bad matrix shape");
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = get_f64();
        return m;
    }

    bool at_end() const { return pos_ == data_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) throw DecodeError("truncated snapshot");
    }

    std::string_view data_;
    std::size_t pos_ = 0;
};

/// Starts a snapshot blob: container header plus the type tag.
inline BinaryWriter snapshot_writer(std::string_view tag) {
    BinaryWriter w;
    for (char c : kSnapshotMagic) w.put_u8(static_cast<std::uint8_t>(c));
    w.put_u32(kSnapshotVersion);
    w.put_str(tag);
    return w;
}

/// Validates the container header and returns a reader positioned at the
/// payload, along with the stored type tag.
inline BinaryReader snapshot_reader(std::string_view bytes, std::string* tag_out) {
    BinaryReader r(bytes);
    char magic[4];
    for (char& c : magic) c = static_cast<char>(r.get_u8());
    if (std::memcmp(magic, kSnapshotMagic, 4) != 0) throw DecodeError("bad snapshot magic");
    const std::uint32_t version = r.get_u32();
    if (version != kSnapshotVersion)
        throw VersionError("snapshot version " + std::to_string(version) +
                           " incompatible with supported version " +
                           std::to_string(kSnapshotVersion));
    std::string tag = r.get_str();
    if (tag_out) *tag_out = std::move(tag);
    return r;
}

/// snapshot_reader that also enforces the expected tag.
inline BinaryReader snapshot_reader_expect(std::string_view bytes, std::string_view tag) {
    std::string got;
    BinaryReader r = snapshot_reader(bytes, &got);
    if (got != tag)
        throw DecodeError("snapshot holds '" + got + "', expected '" + std::string(tag) + "'");
    return r;
}

} // namespace rlcore
