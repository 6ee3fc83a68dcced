#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rlcore/errors.hpp"

namespace rlcore {

/// Flat key=value parameter bag shared by environment, algorithm and policy
/// construction. Consumers read keys through the typed getters, which mark
/// them as used; check_all_used() then catches misspelled or misplaced keys.
class Params {
public:
    Params() = default;

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    /// Parses "key=value".
    void set_pair(const std::string& pair) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("expected key=value, got '" + pair + "'");
        set(pair.substr(0, eq), pair.substr(eq + 1));
    }

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        used_.insert(key);
        return it->second;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        used_.insert(key);
        return parse_double(key, it->second);
    }

    std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        used_.insert(key);
        try {
            return std::stoll(it->second);
        } catch (const std::exception&) {
            throw ConfigError("parameter '" + key + "' is not an integer: " + it->second);
        }
    }

    bool get_bool(const std::string& key, bool fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        used_.insert(key);
        if (it->second == "1" || it->second == "true") return true;
        if (it->second == "0" || it->second == "false") return false;
        throw ConfigError("parameter '" + key + "' is not a boolean: " + it->second);
    }

    /// Comma-separated integer list, e.g. hidden=80,80.
    std::vector<std::int64_t> get_int_list(const std::string& key,
                                           std::vector<std::int64_t> fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        used_.insert(key);
        std::vector<std::int64_t> out;
        std::stringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                out.push_back(std::stoll(item));
            } catch (const std::exception&) {
                throw ConfigError("parameter '" + key + "' is not an integer list: " + it->second);
            }
        }
        return out;
    }

    void check_all_used() const {
        for (const auto& [k, v] : kv_)
            if (!used_.count(k)) throw ConfigError("unknown parameter '" + k + "'");
    }

    const std::map<std::string, std::string>& items() const { return kv_; }

private:
    static double parse_double(const std::string& key, const std::string& s) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("parameter '" + key + "' is not a number: " + s);
        }
    }

    std::map<std::string, std::string> kv_;
    mutable std::set<std::string> used_;
};

} // namespace rlcore
