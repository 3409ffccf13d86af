#pragma once

// Flat key = value reports with a JSON mirror, and the time-series CSV.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <type_traits>
#include <variant>
#include <vector>

#include "json.hpp"

#include "chemolab/error.hpp"
#include "chemolab/rates.hpp"

namespace chemolab {

inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Ordered flat report. Keys are unique; insertion order is the output order.
class Report {
public:
    using Value = std::variant<double, std::int64_t, std::uint64_t, bool, std::string>;

    void set(const std::string& key, Value v) {
        for (const auto& [k, _] : entries_) {
            if (k == key) throw Error(ErrorKind::InternalError, "duplicate report key " + key);
        }
        entries_.emplace_back(key, std::move(v));
    }
    void set(const std::string& key, const char* s) { set(key, Value(std::string(s))); }
    void set(const std::string& key, double v) { set(key, Value(v)); }
    void set(const std::string& key, bool v) { set(key, Value(v)); }
    void set(const std::string& key, int v) { set(key, Value(static_cast<std::int64_t>(v))); }
    void set(const std::string& key, std::size_t v) { set(key, Value(static_cast<std::uint64_t>(v))); }

    /// Appends another report's entries under `prefix.`.
    void merge(const std::string& prefix, const Report& other) {
        for (const auto& [k, v] : other.entries_) set(prefix + "." + k, v);
    }

    const std::vector<std::pair<std::string, Value>>& entries() const { return entries_; }

    const Value* find(const std::string& key) const {
        for (const auto& [k, v] : entries_) {
            if (k == key) return &v;
        }
        return nullptr;
    }

    static std::string format(const Value& v) {
        struct {
            std::string operator()(double x) const { return format_double(x); }
            std::string operator()(std::int64_t x) const { return std::to_string(x); }
            std::string operator()(std::uint64_t x) const { return std::to_string(x); }
            std::string operator()(bool x) const { return x ? "true" : "false"; }
            std::string operator()(const std::string& s) const { return s; }
        } visitor;
        return std::visit(visitor, v);
    }

    std::string text() const {
        std::string out;
        for (const auto& [k, v] : entries_) out += k + " = " + format(v) + "\n";
        return out;
    }

    /// Same keys, typed values. Non-finite doubles become the strings used in text().
    nlohmann::ordered_json json() const {
        nlohmann::ordered_json j = nlohmann::ordered_json::object();
        for (const auto& [k, v] : entries_) {
            std::visit(
                [&](const auto& x) {
                    using T = std::decay_t<decltype(x)>;
                    if constexpr (std::is_same_v<T, double>) {
                        if (std::isfinite(x)) {
                            j[k] = x;
                        } else {
                            j[k] = format_double(x);
                        }
                    } else {
                        j[k] = x;
                    }
                },
                v);
        }
        return j;
    }

    std::string json_text() const { return json().dump(2) + "\n"; }

private:
    std::vector<std::pair<std::string, Value>> entries_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error(ErrorKind::ConfigError, "write failed for '" + path.string() + "'");
}

inline constexpr const char* csv_header = "t,dist_u,dist_v,dist_w,dist_z,mass_u,mass_vw,min_all,criterion_norm";

inline std::string series_csv(const TimeSeries& ts) {
    std::string out = std::string(csv_header) + "\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double row[9] = {ts.times[i],     ts.dist[0][i], ts.dist[1][i],  ts.dist[2][i],        ts.dist[3][i],
                               ts.mass_u[i],    ts.mass_vw[i], ts.min_all[i], ts.criterion_norm[i]};
        for (int c = 0; c < 9; ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

/// Reads a CSV written by series_csv (t0 is not part of the file).
inline TimeSeries parse_series_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::ConfigError, "empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != csv_header) throw Error(ErrorKind::ConfigError, "unexpected CSV header: " + line);
    TimeSeries ts;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        double v[9];
        std::size_t pos = 0;
        for (int c = 0; c < 9; ++c) {
            const auto comma = line.find(',', pos);
            const std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            char* end = nullptr;
            v[c] = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size()) {
                throw Error(ErrorKind::ConfigError, "CSV row " + std::to_string(row) + ": bad number '" + cell + "'");
            }
            if ((comma == std::string::npos) != (c == 8)) {
                throw Error(ErrorKind::ConfigError, "CSV row " + std::to_string(row) + ": expected 9 columns");
            }
            pos = comma + 1;
        }
        if (!ts.times.empty() && !(v[0] > ts.times.back())) {
            throw Error(ErrorKind::ConfigError, "CSV row " + std::to_string(row) + ": times must increase");
        }
        ts.times.push_back(v[0]);
        for (int f = 0; f < 4; ++f) ts.dist[f].push_back(v[1 + f]);
        ts.mass_u.push_back(v[5]);
        ts.mass_vw.push_back(v[6]);
        ts.min_all.push_back(v[7]);
        ts.criterion_norm.push_back(v[8]);
    }
    return ts;
}

}  // namespace chemolab
