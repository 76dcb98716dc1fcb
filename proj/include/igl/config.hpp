#pragma once

// Flat key = value configuration files.
//
//   # comment to end of line
//   key = value
//   section.key = value
//
// A value is a bare token, a "quoted string", or a [comma, separated] list.
// Matrices are quoted strings with rows separated by ';' and entries by
// whitespace or commas: reward = "1 0 0; 0 1 0". Duplicate keys are errors.
// Every key must be consumed by the reader; leftovers are reported.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "igl/core.hpp"
#include "igl/envs.hpp"

namespace igl {

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            out.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (!s.empty() && *b == '+') ++b;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc{} || p != e) throw FormatError(where + ": expected a number, got '" + s + "'");
    return v;
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& where) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw FormatError(where + ": expected a non-negative integer, got '" + s + "'");
    return v;
}

}  // namespace detail

class KeyValueFile {
public:
    struct Entry {
        std::string value;
        std::size_t line = 0;
        bool quoted = false;
    };

    static KeyValueFile parse(std::string_view text, std::string origin = "<string>") {
        KeyValueFile kv;
        kv.origin_ = std::move(origin);
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            auto nl = text.find('\n', pos);
            if (nl == std::string_view::npos) nl = text.size();
            std::string_view raw = text.substr(pos, nl - pos);
            pos = nl + 1;
            ++line_no;
            // strip comment outside quotes
            bool in_q = false;
            std::size_t cut = raw.size();
            for (std::size_t i = 0; i < raw.size(); ++i) {
                if (raw[i] == '"') in_q = !in_q;
                if (raw[i] == '#' && !in_q) {
                    cut = i;
                    break;
                }
            }
            const std::string line = detail::trim(raw.substr(0, cut));
            if (line.empty()) {
                if (nl == text.size()) break;
                continue;
            }
            const auto eq = line.find('=');
            const std::string where = kv.origin_ + ":" + std::to_string(line_no);
            if (eq == std::string::npos) throw FormatError(where + ": expected 'key = value'");
            const std::string key = detail::trim(std::string_view(line).substr(0, eq));
            std::string val = detail::trim(std::string_view(line).substr(eq + 1));
            if (key.empty()) throw FormatError(where + ": empty key");
            bool quoted = false;
            if (!val.empty() && val.front() == '"') {
                if (val.size() < 2 || val.back() != '"') throw FormatError(where + ": unterminated string");
                val = val.substr(1, val.size() - 2);
                quoted = true;
            }
            if (kv.entries_.count(key)) throw FormatError(where + ": duplicate key '" + key + "'");
            kv.entries_[key] = {val, line_no, quoted};
            if (nl == text.size()) break;
        }
        return kv;
    }

    static KeyValueFile load(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw DataError("cannot open " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        return parse(ss.str(), path.string());
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::optional<std::string> get_string(const std::string& key) {
        auto* e = take(key);
        if (!e) return std::nullopt;
        return e->value;
    }

    std::optional<double> get_double(const std::string& key) {
        auto* e = take(key);
        if (!e) return std::nullopt;
        return detail::parse_double(e->value, where(key));
    }

    std::optional<std::uint64_t> get_u64(const std::string& key) {
        auto* e = take(key);
        if (!e) return std::nullopt;
        return detail::parse_u64(e->value, where(key));
    }

    std::optional<bool> get_bool(const std::string& key) {
        auto* e = take(key);
        if (!e) return std::nullopt;
        if (e->value == "true" || e->value == "1") return true;
        if (e->value == "false" || e->value == "0") return false;
        throw FormatError(where(key) + ": expected true or false, got '" + e->value + "'");
    }

    /// [a, b, c] or a single bare value.
    std::optional<std::vector<std::string>> get_list(const std::string& key) {
        auto* e = take(key);
        if (!e) return std::nullopt;
        std::string v = e->value;
        if (!v.empty() && v.front() == '[') {
            if (v.back() != ']') throw FormatError(where(key) + ": unterminated list");
            v = detail::trim(std::string_view(v).substr(1, v.size() - 2));
            if (v.empty()) return std::vector<std::string>{};
        }
        auto parts = detail::split(v, ',');
        for (const auto& p : parts)
            if (p.empty()) throw FormatError(where(key) + ": empty list element");
        return parts;
    }

    std::optional<std::vector<double>> get_vector(const std::string& key) {
        const std::string w = where(key);
        auto l = get_list(key);
        if (!l) return std::nullopt;
        std::vector<double> out;
        for (const auto& s : *l) out.push_back(detail::parse_double(s, w));
        return out;
    }

    std::optional<std::vector<std::uint64_t>> get_u64_list(const std::string& key) {
        const std::string w = where(key);
        auto l = get_list(key);
        if (!l) return std::nullopt;
        std::vector<std::uint64_t> out;
        for (const auto& s : *l) out.push_back(detail::parse_u64(s, w));
        return out;
    }

    /// "r0c0 r0c1; r1c0 r1c1"
    std::optional<std::vector<std::vector<double>>> get_matrix(const std::string& key) {
        auto* e = take(key);
        if (!e) return std::nullopt;
        std::vector<std::vector<double>> out;
        for (const auto& row : detail::split(e->value, ';')) {
            std::string r = row;
            std::replace(r.begin(), r.end(), ',', ' ');
            std::istringstream ss(r);
            std::vector<double> vals;
            std::string tok;
            while (ss >> tok) vals.push_back(detail::parse_double(tok, where(key)));
            if (vals.empty()) throw FormatError(where(key) + ": empty matrix row");
            out.push_back(std::move(vals));
        }
        return out;
    }

    /// Throws if any key was never read.
    void require_all_consumed() const {
        for (const auto& [k, e] : entries_)
            if (!used_.count(k))
                throw ValidationError(origin_ + ":" + std::to_string(e.line) + ": unknown key '" + k + "'");
    }

    const std::string& origin() const { return origin_; }

private:
    Entry* take(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return nullptr;
        used_.insert(key);
        return &it->second;
    }
    std::string where(const std::string& key) const {
        auto it = entries_.find(key);
        return origin_ + ":" + std::to_string(it == entries_.end() ? 0 : it->second.line) + " (" + key + ")";
    }

    std::string origin_;
    std::map<std::string, Entry> entries_;
    std::set<std::string> used_;
};

// ---------------------------------------------------------------------------
// Tabular environment files
// ---------------------------------------------------------------------------
//
//   n_contexts = 2
//   k_actions = 3
//   context_probs = [0.5, 0.5]
//   reward = "1 0 0; 0 1 0"
//   alphabet = "1 0; 0 1"
//   feedback_r0 = [0.9, 0.1]
//   feedback_r1 = [0.1, 0.9]
//   feedback_law = "..."    # optional, rows indexed by (x * K + a) * 2 + r

inline TabularEnvSpec tabular_spec_from(KeyValueFile& kv) {
    TabularEnvSpec s;
    auto need = [&](auto opt, const char* key) {
        if (!opt) throw ValidationError(kv.origin() + ": missing key '" + key + "'");
        return *opt;
    };
    s.n_contexts = static_cast<std::size_t>(need(kv.get_u64("n_contexts"), "n_contexts"));
    s.k_actions = static_cast<std::size_t>(need(kv.get_u64("k_actions"), "k_actions"));
    s.context_probs = need(kv.get_vector("context_probs"), "context_probs");
    s.reward_table = need(kv.get_matrix("reward"), "reward");
    s.feedback_alphabet = need(kv.get_matrix("alphabet"), "alphabet");
    s.feedback_given_reward[0] = need(kv.get_vector("feedback_r0"), "feedback_r0");
    s.feedback_given_reward[1] = need(kv.get_vector("feedback_r1"), "feedback_r1");
    if (auto law = kv.get_matrix("feedback_law")) s.feedback_law = std::move(*law);
    kv.require_all_consumed();
    validate(s);
    return s;
}

inline TabularEnvSpec load_tabular_spec(const std::filesystem::path& path) {
    auto kv = KeyValueFile::load(path);
    return tabular_spec_from(kv);
}

}  // namespace igl
