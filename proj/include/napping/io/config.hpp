#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "napping/io/text.hpp"

namespace napping {

// Flat `key = value` structured text with '#' comments. Every config and
// manifest carries a schema_version field.
class Config {
public:
    static Config parse(std::istream& in) {
        Config c;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": expected key = value");
            }
            c.kv_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
        return c;
    }

    static Config parse_string(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    static Config parse_file(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config: " + path.string());
        return parse(in);
    }

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    const std::string& get(const std::string& key) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) throw std::runtime_error("missing config key: " + key);
        return it->second;
    }

    std::string get(const std::string& key, const std::string& fallback) const {
        const auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }

    long long get_int(const std::string& key) const { return std::stoll(get(key)); }
    long long get_int(const std::string& key, long long fallback) const {
        return has(key) ? std::stoll(get(key)) : fallback;
    }
    double get_double(const std::string& key) const { return parse_double(get(key)); }
    double get_double(const std::string& key, double fallback) const {
        return has(key) ? parse_double(get(key)) : fallback;
    }
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const {
        return has(key) ? std::stoull(get(key)) : fallback;
    }

    // Comma-separated list value.
    std::vector<std::string> get_list(const std::string& key) const {
        std::vector<std::string> out;
        std::istringstream in(get(key));
        std::string item;
        while (std::getline(in, item, ',')) {
            const std::string t = trim(item);
            if (!t.empty()) out.push_back(t);
        }
        return out;
    }

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

private:
    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return "";
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    }

    std::map<std::string, std::string> kv_;
};

} // namespace napping
