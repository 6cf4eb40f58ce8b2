#pragma once

#include <filesystem>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "napping/io/text.hpp"
#include "napping/trial/trial.hpp"

namespace napping {

inline constexpr const char* kEpisodesCsvHeader =
    "trial_id,domain,agent_mode,novelty_json,episode_index,reward,steps,detected,"
    "principles_open,principles_closed,terminal_cause";

inline constexpr const char* kTrialsCsvHeader =
    "trial_id,domain,agent_mode,novelty_json,seed,post_median_reward,post_last10_mean,failed";

// RFC-4180 quoting; only applied when the field needs it.
inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

inline std::vector<std::string> csv_parse_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline void write_episode_rows(std::ostream& out, int trial_id, const TrialRecord& rec,
                               const std::string& novelty_json) {
    const std::string prefix = std::to_string(trial_id) + "," + to_string(rec.config.domain) +
                               "," + to_string(rec.config.mode) + "," + csv_escape(novelty_json);
    for (const auto& ep : rec.episodes) {
        out << prefix << "," << ep.episode_index << "," << format_double(ep.total_reward) << ","
            << ep.steps << "," << (ep.detected ? 1 : 0) << "," << ep.principles_open << ","
            << ep.principles_closed << "," << to_string(ep.terminal_cause) << "\n";
    }
}

inline void write_trial_row(std::ostream& out, int trial_id, const TrialRecord& rec,
                            const std::string& novelty_json) {
    std::vector<double> post, last10;
    for (const auto& ep : rec.episodes) {
        if (ep.episode_index >= 0) post.push_back(ep.total_reward);
    }
    const std::size_t n10 = std::min<std::size_t>(10, post.size());
    last10.assign(post.end() - n10, post.end());
    const double last10_mean =
        std::accumulate(last10.begin(), last10.end(), 0.0) / last10.size();
    out << trial_id << "," << to_string(rec.config.domain) << "," << to_string(rec.config.mode)
        << "," << csv_escape(novelty_json) << "," << rec.config.seed << ","
        << format_double(median(post)) << "," << format_double(last10_mean) << ","
        << (trial_failed(rec) ? 1 : 0) << "\n";
}

// Minimal episode view reloaded from episodes.csv for reporting.
struct EpisodeRow {
    int trial_id = 0;
    std::string domain;
    std::string agent_mode;
    int episode_index = 0;
    double reward = 0.0;
    bool detected = false;
    int principles_open = 0;
    int principles_closed = 0;
};

inline std::vector<EpisodeRow> read_episode_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path.string());
    if (line.find("trial_id") != 0) throw std::runtime_error("unexpected header: " + line);
    std::vector<EpisodeRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = csv_parse_line(line);
        if (f.size() != 11) throw std::runtime_error("bad episodes.csv row: " + line);
        EpisodeRow r;
        r.trial_id = std::stoi(f[0]);
        r.domain = f[1];
        r.agent_mode = f[2];
        r.episode_index = std::stoi(f[4]);
        r.reward = parse_double(f[5]);
        r.detected = f[7] == "1";
        r.principles_open = std::stoi(f[8]);
        r.principles_closed = std::stoi(f[9]);
        rows.push_back(std::move(r));
    }
    return rows;
}

} // namespace napping
