#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "napping/envs/env.hpp"
#include "napping/io/text.hpp"
#include "napping/rng.hpp"
#include "napping/types.hpp"

namespace napping {

// Fixed per-domain input scaling so every observation component lands in a
// comparable range before the first layer.
inline std::vector<double> observation_scale(Domain d) {
    switch (d) {
        case Domain::cartpole: return {1.0 / 2.4, 1.0 / 3.0, 1.0 / 0.21, 1.0 / 3.0};
        case Domain::mountaincar: return {1.0 / 0.9, 1.0 / 0.07};
        case Domain::crossroad: return std::vector<double>(18, 0.1);
    }
    throw std::logic_error("bad domain tag");
}

// input -> hidden1 -> hidden2 -> logits, tanh nonlinearity. The hidden2
// activation vector is the model state NAPPING partitions.
struct MlpPolicy {
    Domain domain = Domain::cartpole;
    int input_dim = 4;
    int hidden1 = 32;
    int hidden2 = 32;
    int actions = 2;
    std::vector<double> weights; // [W1, b1, W2, b2, W3, b3], row-major
    std::uint64_t seed = 0;
    double train_score = 0.0;

    static MlpPolicy zeros(Domain d, int h1 = 32, int h2 = 32) {
        MlpPolicy p;
        p.domain = d;
        p.input_dim = observation_dim(d);
        p.hidden1 = h1;
        p.hidden2 = h2;
        p.actions = napping::action_count(d);
        p.weights.assign(p.param_count(), 0.0);
        return p;
    }

    std::size_t param_count() const {
        return static_cast<std::size_t>(hidden1) * input_dim + hidden1 +
               static_cast<std::size_t>(hidden2) * hidden1 + hidden2 +
               static_cast<std::size_t>(actions) * hidden2 + actions;
    }

    int embedding_dim() const { return hidden2; }

    struct ForwardResult {
        std::vector<double> logits;
        std::vector<double> embedding;
    };

    ForwardResult forward(std::span<const double> obs) const {
        if (static_cast<int>(obs.size()) != input_dim) {
            throw std::invalid_argument("observation dimension mismatch");
        }
        if (weights.size() != param_count()) {
            throw std::logic_error("weight vector has wrong length");
        }
        const auto scale = observation_scale(domain);
        std::vector<double> x(input_dim);
        for (int i = 0; i < input_dim; ++i) x[i] = obs[i] * scale[i];

        std::size_t off = 0;
        std::vector<double> h1(hidden1);
        for (int i = 0; i < hidden1; ++i) {
            double acc = 0.0;
            for (int j = 0; j < input_dim; ++j) acc += weights[off + i * input_dim + j] * x[j];
            h1[i] = acc;
        }
        off += static_cast<std::size_t>(hidden1) * input_dim;
        for (int i = 0; i < hidden1; ++i) h1[i] = std::tanh(h1[i] + weights[off + i]);
        off += hidden1;

        std::vector<double> h2(hidden2);
        for (int i = 0; i < hidden2; ++i) {
            double acc = 0.0;
            for (int j = 0; j < hidden1; ++j) acc += weights[off + i * hidden1 + j] * h1[j];
            h2[i] = acc;
        }
        off += static_cast<std::size_t>(hidden2) * hidden1;
        for (int i = 0; i < hidden2; ++i) h2[i] = std::tanh(h2[i] + weights[off + i]);
        off += hidden2;

        std::vector<double> logits(actions);
        for (int i = 0; i < actions; ++i) {
            double acc = 0.0;
            for (int j = 0; j < hidden2; ++j) acc += weights[off + i * hidden2 + j] * h2[j];
            logits[i] = acc;
        }
        off += static_cast<std::size_t>(actions) * hidden2;
        for (int i = 0; i < actions; ++i) logits[i] += weights[off + i];

        return {std::move(logits), std::move(h2)};
    }

    // Argmax over logits; ties break to the lowest action index.
    int act(std::span<const double> obs) const {
        const auto fw = forward(obs);
        int best = 0;
        for (int a = 1; a < actions; ++a) {
            if (fw.logits[a] > fw.logits[best]) best = a;
        }
        return best;
    }

    std::vector<double> embed(std::span<const double> obs) const {
        return forward(obs).embedding;
    }
};

// ---- versioned structured-text weight file ---------------------------------

inline constexpr const char* kPolicyFileTag = "napping-policy";
inline constexpr int kPolicyFileVersion = 1;

inline void save_policy(const MlpPolicy& policy, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << kPolicyFileTag << " v" << kPolicyFileVersion << "\n";
    out << "domain " << to_string(policy.domain) << "\n";
    out << "layer_sizes " << policy.input_dim << " " << policy.hidden1 << " " << policy.hidden2
        << " " << policy.actions << "\n";
    out << "seed " << policy.seed << "\n";
    out << "train_score " << format_double(policy.train_score) << "\n";
    out << "weights " << policy.weights.size() << "\n";
    for (double w : policy.weights) out << format_double(w) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline MlpPolicy load_policy(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open policy file: " + path.string());
    std::string tag, version;
    in >> tag >> version;
    if (tag != kPolicyFileTag || version != "v" + std::to_string(kPolicyFileVersion)) {
        throw std::runtime_error("unsupported policy file header: " + tag + " " + version);
    }
    MlpPolicy p;
    std::string key;
    std::string domain_name;
    in >> key >> domain_name;
    if (key != "domain") throw std::runtime_error("malformed policy file: expected domain");
    p.domain = domain_from_string(domain_name);
    in >> key >> p.input_dim >> p.hidden1 >> p.hidden2 >> p.actions;
    if (key != "layer_sizes") throw std::runtime_error("malformed policy file: expected layer_sizes");
    in >> key >> p.seed;
    if (key != "seed") throw std::runtime_error("malformed policy file: expected seed");
    std::string score;
    in >> key >> score;
    if (key != "train_score") throw std::runtime_error("malformed policy file: expected train_score");
    p.train_score = parse_double(score);
    std::size_t n = 0;
    in >> key >> n;
    if (key != "weights") throw std::runtime_error("malformed policy file: expected weights");
    if (n != p.param_count()) throw std::runtime_error("weight count does not match layer sizes");
    p.weights.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string w;
        if (!(in >> w)) throw std::runtime_error("truncated policy file");
        p.weights.push_back(parse_double(w));
    }
    return p;
}

} // namespace napping
