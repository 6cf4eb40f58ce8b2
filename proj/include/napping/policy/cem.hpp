#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "napping/envs/env.hpp"
#include "napping/policy/mlp.hpp"
#include "napping/rng.hpp"

namespace napping {

// One full episode under the given policy; returns the episode reward sum.
inline double rollout_return(const MlpPolicy& policy, const EnvParams& params, Rng& rng) {
    Env env(params);
    auto obs = env.reset(rng);
    double total = 0.0;
    while (true) {
        const int a = policy.act(obs);
        auto r = env.step(a);
        total += r.reward;
        if (r.terminated) break;
        obs = std::move(r.observation);
    }
    return total;
}

inline double mean_return(const MlpPolicy& policy, const EnvParams& params,
                          std::uint64_t seed_base, int episodes) {
    double sum = 0.0;
    for (int e = 0; e < episodes; ++e) {
        Rng rng = Rng::derive(seed_base, static_cast<std::uint64_t>(e));
        sum += rollout_return(policy, params, rng);
    }
    return sum / static_cast<double>(episodes);
}

struct TrainConfig {
    int population = 64;
    double elite_frac = 0.125;
    double noise_scale = 0.5; // initial search std
    int max_generations = 80;
    int episodes_per_candidate = 5;
    int validation_episodes = 20;
    double target_score = 0.0; // mean episode return
    std::uint64_t seed = 0;

    static TrainConfig defaults(Domain d, std::uint64_t seed) {
        TrainConfig c;
        c.seed = seed;
        switch (d) {
            case Domain::cartpole:
                c.target_score = 195.0;
                c.max_generations = 60;
                break;
            case Domain::mountaincar:
                c.target_score = -140.0;
                c.episodes_per_candidate = 4;
                c.max_generations = 100;
                break;
            case Domain::crossroad:
                // Reset jitter makes every episode a different layout, so a
                // candidate needs several episodes to be judged and the bar is
                // a solve rate, not a guaranteed crossing.
                c.target_score = 0.92;
                c.population = 128;
                c.episodes_per_candidate = 6;
                c.validation_episodes = 100;
                c.max_generations = 300;
                break;
        }
        return c;
    }

    int elite_count() const {
        return std::max(1, static_cast<int>(population * elite_frac));
    }

    bool valid() const {
        return population >= 2 && elite_frac > 0.0 && elite_frac < 1.0 &&
               elite_count() < population && noise_scale > 0.0 && max_generations >= 1 &&
               episodes_per_candidate >= 1 && validation_episodes >= 1;
    }
};

struct TrainResult {
    MlpPolicy policy;
    bool target_met = false;
    double validation_score = 0.0;
    int generations = 0;
};

// Cross-entropy-method search over the flat weight vector. Candidates within
// a generation share episode seeds so score differences come from the weights
// alone. Candidate 0 of every generation is the current mean unchanged.
inline TrainResult train(const EnvParams& env_params, const TrainConfig& cfg) {
    if (!cfg.valid()) throw std::invalid_argument("degenerate train config");

    const Domain d = domain_of(env_params);
    MlpPolicy proto = MlpPolicy::zeros(d);
    const std::size_t n = proto.param_count();

    std::vector<double> mu(n, 0.0);
    std::vector<double> sigma(n, cfg.noise_scale);

    Rng rng = Rng::derive(cfg.seed, 0xcee1);
    const int elite_n = cfg.elite_count();

    TrainResult best;
    best.policy = proto;
    best.validation_score = -1e300;

    std::vector<std::vector<double>> cand(cfg.population);
    std::vector<double> score(cfg.population);

    for (int gen = 0; gen < cfg.max_generations; ++gen) {
        const std::uint64_t gen_seed = rng.next_u64();
        for (int c = 0; c < cfg.population; ++c) {
            cand[c].resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                cand[c][i] = (c == 0) ? mu[i] : mu[i] + sigma[i] * rng.normal();
            }
            proto.weights = cand[c];
            score[c] = mean_return(proto, env_params, gen_seed, cfg.episodes_per_candidate);
        }

        std::vector<int> order(cfg.population);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return score[a] > score[b]; });

        for (std::size_t i = 0; i < n; ++i) {
            double m = 0.0;
            for (int e = 0; e < elite_n; ++e) m += cand[order[e]][i];
            m /= elite_n;
            double var = 0.0;
            for (int e = 0; e < elite_n; ++e) {
                const double dlt = cand[order[e]][i] - m;
                var += dlt * dlt;
            }
            mu[i] = m;
            sigma[i] = std::sqrt(var / elite_n) + 0.02;
        }

        // Validate this generation's best candidate on fresh episodes.
        proto.weights = cand[order[0]];
        const double val = mean_return(proto, env_params, Rng::derive(cfg.seed, 0x7a1, gen).next_u64(),
                                       cfg.validation_episodes);
        if (val > best.validation_score) {
            best.policy = proto;
            best.validation_score = val;
        }
        best.generations = gen + 1;
        if (val >= cfg.target_score) {
            best.policy = proto;
            best.validation_score = val;
            best.target_met = true;
            break;
        }
    }

    best.policy.seed = cfg.seed;
    best.policy.train_score = best.validation_score;
    return best;
}

// ---- comparator updates (the -Online / -FineTune control agents) -----------

// One recorded episode: the observations seen, the actions taken, and the
// episode return. This is the only data the comparator agents learn from;
// unlike the trainer they never get extra simulator rollouts.
struct EpisodeTrace {
    std::vector<std::vector<double>> observations;
    std::vector<int> actions;
    double total_reward = 0.0;
};

inline EpisodeTrace rollout_trace(const MlpPolicy& policy, const EnvParams& params, Rng& rng) {
    Env env(params);
    EpisodeTrace tr;
    auto obs = env.reset(rng);
    while (true) {
        const int a = policy.act(obs);
        tr.observations.push_back(obs);
        tr.actions.push_back(a);
        auto r = env.step(a);
        tr.total_reward += r.reward;
        if (r.terminated) break;
        obs = std::move(r.observation);
    }
    return tr;
}

struct ComparatorConfig {
    int population = 8;
    double sigma = 0.05;
    double elite_frac = 0.25;
    int window = 5; // most recent episodes considered
};

inline ComparatorConfig online_config() { return {8, 0.05, 0.25, 5}; }
inline ComparatorConfig finetune_config() { return {8, 0.3, 0.25, 40}; }

// Mean log-likelihood of a recorded episode's actions under the policy.
inline double trace_log_likelihood(const MlpPolicy& policy, const EpisodeTrace& tr) {
    if (tr.actions.empty()) return 0.0;
    double ll = 0.0;
    for (std::size_t t = 0; t < tr.actions.size(); ++t) {
        const auto fw = policy.forward(tr.observations[t]);
        double mx = fw.logits[0];
        for (double l : fw.logits) mx = std::max(mx, l);
        double z = 0.0;
        for (double l : fw.logits) z += std::exp(l - mx);
        ll += fw.logits[tr.actions[t]] - mx - std::log(z);
    }
    return ll / static_cast<double>(tr.actions.size());
}

// One CEM generation centered at the current weights, scored purely on the
// recorded episodes: a candidate is fit when it prefers the actions of the
// better-than-average episodes in the window and avoids those of the worse
// ones. With one episode (or none) there is no contrast, so the generation
// reduces to a small random drift around the current weights. This is the
// weak, data-starved learner the trial protocol calls for; it cannot probe
// the environment the way the offline trainer can.
inline MlpPolicy comparator_step(const MlpPolicy& policy,
                                 const std::vector<EpisodeTrace>& episodes, Rng& rng,
                                 const ComparatorConfig& cfg) {
    if (episodes.empty() || cfg.population <= 1) return policy;
    const std::size_t first =
        episodes.size() > static_cast<std::size_t>(cfg.window)
            ? episodes.size() - static_cast<std::size_t>(cfg.window)
            : 0;

    double mean_g = 0.0;
    for (std::size_t e = first; e < episodes.size(); ++e) mean_g += episodes[e].total_reward;
    mean_g /= static_cast<double>(episodes.size() - first);

    const std::size_t n = policy.param_count();
    std::vector<std::vector<double>> cand(cfg.population);
    std::vector<double> score(cfg.population);
    MlpPolicy probe = policy;
    for (int c = 0; c < cfg.population; ++c) {
        cand[c].resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            cand[c][i] = (c == 0) ? policy.weights[i] : policy.weights[i] + cfg.sigma * rng.normal();
        }
        probe.weights = cand[c];
        double s = 0.0;
        for (std::size_t e = first; e < episodes.size(); ++e) {
            s += (episodes[e].total_reward - mean_g) * trace_log_likelihood(probe, episodes[e]);
        }
        score[c] = s;
    }

    std::vector<int> order(cfg.population);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return score[a] > score[b]; });
    const int elite_n = std::max(1, static_cast<int>(cfg.population * cfg.elite_frac));

    MlpPolicy out = policy;
    for (std::size_t i = 0; i < n; ++i) {
        double m = 0.0;
        for (int e = 0; e < elite_n; ++e) m += cand[order[e]][i];
        out.weights[i] = m / elite_n;
    }
    return out;
}

inline MlpPolicy online_step(const MlpPolicy& policy, const std::vector<EpisodeTrace>& episodes,
                             Rng& rng) {
    return comparator_step(policy, episodes, rng, online_config());
}

inline MlpPolicy fine_tune(const MlpPolicy& policy, const std::vector<EpisodeTrace>& episodes,
                           Rng& rng) {
    return comparator_step(policy, episodes, rng, finetune_config());
}

} // namespace napping
