#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "napping/io/config.hpp"
#include "napping/io/csv.hpp"
#include "napping/policy/cem.hpp"
#include "napping/trial/trial.hpp"

namespace napping {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitTargetMiss = 3;

inline int worker_count() {
    if (const char* env = std::getenv("NAPPING_WORKERS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

inline std::filesystem::path resolve_out_dir(const std::string& manifest_dir) {
    if (const char* env = std::getenv("NAPPING_OUT_DIR")) return env;
    return manifest_dir;
}

// Run fn(i) for i in [0, n) on a bounded pool; results land wherever fn
// writes them, indexed by i, so output order stays deterministic.
template <typename Fn>
inline void parallel_for(int n, int workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::mutex mu;
    int next = 0;
    for (int w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&] {
            while (true) {
                int i;
                {
                    std::lock_guard<std::mutex> lock(mu);
                    if (next >= n) return;
                    i = next++;
                }
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

inline TrainConfig train_config_from_file(Domain domain, const Config& cfg) {
    TrainConfig tc = TrainConfig::defaults(domain, cfg.get_u64("seed", 0));
    tc.population = static_cast<int>(cfg.get_int("population", tc.population));
    tc.elite_frac = cfg.get_double("elite_frac", tc.elite_frac);
    tc.noise_scale = cfg.get_double("noise_scale", tc.noise_scale);
    tc.max_generations = static_cast<int>(cfg.get_int("max_generations", tc.max_generations));
    tc.episodes_per_candidate =
        static_cast<int>(cfg.get_int("episodes_per_candidate", tc.episodes_per_candidate));
    tc.validation_episodes =
        static_cast<int>(cfg.get_int("validation_episodes", tc.validation_episodes));
    tc.target_score = cfg.get_double("target_score", tc.target_score);
    return tc;
}

inline int cli_train(const std::string& domain_name, const std::filesystem::path& config_path,
                     const std::filesystem::path& out_path) {
    Domain domain;
    Config cfg;
    try {
        domain = domain_from_string(domain_name);
        cfg = Config::parse_file(config_path);
        if (cfg.get_int("schema_version", 1) != 1) {
            std::cerr << "error: unsupported schema_version\n";
            return kExitUsage;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        const TrainConfig tc = train_config_from_file(domain, cfg);
        if (!tc.valid()) {
            std::cerr << "error: degenerate train config\n";
            return kExitUsage;
        }
        const TrainResult result = train(default_params(domain), tc);
        save_policy(result.policy, out_path);
        std::cout << "trained " << domain_name << ": validation score "
                  << format_double(result.validation_score) << " after " << result.generations
                  << " generations -> " << out_path.string() << "\n";
        if (!result.target_met) {
            std::cerr << "warning: competence target " << format_double(tc.target_score)
                      << " not met\n";
            return kExitTargetMiss;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

// One (trial, mode) work unit of a run or sweep.
struct TrialJob {
    int trial_id = 0;
    AgentMode mode = AgentMode::frozen;
    EnvParams novelty;
    std::uint64_t seed = 0;
};

inline int execute_jobs(const std::vector<TrialJob>& jobs, const MlpPolicy& policy,
                        const std::filesystem::path& out_dir, bool save_stores) {
    std::filesystem::create_directories(out_dir);
    if (save_stores) std::filesystem::create_directories(out_dir / "stores");

    std::vector<TrialRecord> records(jobs.size());
    std::vector<std::string> novelty_jsons(jobs.size());
    std::string first_error;
    std::mutex err_mu;

    parallel_for(static_cast<int>(jobs.size()), worker_count(), [&](int i) {
        try {
            const TrialJob& job = jobs[i];
            TrialConfig tc;
            tc.domain = policy.domain;
            tc.mode = job.mode;
            tc.novelty = job.novelty;
            tc.seed = job.seed;
            Rng rng(job.seed);
            PrincipleStore store(action_count(tc.domain));
            records[i] = run_trial(tc, policy, rng, &store);
            novelty_jsons[i] = params_to_json(job.novelty).dump();
            if (save_stores && job.mode == AgentMode::napping) {
                store.save(out_dir / "stores" /
                           ("trial_" + std::to_string(job.trial_id) + ".txt"));
            }
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(err_mu);
            if (first_error.empty()) first_error = e.what();
        }
    });
    if (!first_error.empty()) {
        std::cerr << "error: " << first_error << "\n";
        return kExitRuntime;
    }

    std::ofstream episodes(out_dir / "episodes.csv");
    std::ofstream trials(out_dir / "trials.csv");
    episodes << kEpisodesCsvHeader << "\n";
    trials << kTrialsCsvHeader << "\n";
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        write_episode_rows(episodes, jobs[i].trial_id, records[i], novelty_jsons[i]);
        write_trial_row(trials, jobs[i].trial_id, records[i], novelty_jsons[i]);
    }
    if (!episodes || !trials) {
        std::cerr << "error: failed writing CSV output\n";
        return kExitRuntime;
    }
    std::cout << "wrote " << jobs.size() << " trials to " << out_dir.string() << "\n";
    return kExitOk;
}

inline std::vector<AgentMode> parse_modes(const Config& cfg) {
    std::vector<AgentMode> modes;
    for (const auto& m : cfg.get_list("modes")) modes.push_back(agent_mode_from_string(m));
    if (modes.empty()) throw std::runtime_error("manifest lists no agent modes");
    return modes;
}

inline EnvParams novelty_for_trial(Domain domain, const std::string& spec, std::uint64_t master,
                                   int trial_index) {
    Rng rng = Rng::derive(master, 0x6e6f76, trial_index); // novelty stream
    if (spec == "identity") return default_params(domain);
    if (spec == "middle") {
        if (domain == Domain::cartpole) return sample_cartpole_novelty(rng, 0.5);
        return sample_novelty(domain, rng);
    }
    if (spec == "full") return sample_novelty(domain, rng);
    throw std::runtime_error("unknown novelty spec: " + spec);
}

inline int cli_run(const std::filesystem::path& manifest_path) {
    Config cfg;
    Domain domain;
    std::vector<AgentMode> modes;
    int trials = 0;
    try {
        cfg = Config::parse_file(manifest_path);
        if (cfg.get_int("schema_version", 1) != 1)
            throw std::runtime_error("unsupported schema_version");
        domain = domain_from_string(cfg.get("domain"));
        modes = parse_modes(cfg);
        trials = static_cast<int>(cfg.get_int("trials"));
        if (trials < 1) throw std::runtime_error("trial count must be >= 1");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        const MlpPolicy policy = load_policy(cfg.get("policy"));
        if (policy.domain != domain) throw std::runtime_error("policy domain mismatch");
        const std::uint64_t master = cfg.get_u64("master_seed", 0);
        const std::string novelty_spec = cfg.get("novelty", "full");
        const auto out_dir = resolve_out_dir(cfg.get("out_dir", "results"));
        const bool save_stores = cfg.get_int("save_stores", 0) != 0;

        std::vector<TrialJob> jobs;
        for (int ti = 0; ti < trials; ++ti) {
            const EnvParams novelty = novelty_for_trial(domain, novelty_spec, master, ti);
            for (std::size_t mi = 0; mi < modes.size(); ++mi) {
                TrialJob job;
                job.trial_id = ti * static_cast<int>(modes.size()) + static_cast<int>(mi);
                job.mode = modes[mi];
                job.novelty = novelty;
                job.seed = Rng::derive(master, ti, mi + 1).next_u64();
                jobs.push_back(std::move(job));
            }
        }
        return execute_jobs(jobs, policy, out_dir, save_stores);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

// Parameter-grid variant of run: MountainCar force x gravity grids and the
// CrossRoad novelty bases; other domains fall back to sampled novelties.
inline int cli_sweep(const std::filesystem::path& manifest_path) {
    Config cfg;
    Domain domain;
    std::vector<AgentMode> modes;
    try {
        cfg = Config::parse_file(manifest_path);
        if (cfg.get_int("schema_version", 1) != 1)
            throw std::runtime_error("unsupported schema_version");
        domain = domain_from_string(cfg.get("domain"));
        modes = parse_modes(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        const MlpPolicy policy = load_policy(cfg.get("policy"));
        if (policy.domain != domain) throw std::runtime_error("policy domain mismatch");
        const std::uint64_t master = cfg.get_u64("master_seed", 0);
        const auto out_dir = resolve_out_dir(cfg.get("out_dir", "results"));
        const bool save_stores = cfg.get_int("save_stores", 0) != 0;

        std::vector<EnvParams> novelties;
        if (domain == Domain::mountaincar) {
            const int fsteps = static_cast<int>(cfg.get_int("force_steps", 8));
            const int gsteps = static_cast<int>(cfg.get_int("gravity_steps", 8));
            const double fmin = cfg.get_double("force_min", 0.0001);
            const double fmax = cfg.get_double("force_max", 0.02);
            const double gmin = cfg.get_double("gravity_min", 0.0001);
            const double gmax = cfg.get_double("gravity_max", 0.005);
            // Log-spaced grid: both ranges span multiple decades.
            for (int fi = 0; fi < fsteps; ++fi) {
                for (int gi = 0; gi < gsteps; ++gi) {
                    MountainCarParams p;
                    p.force = fmin * std::pow(fmax / fmin, double(fi) / std::max(1, fsteps - 1));
                    p.gravity =
                        gmin * std::pow(gmax / gmin, double(gi) / std::max(1, gsteps - 1));
                    novelties.emplace_back(p);
                }
            }
        } else if (domain == Domain::crossroad) {
            const int per_base = static_cast<int>(cfg.get_int("trials_per_base", 10));
            for (int b = 0; b < kCrossRoadNoveltyCount; ++b) {
                for (int r = 0; r < per_base; ++r) {
                    Rng rng = Rng::derive(master, 0x626173 + b, r);
                    novelties.emplace_back(
                        apply_crossroad_novelty(static_cast<CrossRoadNovelty>(b), rng));
                }
            }
        } else {
            const int trials = static_cast<int>(cfg.get_int("trials", 50));
            for (int ti = 0; ti < trials; ++ti) {
                novelties.push_back(
                    novelty_for_trial(domain, cfg.get("novelty", "middle"), master, ti));
            }
        }

        std::vector<TrialJob> jobs;
        for (std::size_t ti = 0; ti < novelties.size(); ++ti) {
            for (std::size_t mi = 0; mi < modes.size(); ++mi) {
                TrialJob job;
                job.trial_id = static_cast<int>(ti * modes.size() + mi);
                job.mode = modes[mi];
                job.novelty = novelties[ti];
                job.seed = Rng::derive(master, ti, mi + 1).next_u64();
                jobs.push_back(std::move(job));
            }
        }
        return execute_jobs(jobs, policy, out_dir, save_stores);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

inline int cli_report(const std::filesystem::path& results_dir) {
    const auto episodes_path = results_dir / "episodes.csv";
    if (!std::filesystem::exists(episodes_path)) {
        std::cerr << "error: no data in " << results_dir.string() << " (missing episodes.csv)\n";
        return kExitUsage;
    }
    try {
        const auto rows = read_episode_rows(episodes_path);
        if (rows.empty()) {
            std::cerr << "error: no data in " << episodes_path.string() << "\n";
            return kExitUsage;
        }

        // mode -> episode_index -> rewards across trials
        std::map<std::string, std::map<int, std::vector<double>>> by_mode;
        std::map<std::string, std::map<int, std::vector<double>>> trial_post; // mode -> trial -> post rewards
        std::map<std::string, std::map<int, std::pair<int, int>>> final_counts;
        for (const auto& r : rows) {
            by_mode[r.agent_mode][r.episode_index].push_back(r.reward);
            if (r.episode_index >= 0) trial_post[r.agent_mode][r.trial_id].push_back(r.reward);
            final_counts[r.agent_mode][r.trial_id] = {r.principles_open, r.principles_closed};
        }

        std::ofstream curves(results_dir / "curves.csv");
        curves << "agent_mode,episode_index,median_reward,mean_reward\n";
        for (const auto& [mode, slots] : by_mode) {
            for (const auto& [idx, rewards] : slots) {
                const double mean =
                    std::accumulate(rewards.begin(), rewards.end(), 0.0) / rewards.size();
                curves << mode << "," << idx << "," << format_double(median(rewards)) << ","
                       << format_double(mean) << "\n";
            }
        }

        std::ofstream summary(results_dir / "summary.csv");
        summary << "agent_mode,trials,post_median_reward,post_last10_median,failed,"
                   "mean_principles_open,mean_principles_closed\n";
        std::cout << "agent_mode  trials  post_median  last10_median  failed  principles\n";
        std::map<std::string, int> failed_by_mode;
        for (const auto& [mode, trials] : trial_post) {
            std::vector<double> all_post, last10;
            int failed = 0;
            double open_sum = 0.0, closed_sum = 0.0;
            for (const auto& [tid, rewards] : trials) {
                all_post.insert(all_post.end(), rewards.begin(), rewards.end());
                const std::size_t n10 = std::min<std::size_t>(10, rewards.size());
                std::vector<double> tail(rewards.end() - n10, rewards.end());
                last10.insert(last10.end(), tail.begin(), tail.end());
                const std::string dom = rows.front().domain;
                if (dom == "mountaincar") {
                    for (double v : tail) {
                        if (v <= -500.0) {
                            ++failed;
                            break;
                        }
                    }
                } else if (dom == "cartpole") {
                    if (median(tail) < 150.0) ++failed;
                } else {
                    const double m =
                        std::accumulate(tail.begin(), tail.end(), 0.0) / tail.size();
                    if (m < 0.0) ++failed;
                }
                const auto counts = final_counts[mode][tid];
                open_sum += counts.first;
                closed_sum += counts.second;
            }
            failed_by_mode[mode] = failed;
            const double n_trials = static_cast<double>(trials.size());
            summary << mode << "," << trials.size() << "," << format_double(median(all_post))
                    << "," << format_double(median(last10)) << "," << failed << ","
                    << format_double(open_sum / n_trials) << ","
                    << format_double(closed_sum / n_trials) << "\n";
            std::ostringstream line;
            line << mode << "  " << trials.size() << "  " << median(all_post) << "  "
                 << median(last10) << "  " << failed << "  " << (open_sum + closed_sum) / n_trials;
            std::cout << line.str() << "\n";
        }
        if (failed_by_mode.count("napping") && failed_by_mode.count("frozen") &&
            failed_by_mode["frozen"] > 0) {
            const double reduction = 100.0 *
                                     (failed_by_mode["frozen"] - failed_by_mode["napping"]) /
                                     failed_by_mode["frozen"];
            std::cout << "failure reduction napping vs frozen: " << reduction << "%\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace napping
