#pragma once

#include <algorithm>
#include <compare>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "napping/core/eval.hpp"
#include "napping/policy/mlp.hpp"
#include "napping/rng.hpp"
#include "napping/types.hpp"

namespace napping {

struct PrincipleKey {
    int anchor_id = 0;
    int baseline_action = 0;
    auto operator<=>(const PrincipleKey&) const = default;
};

struct AdaptationPrinciple {
    std::vector<int> candidates; // ordered, never empty, only ever shrinks
    std::set<int> tested;

    bool closed() const { return candidates.size() == 1; }
};

// Anchor set (Voronoi sites in model-state space) plus the per-(anchor,
// baseline-action) principles and their best-score map. A pure state machine:
// identical (ms, a_agent, a_ap, score) sequences rebuild identical stores.
class PrincipleStore {
public:
    explicit PrincipleStore(int action_count) : action_count_(action_count) {
        if (action_count < 2) throw std::invalid_argument("need at least two actions");
    }

    int action_count() const { return action_count_; }
    bool empty() const { return principles_.empty(); }
    const std::vector<std::vector<double>>& anchors() const { return anchors_; }
    const std::map<PrincipleKey, AdaptationPrinciple>& principles() const { return principles_; }
    const std::map<PrincipleKey, double>& best_scores() const { return best_scores_; }
    long uncovered_case_count() const { return uncovered_case_count_; }

    int open_count() const {
        int n = 0;
        for (const auto& [k, p] : principles_) n += p.closed() ? 0 : 1;
        return n;
    }
    int closed_count() const {
        int n = 0;
        for (const auto& [k, p] : principles_) n += p.closed() ? 1 : 0;
        return n;
    }

    // Index of the Euclidean-nearest anchor; ties break to the lowest index.
    int nearest_anchor(std::span<const double> ms) const {
        if (anchors_.empty()) throw std::logic_error("nearest_anchor on an empty anchor set");
        check_dim(ms);
        int best = 0;
        double best_d = squared_distance(anchors_[0], ms);
        // Ties go to the newest anchor so a principle spawned after a closed
        // one failed at this exact model state takes precedence over it.
        for (int i = 1; i < static_cast<int>(anchors_.size()); ++i) {
            const double d = squared_distance(anchors_[i], ms);
            if (d <= best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

    // Adaptation-principle action selection: the baseline action unless the
    // model state resolves to a known principle.
    int select(std::span<const double> ms, int a_agent, Rng& rng) const {
        if (principles_.empty()) return a_agent;
        const int aid = nearest_anchor(ms);
        const auto it = principles_.find({aid, a_agent});
        if (it == principles_.end()) return a_agent;
        const auto& p = it->second;
        if (p.closed()) return p.candidates.front();
        return p.candidates[rng.uniform_int(static_cast<int>(p.candidates.size()))];
    }

    // Principle update after the a_ap transition scored `score`.
    void update(std::span<const double> ms, int a_agent, int a_ap, double score,
                const EvalSpec& spec) {
        check_action(a_agent);
        check_action(a_ap);
        if (anchors_.empty()) {
            // A successful action needs no principle: the baseline still
            // works here, and the fallback in select() already picks it.
            // Anchors are added only where an action scored below thre.
            if (score < spec.thre) create_principle(ms, a_agent, a_ap, score);
            return;
        }
        const int aid = nearest_anchor(ms);
        const PrincipleKey key{aid, a_agent};
        const auto it = principles_.find(key);
        if (it == principles_.end()) {
            if (score < spec.thre) create_principle(ms, a_agent, a_ap, score);
            return;
        }

        AdaptationPrinciple& p = it->second;
        double& best = best_scores_.at(key);
        p.tested.insert(a_ap);
        const bool open = !p.closed();

        if (spec.sup && score == *spec.sup) {
            if (open) {
                p.candidates.assign(1, a_ap);
                best = score;
            }
        } else if (score > best) {
            if (open) {
                remove_tested_except(p, a_ap);
                best = score;
            }
        } else if (score == best && score >= spec.thre) {
            if (open) {
                remove_tested_except(p, a_ap);
                best = score;
            }
        } else if (score == best && score < spec.thre) {
            if (open) {
                remove_candidate(p, a_ap);
            } else {
                // Same treatment as the strictly-worse case below: a closed
                // principle stuck at a sub-threshold score has failed here,
                // and doing nothing would leave it locked in forever.
                create_principle(ms, a_agent, a_ap, score);
            }
        } else if (score < best && score < spec.thre) {
            if (open) {
                remove_candidate(p, a_ap);
            } else {
                // A learned principle failed here: keep it, open a fresh one
                // anchored at this model state.
                create_principle(ms, a_agent, a_ap, score);
            }
        } else {
            // score < best but still above threshold; the pseudocode has no
            // branch for this, so leave the principle untouched and count it.
            ++uncovered_case_count_;
        }
    }

    void update(std::span<const double> ms, int a_agent, int a_ap, const Transition& t,
                const EvalSpec& spec) {
        update(ms, a_agent, a_ap, spec.eval(t), spec);
    }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
        out << "napping-store v1\n";
        out << "action_count " << action_count_ << "\n";
        out << "anchors " << anchors_.size() << "\n";
        for (const auto& a : anchors_) {
            for (std::size_t i = 0; i < a.size(); ++i) out << (i ? " " : "") << format_double(a[i]);
            out << "\n";
        }
        out << "principles " << principles_.size() << "\n";
        for (const auto& [k, p] : principles_) {
            out << "anchor=" << k.anchor_id << " action=" << k.baseline_action
                << " status=" << (p.closed() ? "closed" : "open")
                << " best=" << format_double(best_scores_.at(k)) << " candidates=";
            for (std::size_t i = 0; i < p.candidates.size(); ++i) {
                out << (i ? "," : "") << p.candidates[i];
            }
            out << " tested=";
            bool first = true;
            for (int a : p.tested) {
                out << (first ? "" : ",") << a;
                first = false;
            }
            out << "\n";
        }
    }

private:
    void check_action(int a) const {
        if (a < 0 || a >= action_count_) throw std::invalid_argument("action index out of range");
    }

    void check_dim(std::span<const double> ms) const {
        if (!anchors_.empty() && ms.size() != anchors_.front().size()) {
            throw std::invalid_argument("model-state dimension mismatch");
        }
    }

    static double squared_distance(const std::vector<double>& a, std::span<const double> b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double d = a[i] - b[i];
            acc += d * d;
        }
        return acc;
    }

    // Called only for sub-threshold scores: open a principle that excludes
    // the action that just failed. When a closed principle fails and spawns
    // this principle, a_ap is that principle's action, not the baseline's,
    // and the baseline action stays available.
    void create_principle(std::span<const double> ms, int a_agent, int a_ap, double score) {
        check_dim(ms);
        anchors_.emplace_back(ms.begin(), ms.end());
        const PrincipleKey key{static_cast<int>(anchors_.size()) - 1, a_agent};
        AdaptationPrinciple p;
        for (int a = 0; a < action_count_; ++a) {
            if (a != a_ap) p.candidates.push_back(a);
        }
        p.tested.insert(a_ap);
        principles_.emplace(key, std::move(p));
        best_scores_[key] = score;
    }

    static void remove_tested_except(AdaptationPrinciple& p, int keep) {
        std::erase_if(p.candidates,
                      [&](int a) { return a != keep && p.tested.count(a) > 0; });
        if (p.candidates.empty()) throw std::logic_error("candidate set emptied");
    }

    static void remove_candidate(AdaptationPrinciple& p, int a) {
        if (p.candidates.size() <= 1) throw std::logic_error("removing the last candidate");
        std::erase(p.candidates, a);
        if (p.candidates.empty()) throw std::logic_error("candidate set emptied");
    }

    int action_count_;
    std::vector<std::vector<double>> anchors_;
    std::map<PrincipleKey, AdaptationPrinciple> principles_;
    std::map<PrincipleKey, double> best_scores_;
    long uncovered_case_count_ = 0;
};

} // namespace napping
