#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

#include "napping/envs/mountaincar.hpp"
#include "napping/types.hpp"

namespace napping {

// Per-domain greedy transition scoring: eval maps (s, a, s') to a real score,
// thre is the acceptability bar below which a principle is created, sup the
// ceiling that closes a principle immediately.
struct EvalSpec {
    std::function<double(const Transition&)> eval;
    double thre = 0.0;
    std::optional<double> sup;
};

// 1 while the transition survives and the action is stabilizing, else 0.
// Stabilizing means the pole's angular acceleration opposes the current lean:
// when the pole tilts, a good push drives the pole back toward upright even
// though the angle itself keeps growing for a few steps. Near upright the lean
// is the angular drift instead, and a comfortably balanced state accepts any
// surviving action so working regions keep their confirming principles.
inline double eval_cartpole(const Transition& t) {
    if (t.s.size() != 4 || t.s_next.size() != 4) {
        throw std::invalid_argument("eval_cartpole: wrong observation length");
    }
    if (t.terminated && t.cause == TerminalCause::failure) return 0.0;
    const double dead_angle = 1.0 * 3.14159265358979323846 / 180.0;
    const double dead_rate = 0.2;
    const double theta = t.s[2];
    const double theta_dot = t.s[3];
    const double accel = t.s_next[3] - theta_dot;
    if (std::fabs(theta) > dead_angle) return accel * theta < 0.0 ? 1.0 : 0.0;
    if (std::fabs(theta_dot) > dead_rate) return accel * theta_dot < 0.0 ? 1.0 : 0.0;
    return 1.0;
}

// Pump alignment: an action is good when it pushes along the car's motion,
// which is exactly the swing-up principle and needs no knowledge of the
// (possibly shifted) force or gravity constants. While the car is moving the
// pre-step velocity is the reference — judging by the post-step velocity
// inverts the verdict on upswings that strong gravity reverses within one
// step. At a standstill the post-step velocity is the reference instead, so
// the score stays decisive at turning points and the left wall (where
// velocity resets to zero) penalizes pushing into it. The goal transition
// scores the sup sentinel 1000. A tiny epsilon is subtracted so the Stay
// action, whose alignment is exactly zero, lands below the acceptability bar:
// without it, principles can close permanently onto the no-op and the car
// idles at the valley floor.
inline double eval_mountaincar(const Transition& t) {
    if (t.s.size() != 2 || t.s_next.size() != 2) {
        throw std::invalid_argument("eval_mountaincar: wrong observation length");
    }
    if (t.cause == TerminalCause::goal) return 1000.0;
    const double standstill = 1e-3;
    const double direction = static_cast<double>(t.action - 1);
    const double v_ref = std::fabs(t.s[1]) > standstill ? t.s[1] : t.s_next[1];
    return direction * v_ref - 1e-9;
}

// 2 on crossing (sup), 1 for a safe row gained, 0 for safe non-progress,
// -1 on collision or timeout.
inline double eval_crossroad(const Transition& t) {
    if (t.s.size() != 18 || t.s_next.size() != 18) {
        throw std::invalid_argument("eval_crossroad: wrong observation length");
    }
    if (t.cause == TerminalCause::goal) return 2.0;
    if (t.cause == TerminalCause::failure || t.cause == TerminalCause::timeout) return -1.0;
    return t.s_next[1] < t.s[1] ? 1.0 : 0.0;
}

inline EvalSpec make_eval_spec(Domain d) {
    switch (d) {
        case Domain::cartpole: return {eval_cartpole, 1.0, 1.0};
        case Domain::mountaincar: return {eval_mountaincar, 0.0, 1000.0};
        case Domain::crossroad: return {eval_crossroad, 0.0, 2.0};
    }
    throw std::invalid_argument("unknown domain tag");
}

} // namespace napping
