#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "napping/rng.hpp"
#include "napping/types.hpp"

namespace napping {

struct MountainCarParams {
    double force = 0.001;
    double gravity = 0.0025;
    double x_min = -1.2;
    double x_max = 0.6;
    double v_max = 0.07;
    double goal_x = 0.5;
    int max_steps = 500;

    bool valid() const {
        return force > 0 && gravity > 0 && x_min < x_max && v_max > 0 && max_steps > 0;
    }
};

struct MountainCarState {
    double x = -0.5;
    double v = 0.0;
    int step_count = 0;

    std::array<double, 2> observation() const { return {x, v}; }
};

enum class MountainCarAction { backward = 0, stay = 1, forward = 2 };

struct MountainCarStepResult {
    MountainCarState next;
    double reward = 0.0;
    bool terminated = false;
    TerminalCause cause = TerminalCause::none;
};

inline MountainCarStepResult mountaincar_step(const MountainCarState& state,
                                              MountainCarAction action,
                                              const MountainCarParams& p) {
    if (!std::isfinite(state.x) || !std::isfinite(state.v)) {
        throw std::invalid_argument("mountaincar: non-finite state component");
    }
    const double dir = static_cast<double>(static_cast<int>(action) - 1);

    MountainCarStepResult r;
    r.next.v = std::clamp(state.v + dir * p.force - p.gravity * std::cos(3.0 * state.x),
                          -p.v_max, p.v_max);
    r.next.x = std::clamp(state.x + r.next.v, p.x_min, p.x_max);
    if (r.next.x <= p.x_min && r.next.v < 0.0) r.next.v = 0.0;
    r.next.step_count = state.step_count + 1;
    r.reward = -1.0;

    if (r.next.x >= p.goal_x) {
        r.terminated = true;
        r.cause = TerminalCause::goal;
    } else if (r.next.step_count >= p.max_steps) {
        r.terminated = true;
        r.cause = TerminalCause::timeout;
    }
    return r;
}

inline MountainCarState mountaincar_reset(Rng& rng) {
    MountainCarState s;
    s.x = rng.uniform(-0.6, -0.4);
    s.v = 0.0;
    return s;
}

} // namespace napping
