#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "napping/rng.hpp"
#include "napping/types.hpp"

namespace napping {

struct CarRow {
    int row = 0;        // grid row the car lives in (0 = top/goal row)
    double speed = 0.0; // signed cells per step
    double init_x = 0.0;
};

struct CrossRoadParams {
    int grid_width = 10;
    int grid_height = 10;
    // One car per road row. Rows 1..8; row 0 is the goal line, the bottom row
    // is the start line.
    std::array<CarRow, 8> cars = default_car_table();
    int max_steps = 100;
    // Per-reset jitter, on by default so the pre-novelty game cannot be solved
    // by replaying one memorized action string. The novelty sampler zeroes
    // these and instead bakes one +-1 cell / +-10% of speed_unit draw into the
    // car table, freezing each post-novelty trial to a fixed layout.
    double position_noise = 1.0;  // reset jitter on init_x, cells, +-
    double speed_noise_pct = 10.0; // reset jitter on speed, percent of speed_unit, +-
    double speed_unit = 1.0;      // cells per step

    // Speeds sit near one cell per step on purpose: an adjacent car reaches
    // the player in a single step, so surviving a row hinges on knowing which
    // way its traffic flows, which is exactly what the novelty bases change.
    static std::array<CarRow, 8> default_car_table() {
        return {{{1, 1.75, 0.0},
                 {2, -1.65, 3.0},
                 {3, 1.85, 6.0},
                 {4, -1.80, 9.0},
                 {5, 1.70, 2.0},
                 {6, -1.90, 5.0},
                 {7, 1.80, 8.0},
                 {8, -1.70, 1.0}}};
    }

    bool valid() const {
        if (grid_width < 3 || grid_height < 10 || max_steps <= 0) return false;
        for (const auto& c : cars) {
            if (c.row < 1 || c.row >= grid_height - 1) return false;
        }
        return true;
    }
};

struct CrossRoadState {
    int player_x = 0;
    int player_y = 0;
    std::array<double, 8> car_x{};    // continuous, wrapped into [0, width)
    std::array<double, 8> car_speed{}; // per-episode speeds (base + noise)
    int step_count = 0;
};

enum class CrossRoadAction { up = 0, down = 1, left = 2, right = 3, stay = 4 };

struct CrossRoadStepResult {
    CrossRoadState next;
    double reward = 0.0;
    bool terminated = false;
    TerminalCause cause = TerminalCause::none;
};

inline double wrap_x(double x, int width) {
    const double w = static_cast<double>(width);
    double r = std::fmod(x, w);
    if (r < 0) r += w;
    return r;
}

inline int car_cell(double x, int width) {
    const int c = static_cast<int>(std::llround(x));
    return ((c % width) + width) % width;
}

inline CrossRoadState crossroad_reset(const CrossRoadParams& p, Rng& rng) {
    CrossRoadState s;
    s.player_x = p.grid_width / 2;
    s.player_y = p.grid_height - 1;
    for (std::size_t i = 0; i < p.cars.size(); ++i) {
        s.car_x[i] = wrap_x(p.cars[i].init_x + rng.uniform(-p.position_noise, p.position_noise),
                            p.grid_width);
        s.car_speed[i] =
            p.cars[i].speed +
            rng.uniform(-p.speed_noise_pct, p.speed_noise_pct) / 100.0 * p.speed_unit;
    }
    return s;
}

// Player coordinates plus the eight adjacent cells in row-major order; an
// occupied cell reports its absolute (x, y), an empty or off-grid one the
// sentinel (-1, -1).
inline std::vector<double> crossroad_observe(const CrossRoadState& s, const CrossRoadParams& p) {
    std::vector<double> obs;
    obs.reserve(18);
    obs.push_back(static_cast<double>(s.player_x));
    obs.push_back(static_cast<double>(s.player_y));
    static constexpr int kOffsets[8][2] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                                           {1, 0},   {-1, 1}, {0, 1},  {1, 1}};
    for (const auto& off : kOffsets) {
        const int cx = s.player_x + off[0];
        const int cy = s.player_y + off[1];
        bool occupied = false;
        if (cx >= 0 && cx < p.grid_width && cy >= 0 && cy < p.grid_height) {
            for (std::size_t i = 0; i < p.cars.size(); ++i) {
                if (p.cars[i].row == cy && car_cell(s.car_x[i], p.grid_width) == cx) {
                    occupied = true;
                    break;
                }
            }
        }
        if (occupied) {
            obs.push_back(static_cast<double>(cx));
            obs.push_back(static_cast<double>(cy));
        } else {
            obs.push_back(-1.0);
            obs.push_back(-1.0);
        }
    }
    return obs;
}

inline CrossRoadStepResult crossroad_step(const CrossRoadState& state, CrossRoadAction action,
                                          const CrossRoadParams& p) {
    if (state.player_x < 0 || state.player_x >= p.grid_width || state.player_y < 0 ||
        state.player_y >= p.grid_height) {
        throw std::invalid_argument("crossroad: player outside the grid");
    }
    CrossRoadStepResult r;
    r.next = state;

    int dx = 0, dy = 0;
    switch (action) {
        case CrossRoadAction::up: dy = -1; break;
        case CrossRoadAction::down: dy = 1; break;
        case CrossRoadAction::left: dx = -1; break;
        case CrossRoadAction::right: dx = 1; break;
        case CrossRoadAction::stay: break;
    }
    r.next.player_x = std::min(std::max(state.player_x + dx, 0), p.grid_width - 1);
    r.next.player_y = std::min(std::max(state.player_y + dy, 0), p.grid_height - 1);

    for (std::size_t i = 0; i < p.cars.size(); ++i) {
        r.next.car_x[i] = wrap_x(state.car_x[i] + state.car_speed[i], p.grid_width);
    }
    r.next.step_count = state.step_count + 1;

    if (r.next.player_y == 0) {
        r.reward = 1.0;
        r.terminated = true;
        r.cause = TerminalCause::goal;
        return r;
    }
    for (std::size_t i = 0; i < p.cars.size(); ++i) {
        if (p.cars[i].row != r.next.player_y) continue;
        // A car hits the player if its swept span this step covers the
        // player's cell: fast cars cannot be slipped through between frames.
        const double from = state.car_x[i];
        const double speed = state.car_speed[i];
        const double steps = std::fabs(speed);
        bool hit = car_cell(r.next.car_x[i], p.grid_width) == r.next.player_x;
        for (int k = 0; !hit && k <= static_cast<int>(steps); ++k) {
            const double x = from + (speed < 0 ? -1.0 : 1.0) * std::min<double>(k, steps);
            hit = car_cell(wrap_x(x, p.grid_width), p.grid_width) == r.next.player_x;
        }
        if (hit) {
            r.reward = -1.0;
            r.terminated = true;
            r.cause = TerminalCause::failure;
            return r;
        }
    }
    if (r.next.step_count >= p.max_steps) {
        r.reward = -1.0;
        r.terminated = true;
        r.cause = TerminalCause::timeout;
    }
    return r;
}

enum class CrossRoadNovelty {
    super_slow = 0,
    super_fast,
    new_speeds,
    opposite_direction,
    all_left,
    all_right,
    shift_speeds,
    reverse_cars,
};

inline constexpr int kCrossRoadNoveltyCount = 8;

inline std::string to_string(CrossRoadNovelty n) {
    switch (n) {
        case CrossRoadNovelty::super_slow: return "super_slow";
        case CrossRoadNovelty::super_fast: return "super_fast";
        case CrossRoadNovelty::new_speeds: return "new_speeds";
        case CrossRoadNovelty::opposite_direction: return "opposite_direction";
        case CrossRoadNovelty::all_left: return "all_left";
        case CrossRoadNovelty::all_right: return "all_right";
        case CrossRoadNovelty::shift_speeds: return "shift_speeds";
        case CrossRoadNovelty::reverse_cars: return "reverse_cars";
    }
    throw std::logic_error("bad crossroad novelty tag");
}

// Applies one of the eight novelty bases to the default car table, then bakes
// per-trial jitter into the table: +-1 cell on each initial position and
// +-10% of the speed unit on each speed, so every trial sees a distinct but
// fixed novel layout.
inline CrossRoadParams apply_crossroad_novelty(CrossRoadNovelty base, Rng& rng) {
    CrossRoadParams p;
    auto& cars = p.cars;
    switch (base) {
        case CrossRoadNovelty::super_slow:
            for (auto& c : cars) c.speed *= 0.25;
            break;
        case CrossRoadNovelty::super_fast:
            for (auto& c : cars) c.speed *= 2.5;
            break;
        case CrossRoadNovelty::new_speeds:
            for (auto& c : cars) {
                const double dir = c.speed < 0 ? -1.0 : 1.0;
                c.speed = dir * rng.uniform(0.2, 1.2);
            }
            break;
        case CrossRoadNovelty::opposite_direction:
            for (auto& c : cars) c.speed = -c.speed;
            break;
        case CrossRoadNovelty::all_left:
            for (auto& c : cars) c.speed = -std::fabs(c.speed);
            break;
        case CrossRoadNovelty::all_right:
            for (auto& c : cars) c.speed = std::fabs(c.speed);
            break;
        case CrossRoadNovelty::shift_speeds: {
            const double last = cars.back().speed;
            for (std::size_t i = cars.size() - 1; i > 0; --i) cars[i].speed = cars[i - 1].speed;
            cars[0].speed = last;
            break;
        }
        case CrossRoadNovelty::reverse_cars: {
            auto base_cars = CrossRoadParams::default_car_table();
            for (std::size_t i = 0; i < cars.size(); ++i) {
                cars[i].speed = base_cars[cars.size() - 1 - i].speed;
                cars[i].init_x = base_cars[cars.size() - 1 - i].init_x;
            }
            break;
        }
    }
    for (auto& c : cars) {
        c.init_x = wrap_x(c.init_x + rng.uniform(-1.0, 1.0), p.grid_width);
        c.speed += rng.uniform(-10.0, 10.0) / 100.0 * p.speed_unit;
    }
    // The trial-level draw above is the only noise a post-novelty environment
    // carries; every episode of the trial replays the same layout.
    p.position_noise = 0.0;
    p.speed_noise_pct = 0.0;
    return p;
}

} // namespace napping
