#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "napping/rng.hpp"
#include "napping/types.hpp"

namespace napping {

inline constexpr double kPi = 3.14159265358979323846;

struct CartPoleParams {
    double pole_length = 0.5; // effective half-length used by the dynamics
    double gravity = 9.8;
    double mass_cart = 1.0;
    double mass_pole = 0.1;
    double force_mag = 10.0;
    double tau = 0.02;
    double angle_limit = 12.0 * kPi / 180.0;
    double x_limit = 2.4;
    int max_steps = 200;

    bool valid() const {
        return pole_length > 0 && gravity > 0 && mass_cart > 0 && mass_pole > 0 &&
               force_mag > 0 && tau > 0 && angle_limit > 0 && x_limit > 0 && max_steps > 0;
    }
};

struct CartPoleState {
    double x = 0.0;
    double x_dot = 0.0;
    double theta = 0.0;
    double theta_dot = 0.0;
    int step_count = 0;

    std::array<double, 4> observation() const { return {x, x_dot, theta, theta_dot}; }
};

enum class CartPoleAction { left = 0, right = 1 };

struct CartPoleStepResult {
    CartPoleState next;
    double reward = 0.0;
    bool terminated = false;
    TerminalCause cause = TerminalCause::none;
};

inline void check_finite_cartpole(const CartPoleState& s) {
    if (!std::isfinite(s.x) || !std::isfinite(s.x_dot) || !std::isfinite(s.theta) ||
        !std::isfinite(s.theta_dot)) {
        throw std::invalid_argument("cartpole: non-finite state component");
    }
}

// Classic cart-pole dynamics (Barto/Sutton/Anderson form), explicit Euler.
inline CartPoleStepResult cartpole_step(const CartPoleState& state, CartPoleAction action,
                                        const CartPoleParams& p) {
    check_finite_cartpole(state);
    const double force = (action == CartPoleAction::right) ? p.force_mag : -p.force_mag;
    const double total_mass = p.mass_cart + p.mass_pole;
    const double polemass_length = p.mass_pole * p.pole_length;
    const double cth = std::cos(state.theta);
    const double sth = std::sin(state.theta);

    const double temp =
        (force + polemass_length * state.theta_dot * state.theta_dot * sth) / total_mass;
    const double theta_acc = (p.gravity * sth - cth * temp) /
                             (p.pole_length * (4.0 / 3.0 - p.mass_pole * cth * cth / total_mass));
    const double x_acc = temp - polemass_length * theta_acc * cth / total_mass;

    CartPoleStepResult r;
    r.next.x = state.x + p.tau * state.x_dot;
    r.next.x_dot = state.x_dot + p.tau * x_acc;
    r.next.theta = state.theta + p.tau * state.theta_dot;
    r.next.theta_dot = state.theta_dot + p.tau * theta_acc;
    r.next.step_count = state.step_count + 1;
    r.reward = 1.0;

    if (std::fabs(r.next.theta) > p.angle_limit || std::fabs(r.next.x) > p.x_limit) {
        r.terminated = true;
        r.cause = TerminalCause::failure;
    } else if (r.next.step_count >= p.max_steps) {
        r.terminated = true;
        r.cause = TerminalCause::timeout;
    }
    return r;
}

inline CartPoleState cartpole_reset(Rng& rng) {
    CartPoleState s;
    s.x = rng.uniform(-0.05, 0.05);
    s.x_dot = rng.uniform(-0.05, 0.05);
    s.theta = rng.uniform(-0.05, 0.05);
    s.theta_dot = rng.uniform(-0.05, 0.05);
    return s;
}

} // namespace napping
