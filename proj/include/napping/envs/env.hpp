#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "napping/envs/cartpole.hpp"
#include "napping/envs/crossroad.hpp"
#include "napping/envs/mountaincar.hpp"
#include "napping/rng.hpp"
#include "napping/types.hpp"

namespace napping {

using EnvParams = std::variant<CartPoleParams, MountainCarParams, CrossRoadParams>;

inline Domain domain_of(const EnvParams& p) {
    if (std::holds_alternative<CartPoleParams>(p)) return Domain::cartpole;
    if (std::holds_alternative<MountainCarParams>(p)) return Domain::mountaincar;
    return Domain::crossroad;
}

inline EnvParams default_params(Domain d) {
    switch (d) {
        case Domain::cartpole: return CartPoleParams{};
        case Domain::mountaincar: return MountainCarParams{};
        case Domain::crossroad: return CrossRoadParams{};
    }
    throw std::logic_error("bad domain tag");
}

inline int action_count(Domain d) {
    switch (d) {
        case Domain::cartpole: return 2;
        case Domain::mountaincar: return 3;
        case Domain::crossroad: return 5;
    }
    throw std::logic_error("bad domain tag");
}

inline int observation_dim(Domain d) {
    switch (d) {
        case Domain::cartpole: return 4;
        case Domain::mountaincar: return 2;
        case Domain::crossroad: return 18;
    }
    throw std::logic_error("bad domain tag");
}

// Single-owner simulator over one parameter set; holds the current episode
// state behind a uniform observation/step interface.
class Env {
public:
    explicit Env(EnvParams params) : params_(std::move(params)), domain_(domain_of(params_)) {}

    Domain domain() const { return domain_; }
    int action_count() const { return napping::action_count(domain_); }
    int obs_dim() const { return observation_dim(domain_); }
    const EnvParams& params() const { return params_; }

    std::vector<double> reset(Rng& rng) {
        terminated_ = false;
        switch (domain_) {
            case Domain::cartpole: cp_ = cartpole_reset(rng); break;
            case Domain::mountaincar: mc_ = mountaincar_reset(rng); break;
            case Domain::crossroad:
                cr_ = crossroad_reset(std::get<CrossRoadParams>(params_), rng);
                break;
        }
        return observation();
    }

    std::vector<double> observation() const {
        switch (domain_) {
            case Domain::cartpole: {
                auto o = cp_.observation();
                return {o.begin(), o.end()};
            }
            case Domain::mountaincar: {
                auto o = mc_.observation();
                return {o.begin(), o.end()};
            }
            case Domain::crossroad:
                return crossroad_observe(cr_, std::get<CrossRoadParams>(params_));
        }
        throw std::logic_error("bad domain tag");
    }

    StepResult step(int action) {
        if (terminated_) throw std::logic_error("step on a terminated episode");
        if (action < 0 || action >= action_count()) {
            throw std::invalid_argument("action index out of range");
        }
        StepResult out;
        switch (domain_) {
            case Domain::cartpole: {
                auto r = cartpole_step(cp_, static_cast<CartPoleAction>(action),
                                       std::get<CartPoleParams>(params_));
                cp_ = r.next;
                out.reward = r.reward;
                out.terminated = r.terminated;
                out.cause = r.cause;
                break;
            }
            case Domain::mountaincar: {
                auto r = mountaincar_step(mc_, static_cast<MountainCarAction>(action),
                                          std::get<MountainCarParams>(params_));
                mc_ = r.next;
                out.reward = r.reward;
                out.terminated = r.terminated;
                out.cause = r.cause;
                break;
            }
            case Domain::crossroad: {
                auto r = crossroad_step(cr_, static_cast<CrossRoadAction>(action),
                                        std::get<CrossRoadParams>(params_));
                cr_ = r.next;
                out.reward = r.reward;
                out.terminated = r.terminated;
                out.cause = r.cause;
                break;
            }
        }
        out.observation = observation();
        terminated_ = out.terminated;
        return out;
    }

    bool terminated() const { return terminated_; }

private:
    EnvParams params_;
    Domain domain_;
    bool terminated_ = false;
    CartPoleState cp_{};
    MountainCarState mc_{};
    CrossRoadState cr_{};
};

// ---- novelty sampling ------------------------------------------------------

// CartPole novelty: exactly one of the five physical parameters drawn
// uniformly from a sub-interval of its x0.1..x10 range. fraction selects the
// centered share of that interval: 1.0 = the full [0.1, 10] factor range,
// 0.5 = the middle half, i.e. factors in [2.575, 7.525].
inline CartPoleParams sample_cartpole_novelty(Rng& rng, double fraction = 1.0) {
    CartPoleParams p;
    const int which = rng.uniform_int(5);
    double* fields[5] = {&p.pole_length, &p.gravity, &p.mass_cart, &p.mass_pole, &p.force_mag};
    const double mid = (0.1 + 10.0) / 2.0;
    const double half = (10.0 - 0.1) / 2.0 * fraction;
    *fields[which] *= rng.uniform(mid - half, mid + half);
    return p;
}

inline MountainCarParams sample_mountaincar_novelty(Rng& rng) {
    MountainCarParams p;
    p.force = rng.uniform(0.0001, 0.02);
    p.gravity = rng.uniform(0.0001, 0.005);
    return p;
}

inline CrossRoadParams sample_crossroad_novelty(Rng& rng) {
    const auto base = static_cast<CrossRoadNovelty>(rng.uniform_int(kCrossRoadNoveltyCount));
    return apply_crossroad_novelty(base, rng);
}

inline EnvParams sample_novelty(Domain d, Rng& rng) {
    switch (d) {
        case Domain::cartpole: return sample_cartpole_novelty(rng);
        case Domain::mountaincar: return sample_mountaincar_novelty(rng);
        case Domain::crossroad: return sample_crossroad_novelty(rng);
    }
    throw std::invalid_argument("unknown domain tag");
}

// ---- JSON serialization of parameter sets ----------------------------------

inline nlohmann::json params_to_json(const EnvParams& p) {
    nlohmann::json j;
    j["domain"] = to_string(domain_of(p));
    if (const auto* cp = std::get_if<CartPoleParams>(&p)) {
        j["pole_length"] = cp->pole_length;
        j["gravity"] = cp->gravity;
        j["mass_cart"] = cp->mass_cart;
        j["mass_pole"] = cp->mass_pole;
        j["force_mag"] = cp->force_mag;
    } else if (const auto* mc = std::get_if<MountainCarParams>(&p)) {
        j["force"] = mc->force;
        j["gravity"] = mc->gravity;
    } else {
        const auto& cr = std::get<CrossRoadParams>(p);
        nlohmann::json cars = nlohmann::json::array();
        for (const auto& c : cr.cars) {
            cars.push_back({{"row", c.row}, {"speed", c.speed}, {"init_x", c.init_x}});
        }
        j["cars"] = cars;
    }
    return j;
}

inline EnvParams params_from_json(const nlohmann::json& j) {
    const Domain d = domain_from_string(j.at("domain").get<std::string>());
    switch (d) {
        case Domain::cartpole: {
            CartPoleParams p;
            p.pole_length = j.at("pole_length").get<double>();
            p.gravity = j.at("gravity").get<double>();
            p.mass_cart = j.at("mass_cart").get<double>();
            p.mass_pole = j.at("mass_pole").get<double>();
            p.force_mag = j.at("force_mag").get<double>();
            return p;
        }
        case Domain::mountaincar: {
            MountainCarParams p;
            p.force = j.at("force").get<double>();
            p.gravity = j.at("gravity").get<double>();
            return p;
        }
        case Domain::crossroad: {
            CrossRoadParams p;
            const auto& cars = j.at("cars");
            for (std::size_t i = 0; i < p.cars.size(); ++i) {
                p.cars[i].row = cars.at(i).at("row").get<int>();
                p.cars[i].speed = cars.at(i).at("speed").get<double>();
                p.cars[i].init_x = cars.at(i).at("init_x").get<double>();
            }
            return p;
        }
    }
    throw std::logic_error("bad domain tag");
}

} // namespace napping
