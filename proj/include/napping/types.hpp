#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace napping {

enum class Domain { cartpole, mountaincar, crossroad };

inline std::string to_string(Domain d) {
    switch (d) {
        case Domain::cartpole: return "cartpole";
        case Domain::mountaincar: return "mountaincar";
        case Domain::crossroad: return "crossroad";
    }
    throw std::logic_error("bad domain tag");
}

inline Domain domain_from_string(const std::string& s) {
    if (s == "cartpole") return Domain::cartpole;
    if (s == "mountaincar") return Domain::mountaincar;
    if (s == "crossroad") return Domain::crossroad;
    throw std::invalid_argument("unknown domain: " + s);
}

enum class TerminalCause { none, goal, failure, timeout };

inline std::string to_string(TerminalCause c) {
    switch (c) {
        case TerminalCause::none: return "none";
        case TerminalCause::goal: return "goal";
        case TerminalCause::failure: return "failure";
        case TerminalCause::timeout: return "timeout";
    }
    throw std::logic_error("bad terminal cause");
}

// One environment transition as seen by the agent.
struct StepResult {
    std::vector<double> observation;
    double reward = 0.0;
    bool terminated = false;
    TerminalCause cause = TerminalCause::none;
};

// (s, a, s') plus the outcome flags; the unit the Eval functions score.
struct Transition {
    std::vector<double> s;
    int action = 0;
    std::vector<double> s_next;
    double reward = 0.0;
    bool terminated = false;
    TerminalCause cause = TerminalCause::none;
};

} // namespace napping
