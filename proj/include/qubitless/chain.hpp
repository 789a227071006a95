// chain.hpp - physical parameters of a spin-1/2 Heisenberg chain

#pragma once

#include <cmath>
#include <cstddef>
#include <iostream>
#include <string>
#include <vector>

#include "qubitless/errors.hpp"

namespace qubitless {

inline constexpr std::size_t kDefaultMaxLength = 12;

// All frequencies are angular frequencies with hbar = 1. The coupling J is
// the natural unit; nothing here enforces J = 1.
struct ChainConfig {
    std::size_t length{2};
    double coupling{1.0};          // J
    std::vector<double> larmor{};  // omega_k, one per spin
    double rabi{0.1};              // base Rabi frequency Omega

    std::size_t dimension() const { return std::size_t{1} << length; }

    bool uniform_field() const {
        for (double w : larmor)
            if (w != larmor.front()) return false;
        return true;
    }

    bool operator==(const ChainConfig&) const = default;
};

// omega_k = omega0 + k * delta_omega
inline ChainConfig linear_gradient(std::size_t length, double coupling, double omega0,
                                   double delta_omega, double rabi) {
    ChainConfig cfg;
    cfg.length = length;
    cfg.coupling = coupling;
    cfg.rabi = rabi;
    cfg.larmor.reserve(length);
    for (std::size_t k = 0; k < length; ++k)
        cfg.larmor.push_back(omega0 + static_cast<double>(k) * delta_omega);
    return cfg;
}

inline ChainConfig two_spin(double coupling, double omega0, double omega1, double rabi = 0.1) {
    return ChainConfig{2, coupling, {omega0, omega1}, rabi};
}

// Structural checks only: enough to build a Hamiltonian. J = 0 and a zero
// field are legal here (they give trivial operators).
inline void check_shape(const ChainConfig& cfg, std::size_t max_length = kDefaultMaxLength) {
    if (cfg.length < 2) throw ConfigError("chain length must be at least 2");
    if (cfg.length > max_length)
        throw DimensionOverflow("chain length " + std::to_string(cfg.length) +
                                " exceeds the dense cap of " + std::to_string(max_length));
    if (cfg.larmor.size() != cfg.length)
        throw ConfigError("expected " + std::to_string(cfg.length) + " Larmor frequencies, got " +
                          std::to_string(cfg.larmor.size()));
    if (!std::isfinite(cfg.coupling)) throw ConfigError("coupling J must be finite");
    for (double w : cfg.larmor)
        if (!std::isfinite(w)) throw ConfigError("Larmor frequencies must be finite");
}

// Throws ConfigError on hard violations. A non-monotone field only warns:
// it is a legal Hamiltonian, it just loses universal access.
inline void validate(const ChainConfig& cfg, std::size_t max_length = kDefaultMaxLength,
                     std::ostream* warnings = &std::cerr) {
    check_shape(cfg, max_length);
    if (!(cfg.coupling > 0.0)) throw ConfigError("coupling J must be positive");
    if (!std::isfinite(cfg.rabi) || !(cfg.rabi > 0.0))
        throw ConfigError("Rabi frequency must be finite and positive");

    if (warnings) {
        bool increasing = true, decreasing = true;
        for (std::size_t k = 1; k < cfg.length; ++k) {
            increasing = increasing && cfg.larmor[k] > cfg.larmor[k - 1];
            decreasing = decreasing && cfg.larmor[k] < cfg.larmor[k - 1];
        }
        if (!increasing && !decreasing)
            *warnings << "warning: Larmor frequencies are not strictly monotone; "
                         "not every level is guaranteed to be reachable\n";
    }
}

} // namespace qubitless
