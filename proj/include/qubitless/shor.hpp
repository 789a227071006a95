// shor.hpp - the 41-pulse period-finding program for N = 4 on four spins.
//
// Labels read x1 x0 y1 y0 (bits 3..0). Stage 1 spreads the x register,
// stage 2 writes y = 3^x mod 4, stage 3 applies the two-qubit DFT to x as
// A(x1), B(x1, x0), A(x0).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "qubitless/chain.hpp"
#include "qubitless/dynamics.hpp"
#include "qubitless/errors.hpp"
#include "qubitless/gates.hpp"
#include "qubitless/pulse.hpp"
#include "qubitless/spectrum.hpp"
#include "qubitless/state.hpp"

namespace qubitless {

inline constexpr std::size_t kShorLength = 4;
inline constexpr double kStageTolerance = 1e-9;

inline ChainConfig shor_default_config() { return linear_gradient(4, 30.0, 100.0, 30.0, 0.5); }

// Free choices left open by the gate-level description: the intermediate
// level of each two-flip modular-exponentiation path, and the order of
// commuting pulses inside each stage. Orders only change the off-resonant
// error, never the rwa action.
struct ShorLayout {
    Label path_x1{0b0101};  // |01,00> -> path -> |01,11>
    Label path_x3{0b1101};  // |11,00> -> path -> |11,11>
    // indices into {0-1, 4-p1, p1-7, 8-9, 12-p3, p3-15}
    std::array<int, 6> modexp_order{0, 1, 2, 3, 4, 5};
    // indices into the eight spectator configurations of A(x1) and A(x0),
    // in ascending label order of the lower level
    std::array<int, 8> a1_order{0, 1, 2, 3, 4, 5, 6, 7};
    std::array<int, 8> a0_order{0, 1, 2, 3, 4, 5, 6, 7};
    // y value driven by each of the 16 B pulses; each y appears four times
    std::array<int, 16> b_order{0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3};
    // per-y phase pattern for the four pi-pulses, see b_phases()
    std::array<int, 4> b_pattern{0, 0, 0, 0};

    bool operator==(const ShorLayout&) const = default;
};

// Phases of the four pi-pulses realizing the conditional phase phi on one
// driven pair. Each satisfies (p2 - p1) + (p4 - p3) = -phi / 2.
inline std::array<double, 4> b_phases(int pattern, double phi) {
    switch (pattern) {
    case 0: return {0.0, -0.25 * phi, 0.0, -0.25 * phi};
    case 1: return {0.0, 0.0, 0.0, -0.5 * phi};
    case 2: return {0.0, -0.5 * phi, 0.0, 0.0};
    }
    throw ConfigError("unknown B phase pattern " + std::to_string(pattern));
}

// Ordering found by a stochastic search over the free choices above,
// minimizing the exact-engine error at J=30, omega0=100, dw=30, Omega=0.5.
inline ShorLayout optimized_shor_layout() {
    ShorLayout l;
    l.path_x1 = 0b0110;
    l.path_x3 = 0b1101;
    l.modexp_order = {1, 3, 4, 0, 5, 2};
    l.a1_order = {1, 2, 0, 3, 4, 7, 5, 6};
    l.b_order = {3, 2, 1, 0, 0, 2, 1, 0, 2, 3, 3, 2, 1, 1, 0, 3};
    l.a0_order = {2, 5, 6, 3, 1, 7, 4, 0};
    l.b_pattern = {1, 1, 1, 0};
    return l;
}

template <std::size_t N>
inline void check_permutation(const std::array<int, N>& order, const char* what) {
    std::array<int, N> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < N; ++i)
        if (sorted[i] != static_cast<int>(i)) throw ConfigError(std::string(what) + " is not a permutation");
}

inline void validate(const ShorLayout& l) {
    if (l.path_x1 != 0b0101 && l.path_x1 != 0b0110) throw ConfigError("path for x=1 must pass through 0101 or 0110");
    if (l.path_x3 != 0b1101 && l.path_x3 != 0b1110) throw ConfigError("path for x=3 must pass through 1101 or 1110");
    check_permutation(l.modexp_order, "modexp order");
    check_permutation(l.a1_order, "A(x1) order");
    check_permutation(l.a0_order, "A(x0) order");
    auto pos = [&](int v) { return std::find(l.modexp_order.begin(), l.modexp_order.end(), v) - l.modexp_order.begin(); };
    if (pos(1) > pos(2) || pos(4) > pos(5)) throw ConfigError("two-flip paths must be driven in order");
    std::array<int, 4> count{};
    for (int y : l.b_order) {
        if (y < 0 || y > 3) throw ConfigError("B order entries must lie in 0..3");
        ++count[static_cast<std::size_t>(y)];
    }
    for (int c : count)
        if (c != 4) throw ConfigError("each y value must be driven by exactly four B pulses");
    for (int p : l.b_pattern) b_phases(p, 1.0);
}

struct ShorProgram {
    PulseSequence stage1;
    PulseSequence stage2;
    PulseSequence stage3;
    std::array<Matrix, 3> ideal;  // gate-level unitary of each stage, label basis
    ShorLayout layout;

    PulseSequence sequence() const {
        PulseSequence all;
        all.extend(stage1);
        all.extend(stage2);
        all.extend(stage3);
        return all;
    }
    std::size_t size() const { return stage1.size() + stage2.size() + stage3.size(); }
};

inline void require_shor_chain(const Spectrum& spec) {
    if (spec.length != kShorLength) throw ConfigError("the Shor program needs a four-spin chain");
}

inline PulseSequence build_superposition(const Spectrum& spec, const TransitionTable& table, double rabi) {
    require_shor_chain(spec);
    const double half = std::numbers::pi / 2;
    PulseSequence seq;
    seq.append(make_pulse(spec, table, 0b0000, 0b0100, half, 0.0, rabi));
    seq.append(make_pulse(spec, table, 0b0000, 0b1000, half, 0.0, rabi));
    seq.append(make_pulse(spec, table, 0b0100, 0b1100, half, 0.0, rabi));
    return seq;
}

inline std::array<std::pair<Label, Label>, 6> modexp_moves(const ShorLayout& l) {
    return {{{0b0000, 0b0001},
             {0b0100, l.path_x1},
             {l.path_x1, 0b0111},
             {0b1000, 0b1001},
             {0b1100, l.path_x3},
             {l.path_x3, 0b1111}}};
}

inline PulseSequence build_modexp(const Spectrum& spec, const TransitionTable& table, double rabi,
                                  const ShorLayout& layout = {}) {
    require_shor_chain(spec);
    validate(layout);
    const auto moves = modexp_moves(layout);
    PulseSequence seq;
    for (int i : layout.modexp_order) {
        const auto [a, b] = moves[static_cast<std::size_t>(i)];
        seq.append(make_pulse(spec, table, a, b, std::numbers::pi, 0.0, rabi));
    }
    return seq;
}

inline constexpr double kDftPhaseA = std::numbers::pi;
inline constexpr double kDftPhaseB = std::numbers::pi / 2;

inline PulseSequence build_dft_pulses(const Spectrum& spec, const TransitionTable& table, double rabi,
                                      const ShorLayout& layout) {
    require_shor_chain(spec);
    validate(layout);
    const double half = std::numbers::pi / 2;
    auto spectators = [](Label bit) {
        std::vector<Label> s;
        for (Label x = 0; x < 16; ++x)
            if (!(x & bit)) s.push_back(x);
        return s;
    };
    PulseSequence seq;
    const auto s1 = spectators(0b1000);
    for (int i : layout.a1_order) {
        const Label s = s1[static_cast<std::size_t>(i)];
        seq.append(make_pulse(spec, table, s, s | 0b1000, half, kDftPhaseA, rabi));
    }
    std::array<int, 4> seen{};
    for (int y : layout.b_order) {
        const auto yy = static_cast<std::size_t>(y);
        const double phase = b_phases(layout.b_pattern[yy], kDftPhaseB)[static_cast<std::size_t>(seen[yy]++)];
        const Label lower = 0b1000 | static_cast<Label>(y);
        seq.append(make_pulse(spec, table, lower, lower | 0b0100, std::numbers::pi, phase, rabi));
    }
    const auto s0 = spectators(0b0100);
    for (int i : layout.a0_order) {
        const Label s = s0[static_cast<std::size_t>(i)];
        seq.append(make_pulse(spec, table, s, s | 0b0100, half, kDftPhaseA, rabi));
    }
    return seq;
}

// --- ideal gate-level stage unitaries ---

inline Matrix ideal_superposition() {
    const double half = std::numbers::pi / 2;
    return transition_rotation_matrix(4, 0b0100, 0b1100, half, 0.0) *
           transition_rotation_matrix(4, 0b0000, 0b1000, half, 0.0) *
           transition_rotation_matrix(4, 0b0000, 0b0100, half, 0.0);
}

inline Matrix ideal_modexp(const ShorLayout& layout) {
    const auto moves = modexp_moves(layout);
    Matrix u = Matrix::Identity(16, 16);
    for (int i : layout.modexp_order) {
        const auto [a, b] = moves[static_cast<std::size_t>(i)];
        u = transition_rotation_matrix(4, a, b, std::numbers::pi, 0.0) * u;
    }
    return u;
}

// A(x0) B A(x1) with B = controlled phase pi/2 and the local phase
// diag(1, e^{-i pi/4}) on x1 (see ConditionalPhaseGate).
inline Matrix ideal_dft() {
    const double half = std::numbers::pi / 2;
    const Matrix a1 = ideal_matrix(RotationGate{3, half, kDftPhaseA}, 4);
    const Matrix b = ideal_matrix(ConditionalPhaseGate{3, 2, kDftPhaseB}, 4);
    const Matrix a0 = ideal_matrix(RotationGate{2, half, kDftPhaseA}, 4);
    return a0 * b * a1;
}

inline void check_stage(const Dynamics& dyn, const PulseSequence& seq, const Matrix& ideal, const char* name) {
    const double err = (rwa_action(dyn, seq) - ideal).cwiseAbs().maxCoeff();
    if (!(err <= kStageTolerance))
        throw DecompositionMismatch(std::string(name) + " deviates from its ideal unitary by " + format_double(err));
}

inline PulseSequence build_dft(const Dynamics& dyn, double rabi, const ShorLayout& layout = {}) {
    PulseSequence seq = build_dft_pulses(dyn.spectrum(), dyn.table(), rabi, layout);
    check_stage(dyn, seq, ideal_dft(), "DFT stage");
    return seq;
}

inline ShorProgram build_shor_program(const Dynamics& dyn, double rabi, const ShorLayout& layout) {
    ShorProgram prog;
    prog.layout = layout;
    prog.stage1 = build_superposition(dyn.spectrum(), dyn.table(), rabi);
    prog.stage2 = build_modexp(dyn.spectrum(), dyn.table(), rabi, layout);
    prog.stage3 = build_dft_pulses(dyn.spectrum(), dyn.table(), rabi, layout);
    prog.ideal = {ideal_superposition(), ideal_modexp(layout), ideal_dft()};
    check_stage(dyn, prog.stage1, prog.ideal[0], "superposition stage");
    check_stage(dyn, prog.stage2, prog.ideal[1], "modular exponentiation stage");
    check_stage(dyn, prog.stage3, prog.ideal[2], "DFT stage");
    return prog;
}

inline const std::vector<Label>& shor_targets() {
    static const std::vector<Label> targets{1, 3, 5, 7};
    return targets;
}

struct ShorStats {
    double max_target_deviation{0.0};
    double max_unwanted{0.0};
    double unwanted_sum{0.0};
};

inline ShorStats shor_stats(const std::vector<double>& p) {
    ShorStats s;
    const auto& targets = shor_targets();
    for (Label n = 0; n < p.size(); ++n) {
        if (std::find(targets.begin(), targets.end(), n) != targets.end()) {
            s.max_target_deviation = std::max(s.max_target_deviation, std::abs(p[n] - 0.25));
        } else {
            s.max_unwanted = std::max(s.max_unwanted, p[n]);
            s.unwanted_sum += p[n];
        }
    }
    return s;
}

struct ShorResult {
    std::vector<double> probabilities;
    std::vector<double> ideal_probabilities;
    ShorStats stats;
    double norm_drift{0.0};
    ShorProgram program;
};

inline ShorResult run_shor(const Dynamics& dyn, Engine engine, const ShorLayout& layout = optimized_shor_layout()) {
    ShorResult r;
    r.program = build_shor_program(dyn, dyn.config().rabi, layout);
    const auto run = run_sequence(dyn.ground(), dyn, r.program.sequence(), engine);
    r.probabilities = probabilities(run.state);
    r.norm_drift = std::abs(1.0 - run.state.norm_squared());
    const Vector ideal = r.program.ideal[2] * r.program.ideal[1] * r.program.ideal[0] * dyn.ground().amplitudes;
    r.ideal_probabilities = probabilities(QuantumState{ideal, 0.0});
    r.stats = shor_stats(r.probabilities);
    return r;
}

inline ShorResult run_shor(const ChainConfig& cfg, Engine engine, const ShorLayout& layout = optimized_shor_layout(),
                           LabelMethod method = LabelMethod::automatic) {
    validate(cfg, kDefaultMaxLength, nullptr);
    if (cfg.length != kShorLength) throw ConfigError("the Shor program needs a four-spin chain");
    const Dynamics dyn(cfg, solve_chain(cfg, method));
    return run_shor(dyn, engine, layout);
}

} // namespace qubitless
