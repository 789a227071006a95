// gates.hpp - compile logical gates into resonant pulse schedules

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <istream>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "qubitless/dynamics.hpp"
#include "qubitless/errors.hpp"
#include "qubitless/hamiltonian.hpp"
#include "qubitless/pulse.hpp"
#include "qubitless/spectrum.hpp"

namespace qubitless {

inline constexpr double kDegeneracyFraction = 1e-3;

// U(theta, phi) on qubit q:  C0 <- c C0 + i s e^{+i phi} C1,  C1 <- i s e^{-i phi} C0 + c C1.
struct RotationGate {
    std::size_t qubit{0};
    double theta{std::numbers::pi / 2};
    double phi{0.0};
};

// Modified CNOT: |c=1, t=0> -> i |c=1, t=1> and back; control 0 untouched.
struct CnotGate {
    std::size_t control{1};
    std::size_t target{0};
};

// On the control = 1 subspace: |t=0> -> e^{-i phi/2}, |t=1> -> e^{+i phi/2}.
// This is the controlled phase diag(1, 1, 1, e^{i phi}) times a phase
// diag(1, e^{-i phi/2}) on the control qubit.
struct ConditionalPhaseGate {
    std::size_t control{1};
    std::size_t target{0};
    double phi{std::numbers::pi / 2};
};

using GateIntent = std::variant<RotationGate, CnotGate, ConditionalPhaseGate>;

inline void validate(const GateIntent& gate, std::size_t length) {
    std::visit(
        [length](const auto& g) {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, RotationGate>) {
                if (g.qubit >= length) throw ConfigError("rotation qubit index out of range");
                if (!(g.theta > 0.0) || g.theta > 2.0 * std::numbers::pi + 1e-12)
                    throw ConfigError("rotation angle must lie in (0, 2pi]");
            } else {
                if (g.control >= length || g.target >= length) throw ConfigError("qubit index out of range");
                if (g.control == g.target) throw ConfigError("control and target must differ");
            }
        },
        gate);
}

// Resonant pulse for a single allowed transition. `theta` is the rotation
// angle on the driven pair and `phi` its logical phase; the physical pulse
// phase absorbs the phase of the coupling matrix element so that the rwa
// action is exactly the canonical rotation.
inline Pulse make_pulse(const Spectrum& spec, const TransitionTable& table, Label a, Label b, double theta,
                        double phi, double rabi) {
    const auto entry = table.find(a, b);
    if (!entry)
        throw UnknownTransition("transition " + label_string(a, spec.length) + " <-> " +
                                label_string(b, spec.length) + " has zero coupling");
    if (!(entry->frequency > 0.0))
        throw UnknownTransition("transition " + label_string(entry->from, spec.length) + " -> " +
                                label_string(entry->to, spec.length) +
                                " has non-positive frequency and cannot be driven");
    const double rabi_eff = rabi * std::abs(entry->coupling);
    for (const auto& other : table.entries()) {
        if (other.from == entry->from && other.to == entry->to) continue;
        if (std::abs(other.frequency - entry->frequency) < kDegeneracyFraction * rabi_eff)
            throw DegenerateTransition("transition " + label_string(other.from, spec.length) + " -> " +
                                       label_string(other.to, spec.length) + " collides with " +
                                       label_string(entry->from, spec.length) + " -> " +
                                       label_string(entry->to, spec.length));
    }
    Pulse p;
    p.frequency = entry->frequency;
    p.phase = phi + std::arg(entry->coupling);
    p.rabi = rabi;
    p.duration = theta / rabi_eff;
    p.target = TargetTransition{entry->from, entry->to, spec.length};
    return p;
}

inline PulseSequence compile_rotation(const Spectrum& spec, const TransitionTable& table, const RotationGate& g,
                                      double rabi) {
    validate(GateIntent{g}, spec.length);
    PulseSequence seq;
    const Label bit = Label{1} << g.qubit;
    for (Label s = 0; s < spec.dimension(); ++s)
        if (!(s & bit)) seq.append(make_pulse(spec, table, s, s | bit, g.theta, g.phi, rabi));
    return seq;
}

// One-qubit rotation, one pulse per configuration of the spectator qubits.
inline PulseSequence compile_u1(const Spectrum& spec, const TransitionTable& table, std::size_t qubit, double theta,
                                double phi, double rabi) {
    return compile_rotation(spec, table, RotationGate{qubit, theta, phi}, rabi);
}

inline PulseSequence compile_cnot(const Spectrum& spec, const TransitionTable& table, const CnotGate& g,
                                  double rabi) {
    validate(GateIntent{g}, spec.length);
    PulseSequence seq;
    const Label cbit = Label{1} << g.control, tbit = Label{1} << g.target;
    for (Label s = 0; s < spec.dimension(); ++s)
        if ((s & cbit) && !(s & tbit)) seq.append(make_pulse(spec, table, s, s | tbit, std::numbers::pi, 0.0, rabi));
    return seq;
}

// CN_10 on a two-spin chain: one pi-pulse at E_3 - E_2.
inline PulseSequence compile_cnot(const Spectrum& spec, const TransitionTable& table, double rabi) {
    return compile_cnot(spec, table, CnotGate{1, 0}, rabi);
}

// Two pi-pulse pairs per spectator configuration of the control = 1 subspace.
// A pair with phases (0, d) multiplies the driven pair by (-e^{i d}, -e^{-i d}).
inline PulseSequence compile_conditional_phase(const Spectrum& spec, const TransitionTable& table,
                                               const ConditionalPhaseGate& g, double rabi) {
    validate(GateIntent{g}, spec.length);
    PulseSequence seq;
    const Label cbit = Label{1} << g.control, tbit = Label{1} << g.target;
    const double quarter = -0.25 * g.phi;
    for (Label s = 0; s < spec.dimension(); ++s) {
        if (!(s & cbit) || (s & tbit)) continue;
        for (double phase : {0.0, quarter, 0.0, quarter})
            seq.append(make_pulse(spec, table, s, s | tbit, std::numbers::pi, phase, rabi));
    }
    return seq;
}

inline PulseSequence compile(const Spectrum& spec, const TransitionTable& table, const GateIntent& gate,
                             double rabi) {
    return std::visit(
        [&](const auto& g) -> PulseSequence {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, RotationGate>) return compile_rotation(spec, table, g, rabi);
            else if constexpr (std::is_same_v<T, CnotGate>) return compile_cnot(spec, table, g, rabi);
            else return compile_conditional_phase(spec, table, g, rabi);
        },
        gate);
}

inline PulseSequence compile(const Spectrum& spec, const TransitionTable& table,
                             const std::vector<GateIntent>& gates, double rabi) {
    PulseSequence seq;
    for (const auto& g : gates) seq.extend(compile(spec, table, g, rabi));
    return seq;
}

// --- ideal gate-level matrices over the full 2^L label space ---

// Two-level rotation between labels a (bit clear) and b (bit set).
inline Matrix transition_rotation_matrix(std::size_t length, Label a, Label b, double theta, double phi) {
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << length);
    Matrix u = Matrix::Identity(d, d);
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    const cplx i{0.0, 1.0};
    const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
    u(ia, ia) = c;
    u(ib, ib) = c;
    u(ib, ia) = i * s * std::polar(1.0, -phi);
    u(ia, ib) = i * s * std::polar(1.0, phi);
    return u;
}

inline Matrix single_qubit_matrix(const Eigen::Matrix2cd& gate, std::size_t length, std::size_t qubit) {
    // kron over qubits, most significant first
    Matrix u = Matrix::Identity(1, 1);
    for (std::size_t k = length; k-- > 0;) {
        const Matrix factor = (k == qubit) ? Matrix(gate) : Matrix::Identity(2, 2);
        Matrix next(u.rows() * 2, u.cols() * 2);
        for (Eigen::Index r = 0; r < u.rows(); ++r)
            for (Eigen::Index c = 0; c < u.cols(); ++c) next.block(r * 2, c * 2, 2, 2) = u(r, c) * factor;
        u = std::move(next);
    }
    return u;
}

inline Matrix ideal_matrix(const GateIntent& gate, std::size_t length) {
    validate(gate, length);
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << length);
    const cplx i{0.0, 1.0};
    return std::visit(
        [&](const auto& g) -> Matrix {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, RotationGate>) {
                const double c = std::cos(0.5 * g.theta), s = std::sin(0.5 * g.theta);
                Eigen::Matrix2cd m;
                m << c, i * s * std::polar(1.0, g.phi), i * s * std::polar(1.0, -g.phi), c;
                return single_qubit_matrix(m, length, g.qubit);
            } else if constexpr (std::is_same_v<T, CnotGate>) {
                Matrix u = Matrix::Zero(d, d);
                for (Eigen::Index s = 0; s < d; ++s) {
                    const auto bits = static_cast<Label>(s);
                    if (!((bits >> g.control) & 1u)) {
                        u(s, s) = 1.0;
                    } else {
                        u(static_cast<Eigen::Index>(bits ^ (Label{1} << g.target)), s) = i;
                    }
                }
                return u;
            } else {
                Matrix u = Matrix::Identity(d, d);
                for (Eigen::Index s = 0; s < d; ++s) {
                    const auto bits = static_cast<Label>(s);
                    if ((bits >> g.control) & 1u)
                        u(s, s) = std::polar(1.0, ((bits >> g.target) & 1u) ? 0.5 * g.phi : -0.5 * g.phi);
                }
                return u;
            }
        },
        gate);
}

// Columns are the rwa-engine images of every basis label.
inline Matrix rwa_action(const Dynamics& dyn, const PulseSequence& seq) {
    const auto d = static_cast<Eigen::Index>(dyn.dimension());
    Matrix u(d, d);
    for (Eigen::Index s = 0; s < d; ++s) {
        QuantumState in = QuantumState::basis(dyn.dimension(), static_cast<Label>(s),
                                              seq.empty() ? 0.0 : seq[0].start_time);
        u.col(s) = run_sequence(in, dyn, seq, Engine::rwa).state.amplitudes;
    }
    return u;
}

// --- 2 pi k selection of the Rabi frequency for the two-spin CNOT ---

struct TwoPiKSolution {
    int k{1};
    double rabi{0.0};
    double detuning{0.0};  // (E1 - E0) - (E3 - E2)
    double residual{0.0};  // sqrt(Omega0^2 + Delta^2) * pi / Omega1 - 2 pi k
};

// The near-resonant |00> <-> |01> channel completes k full turns during the
// CNOT pi-pulse when sqrt(Omega0^2 + Delta^2) * (pi / Omega1) = 2 pi k.
inline TwoPiKSolution two_pi_k_rabi(const Spectrum& spec, const TransitionTable& table, int k) {
    if (spec.length != 2) throw ConfigError("the 2 pi k method is defined for the two-spin chain");
    if (k < 1) throw ConfigError("k must be a positive integer");
    const auto near = table.find(0b00, 0b01);
    const auto resonant = table.find(0b10, 0b11);
    if (!near || !resonant) throw UnknownTransition("two-spin transitions missing from table");
    const double a0 = std::abs(near->coupling);      // alpha1 + alpha2
    const double a1 = std::abs(resonant->coupling);  // alpha1 - alpha2
    const double delta = near->frequency - resonant->frequency;
    const double kk = static_cast<double>(k);
    const double disc = 4.0 * kk * kk * a1 * a1 - a0 * a0;
    if (!(disc > 0.0))
        throw NoSolution("no positive Rabi frequency satisfies the 2 pi k condition for k = " + std::to_string(k));
    TwoPiKSolution sol;
    sol.k = k;
    sol.detuning = delta;
    sol.rabi = std::abs(delta) / std::sqrt(disc);
    const double omega0 = a0 * sol.rabi, omega1 = a1 * sol.rabi;
    sol.residual = std::sqrt(omega0 * omega0 + delta * delta) * std::numbers::pi / omega1 - 2.0 * std::numbers::pi * kk;
    return sol;
}

// --- gate list text format ---
//   u q=<i> theta=<rad> phi=<rad>
//   cnot c=<i> t=<j>
//   cphase c=<i> t=<j> phi=<rad>

inline GateIntent parse_gate(const std::string& line) {
    std::istringstream in(line);
    std::string kind, word;
    in >> kind;
    auto read_fields = [&](auto&& on_field) {
        while (in >> word) {
            const auto eq = word.find('=');
            if (eq == std::string::npos) throw ParseError("expected key=value, got '" + word + "'");
            on_field(word.substr(0, eq), std::string_view(word).substr(eq + 1));
        }
    };
    auto index = [](std::string_view v) {
        const double x = parse_double(v);
        if (x < 0 || x != std::floor(x)) throw ParseError("qubit index must be a non-negative integer");
        return static_cast<std::size_t>(x);
    };
    if (kind == "u") {
        RotationGate g;
        bool have_q = false;
        read_fields([&](const std::string& key, std::string_view v) {
            if (key == "q") { g.qubit = index(v); have_q = true; }
            else if (key == "theta") g.theta = parse_double(v);
            else if (key == "phi") g.phi = parse_double(v);
            else throw ParseError("unknown field '" + key + "' for u");
        });
        if (!have_q) throw ParseError("u needs q=<index>");
        return g;
    }
    if (kind == "cnot" || kind == "cphase") {
        std::size_t c = 0, t = 0;
        double phi = std::numbers::pi / 2;
        bool have_c = false, have_t = false;
        read_fields([&](const std::string& key, std::string_view v) {
            if (key == "c") { c = index(v); have_c = true; }
            else if (key == "t") { t = index(v); have_t = true; }
            else if (key == "phi" && kind == "cphase") phi = parse_double(v);
            else throw ParseError("unknown field '" + key + "' for " + kind);
        });
        if (!have_c || !have_t) throw ParseError(kind + " needs c=<index> and t=<index>");
        if (kind == "cnot") return CnotGate{c, t};
        return ConditionalPhaseGate{c, t, phi};
    }
    throw ParseError("unknown gate '" + kind + "'");
}

inline std::vector<GateIntent> read_gates(std::istream& is) {
    std::vector<GateIntent> gates;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            gates.push_back(parse_gate(line));
        } catch (const ParseError& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return gates;
}

} // namespace qubitless
