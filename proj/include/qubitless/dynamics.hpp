// dynamics.hpp - driven evolution of the chain under rectangular pulses.
//
// Three engines share one interface:
//   rwa    - resonant two-level rotation on the annotated transition only;
//   exact  - adaptive Dormand-Prince integration of the interaction-picture
//            equations over all levels with both rotating terms of V;
//   oracle - lab-frame product of exact exponentials of the midpoint-sampled
//            Hamiltonian, used to cross-check `exact`.
//
// The drive is V(t) = -Omega/2 sum_k (e^{-i(nu t + phi)} I^-_k + h.c.) with t
// on the global clock.

#pragma once

#include <Eigen/Eigenvalues>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "qubitless/chain.hpp"
#include "qubitless/errors.hpp"
#include "qubitless/hamiltonian.hpp"
#include "qubitless/pulse.hpp"
#include "qubitless/spectrum.hpp"
#include "qubitless/state.hpp"

namespace qubitless {

enum class Engine { rwa, exact, oracle };

inline std::string to_string(Engine e) {
    switch (e) {
    case Engine::rwa: return "rwa";
    case Engine::exact: return "exact";
    case Engine::oracle: return "oracle";
    }
    return "?";
}

inline Engine parse_engine(const std::string& s) {
    if (s == "rwa") return Engine::rwa;
    if (s == "exact") return Engine::exact;
    if (s == "oracle") return Engine::oracle;
    throw ConfigError("unknown engine '" + s + "' (expected rwa, exact or oracle)");
}

struct ExactOptions {
    double rel_tol{1e-10};
    double abs_tol{1e-12};
    double periods_per_step{20.0};  // max step = shortest period / this
};

struct OracleOptions {
    double step{0.0};            // 0 picks the largest step allowed by max_norm_step
    double max_norm_step{1e-2};  // ||H + V|| * step must not exceed this
    int richardson_levels{2};    // 1 = plain midpoint product; n > 1 extrapolates in step^2
};

// Precomputed operators for one chain; immutable and shareable across threads.
class Dynamics {
public:
    Dynamics(const ChainConfig& cfg, Spectrum spec)
        : cfg_(cfg), spec_(std::move(spec)), table_(transition_table(spec_, cfg_)) {
        lowering_ = lowering_in_eigenbasis(spec_);
        raising_ = lowering_.adjoint();
        h_lab_ = build_hamiltonian(cfg_).matrix();
        sx_lab_ = total_x(cfg_.length);
        z_ = total_z_diagonal(cfg_.length);
    }

    const ChainConfig& config() const { return cfg_; }
    const Spectrum& spectrum() const { return spec_; }
    const TransitionTable& table() const { return table_; }
    std::size_t dimension() const { return spec_.dimension(); }

    QuantumState ground() const { return QuantumState::basis(dimension(), 0); }

    QuantumState evolve_rwa(const QuantumState& state, const Pulse& pulse) const;
    QuantumState evolve_exact(const QuantumState& state, const Pulse& pulse, const ExactOptions& opt = {}) const;
    QuantumState evolve_oracle(const QuantumState& state, const Pulse& pulse, const OracleOptions& opt = {}) const;

    QuantumState evolve(const QuantumState& state, const Pulse& pulse, Engine engine) const {
        switch (engine) {
        case Engine::rwa: return evolve_rwa(state, pulse);
        case Engine::exact: return evolve_exact(state, pulse);
        case Engine::oracle: return evolve_oracle(state, pulse);
        }
        throw Error("unknown engine");
    }

    // Largest slice length the oracle accepts for this pulse.
    double oracle_max_step(const Pulse& pulse, double max_norm_step = 1e-2) const {
        const double hnorm = spec_.energies.cwiseAbs().maxCoeff();
        const double vnorm = pulse.rabi * 0.5 * static_cast<double>(cfg_.length);
        return max_norm_step / std::max(hnorm + vnorm, 1e-300);
    }

    // Largest |frequency| among the phases e^{i(E_n - E_m -+ nu)t} that
    // appear with nonzero coupling.
    double fastest_frequency(double nu) const {
        double fastest = 0.0;
        const auto d = static_cast<Eigen::Index>(dimension());
        for (Eigen::Index n = 0; n < d; ++n)
            for (Eigen::Index m = 0; m < d; ++m) {
                const double gap = spec_.energies(n) - spec_.energies(m);
                if (std::abs(lowering_(n, m)) > kCouplingTol) fastest = std::max(fastest, std::abs(gap - nu));
                if (std::abs(raising_(n, m)) > kCouplingTol) fastest = std::max(fastest, std::abs(gap + nu));
            }
        return fastest;
    }

private:
    double start_of(const QuantumState& state, const Pulse& pulse) const {
        const double tol = 1e-9 * std::max(1.0, std::abs(pulse.start_time));
        if (state.time > pulse.start_time + tol)
            throw Error("pulse starts at t=" + format_double(pulse.start_time) + " but the state is already at t=" +
                        format_double(state.time));
        return pulse.start_time;
    }

    QuantumState oracle_once(const QuantumState& state, const Pulse& pulse, double step) const;

    ChainConfig cfg_;
    Spectrum spec_;
    TransitionTable table_;
    Matrix lowering_;
    Matrix raising_;
    Matrix h_lab_;
    Matrix sx_lab_;
    RealVector z_;
};

inline QuantumState Dynamics::evolve_rwa(const QuantumState& state, const Pulse& pulse) const {
    if (!pulse.target) throw UnknownTransition("rwa engine needs a pulse with a target transition");
    const double t0 = start_of(state, pulse);
    const auto entry = table_.find(pulse.target->from, pulse.target->to);
    if (!entry)
        throw UnknownTransition("no allowed transition between " + label_string(pulse.target->from, cfg_.length) +
                                " and " + label_string(pulse.target->to, cfg_.length));
    if (std::abs(pulse.frequency - entry->frequency) > 1e-9 * std::max(1.0, std::abs(entry->frequency)))
        throw NotResonant("pulse frequency " + format_double(pulse.frequency) + " is not the transition frequency " +
                          format_double(entry->frequency));

    const double rabi_eff = pulse.rabi * std::abs(entry->coupling);
    const double c = std::cos(0.5 * rabi_eff * pulse.duration);
    const double s = std::sin(0.5 * rabi_eff * pulse.duration);
    const cplx u = entry->coupling / std::abs(entry->coupling);
    const cplx i{0.0, 1.0};
    const auto f = static_cast<Eigen::Index>(entry->to);
    const auto n = static_cast<Eigen::Index>(entry->from);

    QuantumState out = state;
    const cplx cf = state.amplitudes(f), ci = state.amplitudes(n);
    out.amplitudes(f) = c * cf + i * s * std::polar(1.0, -pulse.phase) * u * ci;
    out.amplitudes(n) = c * ci + i * s * std::polar(1.0, pulse.phase) * std::conj(u) * cf;
    out.time = t0 + pulse.duration;
    return out;
}

namespace detail {

using ode_state = std::vector<cplx>;

// dC/dt = (i Omega / 2) P (e^{-i theta} L + e^{i theta} L^H) P^* C,  P = diag(e^{i E t})
struct InteractionRhs {
    const RealVector& energies;
    const Matrix& lowering;
    const Matrix& raising;
    double rabi;
    double nu;
    double phi;
    mutable Vector work;
    mutable Vector phases;

    void operator()(const ode_state& x, ode_state& dxdt, double t) const {
        const auto d = energies.size();
        Eigen::Map<const Vector> c(x.data(), d);
        Eigen::Map<Vector> out(dxdt.data(), d);
        for (Eigen::Index n = 0; n < d; ++n) phases(n) = std::polar(1.0, energies(n) * t);
        work = phases.conjugate().cwiseProduct(c);
        const double theta = nu * t + phi;
        out.noalias() = std::polar(1.0, -theta) * (lowering * work);
        out.noalias() += std::polar(1.0, theta) * (raising * work);
        out = (cplx(0.0, 0.5 * rabi)) * phases.cwiseProduct(out);
    }
};

} // namespace detail

inline QuantumState Dynamics::evolve_exact(const QuantumState& state, const Pulse& pulse,
                                           const ExactOptions& opt) const {
    validate(pulse);
    const double t0 = start_of(state, pulse);
    QuantumState out = state;
    out.time = t0 + pulse.duration;
    if (pulse.duration == 0.0 || pulse.rabi == 0.0) return out;

    using namespace boost::numeric::odeint;
    using stepper_t = runge_kutta_dopri5<detail::ode_state>;

    const Vector start = to_eigen_order(spec_, state.amplitudes);
    detail::ode_state x(start.data(), start.data() + start.size());

    const double fastest = fastest_frequency(pulse.frequency);
    double max_dt = pulse.duration;
    if (fastest > 0.0) max_dt = std::min(max_dt, 2.0 * std::numbers::pi / (opt.periods_per_step * fastest));

    detail::InteractionRhs rhs{spec_.energies, lowering_,           raising_,
                               pulse.rabi,     pulse.frequency,     pulse.phase,
                               Vector(start.size()), Vector(start.size())};
    try {
        integrate_adaptive(make_controlled(opt.abs_tol, opt.rel_tol, max_dt, stepper_t()), std::ref(rhs), x, t0,
                           t0 + pulse.duration, max_dt);
    } catch (const odeint_error& e) {
        throw ToleranceNotMet(std::string("adaptive integrator failed: ") + e.what());
    }
    Vector result = Eigen::Map<Vector>(x.data(), static_cast<Eigen::Index>(x.size()));
    out.amplitudes = to_label_order(spec_, result);
    return out;
}

// H + V(t) = R(t) (H - Omega S^x) R(t)^H with R(t) = exp(i (nu t + phi) I^z_tot),
// because H conserves I^z_tot. Every slice exponential is therefore
// R_j W R_j^H with one W per pulse, and consecutive R factors collapse into
// the constant diagonal exp(-i nu h I^z_tot).
inline QuantumState Dynamics::oracle_once(const QuantumState& state, const Pulse& pulse, double step) const {
    const double t0 = pulse.start_time;
    const std::size_t slices = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(pulse.duration / step)));
    const double h = pulse.duration / static_cast<double>(slices);
    const auto d = static_cast<Eigen::Index>(dimension());

    Eigen::SelfAdjointEigenSolver<Matrix> solver(h_lab_ - pulse.rabi * sx_lab_);
    if (solver.info() != Eigen::Success) throw EigenNonConvergence("oracle: slice Hamiltonian did not converge");
    Vector slice_phase(d);
    for (Eigen::Index k = 0; k < d; ++k) slice_phase(k) = std::polar(1.0, -solver.eigenvalues()(k) * h);
    const Matrix w = solver.eigenvectors() * slice_phase.asDiagonal() * solver.eigenvectors().adjoint();

    Vector drift(d);
    for (Eigen::Index k = 0; k < d; ++k) drift(k) = std::polar(1.0, -pulse.frequency * h * z_(k));
    const Matrix k_step = drift.asDiagonal() * w;

    auto rotation = [&](double theta) {
        Vector r(d);
        for (Eigen::Index k = 0; k < d; ++k) r(k) = std::polar(1.0, theta * z_(k));
        return r;
    };
    const double theta_first = pulse.frequency * (t0 + 0.5 * h) + pulse.phase;
    const double theta_last = pulse.frequency * (t0 + (static_cast<double>(slices) - 0.5) * h) + pulse.phase;

    // lab-frame state at t0
    const Vector c0 = to_eigen_order(spec_, state.amplitudes);
    Vector lab = Vector::Zero(d);
    for (Eigen::Index n = 0; n < d; ++n)
        lab += c0(n) * std::polar(1.0, -spec_.energies(n) * t0) * spec_.eigenvectors.col(n);

    Vector chi = rotation(theta_first).conjugate().cwiseProduct(lab);
    // chi <- K^(slices-1) chi. K is unitary, so its Schur form is diagonal up
    // to roundoff; raising unit-modulus eigenvalues keeps the power unitary,
    // where repeated squaring would leak norm.
    Eigen::ComplexSchur<Matrix> schur(k_step);
    if (schur.info() != Eigen::Success) throw EigenNonConvergence("oracle: slice propagator did not converge");
    const auto power = static_cast<double>(slices - 1);
    Vector eig(d);
    for (Eigen::Index k = 0; k < d; ++k) eig(k) = std::polar(1.0, power * std::arg(schur.matrixT()(k, k)));
    chi = schur.matrixU() * eig.cwiseProduct(schur.matrixU().adjoint() * chi);
    lab = rotation(theta_last).cwiseProduct(w * chi);

    const double t1 = t0 + pulse.duration;
    Vector c1 = spec_.eigenvectors.adjoint() * lab;
    for (Eigen::Index n = 0; n < d; ++n) c1(n) *= std::polar(1.0, spec_.energies(n) * t1);

    QuantumState out;
    out.amplitudes = to_label_order(spec_, c1);
    out.time = t1;
    return out;
}

inline QuantumState Dynamics::evolve_oracle(const QuantumState& state, const Pulse& pulse,
                                            const OracleOptions& opt) const {
    validate(pulse);
    const double t0 = start_of(state, pulse);
    if (pulse.duration == 0.0) {
        QuantumState out = state;
        out.time = t0;
        return out;
    }
    const double limit = oracle_max_step(pulse, opt.max_norm_step);
    const double step = opt.step > 0.0 ? opt.step : limit;
    if (step > limit * (1.0 + 1e-12))
        throw StepTooLarge("oracle step " + format_double(step) + " exceeds the stability limit " +
                           format_double(limit));
    if (opt.richardson_levels < 1) throw ConfigError("richardson_levels must be at least 1");

    // Midpoint products are symmetric, so the error expands in even powers of
    // the step and a Neville table in h^2 removes successive orders.
    std::vector<Vector> previous;
    double h = step;
    for (int level = 0; level < opt.richardson_levels; ++level, h *= 0.5) {
        std::vector<Vector> row{oracle_once(state, pulse, h).amplitudes};
        for (int j = 1; j <= level; ++j) {
            const double factor = std::pow(4.0, j) - 1.0;
            const Vector& finer = row.back();
            row.push_back(finer + (finer - previous[static_cast<std::size_t>(j - 1)]) / factor);
        }
        previous = std::move(row);
    }
    QuantumState out;
    out.amplitudes = previous.back();
    out.time = t0 + pulse.duration;
    return out;
}

struct SequenceResult {
    QuantumState state;
    std::vector<double> norm_drift;  // |1 - sum |C|^2| after each pulse
};

inline SequenceResult run_sequence(const QuantumState& initial, const Dynamics& dyn, const PulseSequence& seq,
                                   Engine engine) {
    SequenceResult result{initial, {}};
    result.norm_drift.reserve(seq.size());
    for (const auto& pulse : seq) {
        if (engine == Engine::rwa && !pulse.target)
            throw UnknownTransition("rwa engine needs every pulse to carry a target transition");
        result.state = dyn.evolve(result.state, pulse, engine);
        result.norm_drift.push_back(std::abs(1.0 - result.state.norm_squared()));
    }
    return result;
}

} // namespace qubitless
