// experiments.hpp - parameter sweeps and CSV writers behind the CLI

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <ostream>
#include <set>
#include <thread>
#include <vector>

#include "qubitless/config.hpp"
#include "qubitless/dynamics.hpp"
#include "qubitless/gates.hpp"
#include "qubitless/pulse.hpp"
#include "qubitless/shor.hpp"
#include "qubitless/spectrum.hpp"
#include "qubitless/state.hpp"

namespace qubitless {

// Runs job(i) for i in [0, count) on a small worker pool. Results go into
// caller-owned slots, so output order never depends on scheduling. The first
// exception is rethrown after all workers stop.
inline void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& job) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                job(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = count;
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

// --- CNOT error sweep on two spins ---

struct CnotRow {
    double delta_omega{0.0};  // as given, units of J
    double rabi{0.0};         // as given, units of J
    double p00{0.0}, p01{0.0}, p10{0.0}, p11{0.0};
};

// (|00> + |10>) / sqrt 2; the CNOT should return (|00> + i |11>) / sqrt 2.
inline QuantumState cnot_initial_state() {
    return QuantumState::superposition(4, {{0b00, 1.0}, {0b10, 1.0}});
}

inline ChainConfig cnot_chain(double coupling, double omega0, double delta_omega_j, double rabi_j) {
    return two_spin(coupling, omega0, omega0 + delta_omega_j * coupling, rabi_j * coupling);
}

inline CnotRow cnot_point(double coupling, double omega0, double delta_omega_j, double rabi_j, Engine engine) {
    const ChainConfig cfg = cnot_chain(coupling, omega0, delta_omega_j, rabi_j);
    const Dynamics dyn(cfg, solve_chain(cfg));
    const PulseSequence seq = compile_cnot(dyn.spectrum(), dyn.table(), cfg.rabi);
    const auto p = probabilities(run_sequence(cnot_initial_state(), dyn, seq, engine).state);
    return {delta_omega_j, rabi_j, p[0], p[1], p[2], p[3]};
}

// Rows ordered by (delta_omega, rabi) in grid order.
inline std::vector<CnotRow> cnot_error_sweep(double coupling, double omega0, const std::vector<double>& rabi_grid,
                                             const std::vector<double>& delta_omegas, Engine engine = Engine::exact,
                                             std::size_t threads = 0) {
    std::vector<CnotRow> rows(rabi_grid.size() * delta_omegas.size());
    parallel_for(rows.size(), threads, [&](std::size_t i) {
        rows[i] = cnot_point(coupling, omega0, delta_omegas[i / rabi_grid.size()], rabi_grid[i % rabi_grid.size()],
                             engine);
    });
    return rows;
}

inline std::vector<CnotRow> cnot_error_sweep(const ExperimentConfig& cfg) {
    return cnot_error_sweep(cfg.coupling, cfg.omega0, cfg.sweep_rabi.expand(), cfg.sweep_delta_omega.expand(),
                            cfg.engine, cfg.threads);
}

// |p01| + |p10|: population leaked out of the ideal two-state support.
inline double cnot_leakage(const CnotRow& r) { return std::abs(r.p01) + std::abs(r.p10); }

// --- CSV writers; full round-trip precision ---

inline void write_cnot_csv(std::ostream& os, const std::vector<CnotRow>& rows) {
    os << "delta_omega,rabi,p00,p01,p10,p11\n";
    for (const auto& r : rows)
        os << format_double(r.delta_omega) << ',' << format_double(r.rabi) << ',' << format_double(r.p00) << ','
           << format_double(r.p01) << ',' << format_double(r.p10) << ',' << format_double(r.p11) << '\n';
}

inline double frequency_scale(const ChainConfig& cfg, Units units) {
    return units == Units::J ? 1.0 / cfg.coupling : 1.0;
}

inline void write_spectrum_csv(std::ostream& os, const Spectrum& spec, const ChainConfig& cfg, Units units) {
    const double scale = frequency_scale(cfg, units);
    os << "index,label,energy,m,overlap_quality\n";
    for (std::size_t n = 0; n < spec.dimension(); ++n)
        os << n << ',' << label_string(spec.labels[n], spec.length) << ','
           << format_double(spec.energies(static_cast<Eigen::Index>(n)) * scale) << ','
           << format_double(spec.m_values[n]) << ',' << format_double(spec.overlap_quality[n]) << '\n';
}

inline void write_transitions_csv(std::ostream& os, const TransitionTable& table, const ChainConfig& cfg,
                                  Units units) {
    const double scale = frequency_scale(cfg, units);
    os << "from_label,to_label,frequency,effective_rabi\n";
    for (const auto& t : table.entries())
        os << label_string(t.from, table.length()) << ',' << label_string(t.to, table.length()) << ','
           << format_double(t.frequency * scale) << ',' << format_double(t.effective_rabi * scale) << '\n';
}

inline void write_reachability(std::ostream& os, const Spectrum& spec, const ChainConfig& cfg) {
    const auto levels = reachable_levels(spec, 0);
    os << "reachable levels from " << label_string(0, spec.length) << ": " << levels.size() << " of "
       << spec.dimension() << '\n';
    os << "field: " << (cfg.uniform_field() ? "uniform" : "non-uniform") << '\n';
    os << "levels:";
    for (Label l : levels) os << ' ' << label_string(l, spec.length);
    os << '\n';
    if (spec.length == 2) {
        // the near-resonant spacing differs from the CNOT frequency by exactly 2J
        const double gap = (spec.energy(1) - spec.energy(0)) - (spec.energy(3) - spec.energy(2));
        os << "(E1 - E0) - (E3 - E2) = " << format_double(gap) << " (2J = " << format_double(2.0 * cfg.coupling)
           << ")\n";
        os << "E1 - E0 = " << format_double(spec.energy(1) - spec.energy(0))
           << "; a figure of 99.98 quoted for J=1, omega0=100, delta_omega=50 should read 100.98\n";
    }
}

inline void write_shor_csv(std::ostream& os, const ShorResult& r) {
    os << "state_label,probability,ideal_probability\n";
    for (std::size_t n = 0; n < r.probabilities.size(); ++n)
        os << label_string(n, kShorLength) << ',' << format_double(r.probabilities[n]) << ','
           << format_double(r.ideal_probabilities[n]) << '\n';
}

inline void write_shor_summary(std::ostream& os, const ShorResult& r, Engine engine) {
    os << "engine: " << to_string(engine) << '\n'
       << "pulses: " << r.program.stage1.size() << " + " << r.program.stage2.size() << " + "
       << r.program.stage3.size() << " = " << r.program.size() << '\n'
       << "max_target_deviation: " << format_double(r.stats.max_target_deviation) << '\n'
       << "max_unwanted_probability: " << format_double(r.stats.max_unwanted) << '\n'
       << "unwanted_probability_sum: " << format_double(r.stats.unwanted_sum) << '\n'
       << "norm_drift: " << format_double(r.norm_drift) << '\n';
}

} // namespace qubitless
