// spectrum.hpp - diagonalization, logical labeling and transition structure
// of the static chain Hamiltonian.

#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include "qubitless/chain.hpp"
#include "qubitless/errors.hpp"
#include "qubitless/hamiltonian.hpp"

namespace qubitless {

using Label = std::size_t;

inline constexpr double kResidualTol = 1e-10;
inline constexpr double kMRoundingTol = 1e-6;
inline constexpr double kCouplingTol = 1e-12;

// Binary rendering of a logical label, most significant qubit first.
inline std::string label_string(Label label, std::size_t length) {
    std::string out(length, '0');
    for (std::size_t k = 0; k < length; ++k)
        if ((label >> k) & 1u) out[length - 1 - k] = '1';
    return out;
}

struct Spectrum {
    std::size_t length{0};
    RealVector energies;              // ascending
    Matrix eigenvectors;              // column n is eigenstate n in the product basis
    std::vector<double> m_values;     // total z-projection per eigenstate
    std::vector<Label> labels;        // empty until assign_labels
    std::vector<std::size_t> index_of_label;
    std::vector<double> overlap_quality;

    std::size_t dimension() const { return static_cast<std::size_t>(energies.size()); }
    bool labeled() const { return !labels.empty(); }

    std::size_t index(Label label) const {
        if (!labeled()) throw Error("spectrum has no logical labels");
        if (label >= index_of_label.size()) throw Error("label out of range");
        return index_of_label[label];
    }
    double energy(Label label) const { return energies(static_cast<Eigen::Index>(index(label))); }
    double m_of_label(Label label) const { return m_values[index(label)]; }
};

namespace detail {

inline double round_to_half_integer(double m) {
    const double r = std::round(2.0 * m) / 2.0;
    if (std::abs(r - m) > kMRoundingTol)
        throw Error("eigenstate has no definite spin projection (<I^z> = " + std::to_string(m) + ")");
    return r;
}

inline std::size_t length_from_dimension(std::size_t d) {
    std::size_t L = 0;
    while ((std::size_t{1} << L) < d) ++L;
    if ((std::size_t{1} << L) != d) throw Error("operator dimension is not a power of two");
    return L;
}

} // namespace detail

// Dense Hermitian eigendecomposition. H conserves I^z_tot, so each projection
// sector is solved separately; this keeps m definite even when levels from
// different sectors are degenerate.
inline Spectrum diagonalize(const HermitianOperator& hamiltonian) {
    const Matrix& h = hamiltonian.matrix();
    const std::size_t d = hamiltonian.dimension();
    const std::size_t L = detail::length_from_dimension(d);
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());

    bool block_diagonal = true;
    for (std::size_t r = 0; r < d && block_diagonal; ++r)
        for (std::size_t c = 0; c < d; ++c)
            if (down_count(r) != down_count(c) &&
                std::abs(h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) > kHermiticityTol * scale) {
                block_diagonal = false;
                break;
            }

    std::vector<double> energies;
    std::vector<Vector> vectors;
    energies.reserve(d);
    vectors.reserve(d);

    auto solve = [&](const std::vector<std::size_t>& basis) {
        const auto n = static_cast<Eigen::Index>(basis.size());
        Matrix block(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                block(i, j) = h(static_cast<Eigen::Index>(basis[static_cast<std::size_t>(i)]),
                                static_cast<Eigen::Index>(basis[static_cast<std::size_t>(j)]));
        Eigen::SelfAdjointEigenSolver<Matrix> solver(block);
        if (solver.info() != Eigen::Success) throw EigenNonConvergence("Hermitian eigensolver did not converge");
        for (Eigen::Index k = 0; k < n; ++k) {
            Vector v = Vector::Zero(static_cast<Eigen::Index>(d));
            for (Eigen::Index i = 0; i < n; ++i)
                v(static_cast<Eigen::Index>(basis[static_cast<std::size_t>(i)])) = solver.eigenvectors()(i, k);
            energies.push_back(solver.eigenvalues()(k));
            vectors.push_back(std::move(v));
        }
    };

    if (block_diagonal) {
        for (std::size_t down = 0; down <= L; ++down) {
            std::vector<std::size_t> basis;
            for (std::size_t s = 0; s < d; ++s)
                if (down_count(s) == down) basis.push_back(s);
            solve(basis);
        }
    } else {
        std::vector<std::size_t> basis(d);
        std::iota(basis.begin(), basis.end(), std::size_t{0});
        solve(basis);
    }

    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return energies[a] < energies[b]; });

    Spectrum spec;
    spec.length = L;
    spec.energies.resize(static_cast<Eigen::Index>(d));
    spec.eigenvectors.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    const RealVector z = total_z_diagonal(L);
    const double hnorm = hamiltonian.norm();
    for (std::size_t n = 0; n < d; ++n) {
        const auto col = static_cast<Eigen::Index>(n);
        spec.energies(col) = energies[order[n]];
        spec.eigenvectors.col(col) = vectors[order[n]];
        const Vector& v = vectors[order[n]];
        const double residual = (h * v - energies[order[n]] * v).norm();
        if (residual > kResidualTol * std::max(1.0, hnorm))
            throw EigenNonConvergence("eigenpair residual " + std::to_string(residual) + " exceeds tolerance");
        const double m = (v.cwiseAbs2().transpose() * z)(0);
        spec.m_values.push_back(detail::round_to_half_integer(m));
    }
    return spec;
}

enum class LabelMethod {
    max_overlap,   // product state with the largest weight; fails outside J << delta_omega
    energy_order,  // within each m sector, match eigen-energies to diagonal energies in order
    automatic,     // max_overlap, falling back to energy_order when ambiguous
};

namespace detail {

inline void fix_phases(Spectrum& spec) {
    for (std::size_t n = 0; n < spec.dimension(); ++n) {
        auto col = spec.eigenvectors.col(static_cast<Eigen::Index>(n));
        cplx ref = col(static_cast<Eigen::Index>(spec.labels[n]));
        if (std::abs(ref) < 1e-8) {
            Eigen::Index arg = 0;
            col.cwiseAbs().maxCoeff(&arg);
            ref = col(arg);
        }
        col *= std::conj(ref) / std::abs(ref);
    }
}

inline void finish_labels(Spectrum& spec) {
    const std::size_t d = spec.dimension();
    spec.index_of_label.assign(d, d);
    for (std::size_t n = 0; n < d; ++n) {
        if (spec.index_of_label[spec.labels[n]] != d)
            throw LabelAmbiguous("label " + label_string(spec.labels[n], spec.length) + " assigned twice");
        spec.index_of_label[spec.labels[n]] = n;
    }
    spec.overlap_quality.resize(d);
    for (std::size_t n = 0; n < d; ++n)
        spec.overlap_quality[n] = std::norm(
            spec.eigenvectors(static_cast<Eigen::Index>(spec.labels[n]), static_cast<Eigen::Index>(n)));
    fix_phases(spec);
}

inline Spectrum label_by_overlap(Spectrum spec) {
    const std::size_t d = spec.dimension();
    spec.labels.assign(d, 0);
    for (std::size_t n = 0; n < d; ++n) {
        const auto weights = spec.eigenvectors.col(static_cast<Eigen::Index>(n)).cwiseAbs2().eval();
        Eigen::Index best = 0;
        const double top = weights.maxCoeff(&best);
        double runner_up = 0.0;
        for (Eigen::Index s = 0; s < weights.size(); ++s)
            if (s != best) runner_up = std::max(runner_up, weights(s));
        if (top <= 0.5 || top - runner_up <= 1e-9)
            throw LabelAmbiguous("eigenstate " + std::to_string(n) + " has maximal product-state overlap " +
                                 std::to_string(top) + "; the J << delta_omega labeling regime is violated");
        spec.labels[n] = static_cast<Label>(best);
    }
    finish_labels(spec);
    return spec;
}

inline Spectrum label_by_energy_order(Spectrum spec, const HermitianOperator& hamiltonian) {
    const std::size_t d = spec.dimension();
    const std::size_t L = spec.length;
    const Matrix& h = hamiltonian.matrix();
    const double scale = std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
    spec.labels.assign(d, 0);
    for (std::size_t down = 0; down <= L; ++down) {
        const double m = 0.5 * static_cast<double>(L) - static_cast<double>(down);
        std::vector<std::size_t> states;
        for (std::size_t n = 0; n < d; ++n)
            if (spec.m_values[n] == m) states.push_back(n);
        std::vector<std::size_t> products;
        for (std::size_t s = 0; s < d; ++s)
            if (down_count(s) == down) products.push_back(s);
        if (states.size() != products.size()) throw LabelAmbiguous("sector sizes disagree");
        // ties in the diagonal energy resolve toward the smaller label
        auto key = [&](std::size_t s) {
            return std::round(h(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)).real() / (1e-9 * scale));
        };
        std::stable_sort(products.begin(), products.end(),
                         [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
        // states are already in ascending energy
        for (std::size_t i = 0; i < states.size(); ++i) spec.labels[states[i]] = products[i];
    }
    finish_labels(spec);
    return spec;
}

} // namespace detail

inline Spectrum assign_labels(const Spectrum& spec, const ChainConfig& cfg,
                              LabelMethod method = LabelMethod::max_overlap) {
    if (cfg.length != spec.length) throw ConfigError("chain length does not match spectrum");
    switch (method) {
    case LabelMethod::max_overlap:
        return detail::label_by_overlap(spec);
    case LabelMethod::energy_order:
        return detail::label_by_energy_order(spec, build_hamiltonian(cfg));
    case LabelMethod::automatic:
        try {
            return detail::label_by_overlap(spec);
        } catch (const LabelAmbiguous&) {
            return detail::label_by_energy_order(spec, build_hamiltonian(cfg));
        }
    }
    throw Error("unknown label method");
}

// Build, diagonalize and label in one go.
inline Spectrum solve_chain(const ChainConfig& cfg, LabelMethod method = LabelMethod::automatic) {
    return assign_labels(diagonalize(build_hamiltonian(cfg)), cfg, method);
}

struct TwoSpinAnalytic {
    double alpha1{1.0};
    double alpha2{0.0};
    double delta_omega{0.0};
    double energies[4]{};  // E_0..E_3 for |00>, |01>, |10>, |11>
};

// Closed-form diagonalization of the two-spin chain. The m = 0 block is
// [[J/2 + dw/2, -J], [-J, J/2 - dw/2]] in (|up,down>, |down,up>) ordered by spin
// index, whose eigenvalues are J/2 -/+ sqrt(J^2 + dw^2/4).
inline TwoSpinAnalytic two_spin_analytic(double coupling, double omega0, double omega1) {
    TwoSpinAnalytic out;
    const double J = coupling;
    const double dw = omega1 - omega0;
    const double half_gap = std::sqrt(J * J + 0.25 * dw * dw);
    const double theta = 0.5 * std::atan2(2.0 * J, dw);
    out.alpha1 = std::cos(theta);
    out.alpha2 = std::sin(theta);
    out.delta_omega = dw;
    out.energies[0] = -0.5 * J - 0.5 * (omega0 + omega1);
    out.energies[1] = 0.5 * J - half_gap;
    out.energies[2] = 0.5 * J + half_gap;
    out.energies[3] = -0.5 * J + 0.5 * (omega0 + omega1);
    return out;
}

struct Transition {
    Label from{0};  // larger m (the raising partner)
    Label to{0};    // m - 1
    double frequency{0.0};   // E_to - E_from
    cplx coupling{0.0};      // <to| sum_k I^-_k |from>
    double effective_rabi{0.0};
};

class TransitionTable {
public:
    TransitionTable() = default;
    TransitionTable(std::size_t length, std::vector<Transition> entries)
        : length_(length), entries_(std::move(entries)) {}

    const std::vector<Transition>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    std::size_t length() const { return length_; }

    // Accepts either orientation of the pair.
    std::optional<Transition> find(Label a, Label b) const {
        for (const auto& t : entries_)
            if ((t.from == a && t.to == b) || (t.from == b && t.to == a)) return t;
        return std::nullopt;
    }

private:
    std::size_t length_{0};
    std::vector<Transition> entries_;
};

// <n| sum_k I^-_k |m> in the eigenbasis (rows and columns indexed by eigen-index).
inline Matrix lowering_in_eigenbasis(const Spectrum& spec) {
    return spec.eigenvectors.adjoint() * total_lowering(spec.length) * spec.eigenvectors;
}

inline TransitionTable transition_table(const Spectrum& spec, const ChainConfig& cfg) {
    if (!spec.labeled()) throw Error("transition_table needs a labeled spectrum");
    const Matrix lower = lowering_in_eigenbasis(spec);
    std::vector<Transition> entries;
    const std::size_t d = spec.dimension();
    for (Label from = 0; from < d; ++from) {
        const std::size_t i = spec.index(from);
        for (Label to = 0; to < d; ++to) {
            const std::size_t f = spec.index(to);
            if (spec.m_values[f] != spec.m_values[i] - 1.0) continue;
            const cplx g = lower(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(i));
            if (std::abs(g) <= kCouplingTol) continue;
            entries.push_back({from, to, spec.energies(static_cast<Eigen::Index>(f)) -
                                             spec.energies(static_cast<Eigen::Index>(i)),
                               g, cfg.rabi * std::abs(g)});
        }
    }
    return TransitionTable(spec.length, std::move(entries));
}

// Eigen-indices reachable from `start` by chains of Delta m = +-1 transitions
// with nonzero coupling. Works on unlabeled spectra.
inline std::set<std::size_t> reachable_indices(const Spectrum& spec, std::size_t start) {
    const Matrix lower = lowering_in_eigenbasis(spec);
    const std::size_t d = spec.dimension();
    if (start >= d) throw Error("start index out of range");
    std::set<std::size_t> seen{start};
    std::queue<std::size_t> frontier;
    frontier.push(start);
    while (!frontier.empty()) {
        const std::size_t n = frontier.front();
        frontier.pop();
        for (std::size_t k = 0; k < d; ++k) {
            if (seen.count(k)) continue;
            const double g = std::max(std::abs(lower(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n))),
                                      std::abs(lower(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k))));
            if (g > kCouplingTol) {
                seen.insert(k);
                frontier.push(k);
            }
        }
    }
    return seen;
}

inline std::set<Label> reachable_levels(const Spectrum& spec, Label start) {
    std::set<Label> out;
    for (std::size_t n : reachable_indices(spec, spec.index(start))) out.insert(spec.labels[n]);
    return out;
}

} // namespace qubitless
