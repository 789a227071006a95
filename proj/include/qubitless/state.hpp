#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

#include "qubitless/errors.hpp"
#include "qubitless/hamiltonian.hpp"
#include "qubitless/spectrum.hpp"

namespace qubitless {

inline constexpr double kNormTol = 1e-10;

// Interaction-picture amplitudes C_n indexed by logical label, plus the
// global clock they refer to.
struct QuantumState {
    Vector amplitudes;
    double time{0.0};

    std::size_t dimension() const { return static_cast<std::size_t>(amplitudes.size()); }
    cplx operator[](Label label) const { return amplitudes(static_cast<Eigen::Index>(label)); }
    double norm_squared() const { return amplitudes.squaredNorm(); }

    static QuantumState basis(std::size_t dimension, Label label, double time = 0.0) {
        if (label >= dimension) throw Error("basis label out of range");
        QuantumState s{Vector::Zero(static_cast<Eigen::Index>(dimension)), time};
        s.amplitudes(static_cast<Eigen::Index>(label)) = 1.0;
        return s;
    }

    // Unit-norm superposition from (label, amplitude) pairs; normalizes.
    static QuantumState superposition(std::size_t dimension,
                                      std::initializer_list<std::pair<Label, cplx>> terms,
                                      double time = 0.0) {
        QuantumState s{Vector::Zero(static_cast<Eigen::Index>(dimension)), time};
        for (const auto& [label, amp] : terms) {
            if (label >= dimension) throw Error("superposition label out of range");
            s.amplitudes(static_cast<Eigen::Index>(label)) += amp;
        }
        const double n = s.amplitudes.norm();
        if (n == 0.0) throw Error("superposition has zero norm");
        s.amplitudes /= n;
        return s;
    }
};

inline void check_normalized(const QuantumState& s, double tol = kNormTol) {
    if (std::abs(s.norm_squared() - 1.0) > tol) throw Error("state is not normalized");
}

// |C_n|^2 indexed by label.
inline std::vector<double> probabilities(const QuantumState& s) {
    std::vector<double> p(s.dimension());
    for (std::size_t n = 0; n < p.size(); ++n) p[n] = std::norm(s.amplitudes(static_cast<Eigen::Index>(n)));
    return p;
}

// Converts between label order and eigen-index order.
inline Vector to_eigen_order(const Spectrum& spec, const Vector& by_label) {
    Vector out(by_label.size());
    for (std::size_t n = 0; n < spec.dimension(); ++n)
        out(static_cast<Eigen::Index>(n)) = by_label(static_cast<Eigen::Index>(spec.labels[n]));
    return out;
}

inline Vector to_label_order(const Spectrum& spec, const Vector& by_index) {
    Vector out(by_index.size());
    for (std::size_t n = 0; n < spec.dimension(); ++n)
        out(static_cast<Eigen::Index>(spec.labels[n])) = by_index(static_cast<Eigen::Index>(n));
    return out;
}

} // namespace qubitless
