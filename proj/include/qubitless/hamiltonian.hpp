// hamiltonian.hpp - static Heisenberg Hamiltonian and spin operators on the
// 2^L product basis.
//
// Basis convention: bit k of a basis index is 1 when spin k points down.
// Logical labels use the same integer, so logical qubit k is carried by
// spin k and the most significant logical bit sits on the last spin of the
// chain (the one with the largest Larmor frequency in a rising gradient).

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>

#include "qubitless/chain.hpp"
#include "qubitless/errors.hpp"

namespace qubitless {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermiticityTol = 1e-12;

class HermitianOperator {
public:
    HermitianOperator() = default;

    explicit HermitianOperator(Matrix m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols()) throw Error("HermitianOperator: matrix is not square");
        const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
        const double asym = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
        if (asym > kHermiticityTol * scale)
            throw Error("HermitianOperator: matrix is not Hermitian (max |A - A^H| = " +
                        std::to_string(asym) + ")");
    }

    const Matrix& matrix() const { return m_; }
    std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }

    // Largest eigenvalue magnitude bound; the Frobenius norm is cheap and safe.
    double norm() const { return m_.norm(); }

private:
    Matrix m_;
};

// m_z of a single spin in basis state `index`.
inline double spin_z(std::size_t index, std::size_t k) {
    return ((index >> k) & 1u) ? -0.5 : 0.5;
}

// Number of down spins; the total projection is L/2 - down_count.
inline std::size_t down_count(std::size_t index) {
    return static_cast<std::size_t>(std::popcount(static_cast<std::uint64_t>(index)));
}

inline double total_z(std::size_t index, std::size_t length) {
    return 0.5 * static_cast<double>(length) - static_cast<double>(down_count(index));
}

// Diagonal of I^z_tot.
inline RealVector total_z_diagonal(std::size_t length) {
    const std::size_t d = std::size_t{1} << length;
    RealVector z(static_cast<Eigen::Index>(d));
    for (std::size_t s = 0; s < d; ++s) z(static_cast<Eigen::Index>(s)) = total_z(s, length);
    return z;
}

// Sum_k I^-_k: flips one up spin down.
inline Matrix total_lowering(std::size_t length) {
    const std::size_t d = std::size_t{1} << length;
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t s = 0; s < d; ++s)
        for (std::size_t k = 0; k < length; ++k)
            if (!((s >> k) & 1u))
                m(static_cast<Eigen::Index>(s | (std::size_t{1} << k)), static_cast<Eigen::Index>(s)) += 1.0;
    return m;
}

// Sum_k I^x_k = (S^- + S^+) / 2.
inline Matrix total_x(std::size_t length) {
    Matrix lower = total_lowering(length);
    return 0.5 * (lower + lower.adjoint());
}

// H = -sum_k omega_k I^z_k - 2J sum_k I_k . I_{k+1}, open chain.
inline HermitianOperator build_hamiltonian(const ChainConfig& cfg,
                                           std::size_t max_length = kDefaultMaxLength) {
    check_shape(cfg, max_length);
    const std::size_t L = cfg.length;
    const std::size_t d = cfg.dimension();
    const double J = cfg.coupling;
    Matrix h = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t s = 0; s < d; ++s) {
        const auto i = static_cast<Eigen::Index>(s);
        double diag = 0.0;
        for (std::size_t k = 0; k < L; ++k) diag -= cfg.larmor[k] * spin_z(s, k);
        for (std::size_t k = 0; k + 1 < L; ++k) {
            diag -= 2.0 * J * spin_z(s, k) * spin_z(s, k + 1);
            // I^x I^x + I^y I^y = (I^+ I^- + I^- I^+) / 2 swaps antiparallel neighbours
            if (spin_z(s, k) != spin_z(s, k + 1)) {
                const std::size_t t = s ^ (std::size_t{1} << k) ^ (std::size_t{1} << (k + 1));
                h(static_cast<Eigen::Index>(t), i) += -J;
            }
        }
        h(i, i) += diag;
    }
    return HermitianOperator(std::move(h));
}

// Total spin squared, used only to check commutation properties.
inline Matrix total_spin_squared(std::size_t length) {
    Matrix lower = total_lowering(length);
    Matrix raise = lower.adjoint();
    RealVector z = total_z_diagonal(length);
    Matrix zz = z.cwiseProduct(z).cast<cplx>().asDiagonal();
    Matrix zm = z.cast<cplx>().asDiagonal();
    // I^2 = I^- I^+ + I^z (I^z + 1)
    return lower * raise + zz + zm;
}

} // namespace qubitless
