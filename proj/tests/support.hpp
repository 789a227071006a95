// Shared helpers for the test binaries: an independent Kronecker-product
// Hamiltonian and seeded random instances.

#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "qubitless/chain.hpp"
#include "qubitless/hamiltonian.hpp"

namespace qubitless::testing {

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Single-spin operator placed on spin k; bit k of the basis index is spin k.
inline Matrix embed(const Eigen::Matrix2cd& op, std::size_t length, std::size_t k) {
    Matrix out = Matrix::Identity(1, 1);
    for (std::size_t j = length; j-- > 0;) {
        const Matrix f = (j == k) ? Matrix(op) : Matrix::Identity(2, 2);
        out = kron(out, f);
    }
    return out;
}

struct SpinOps {
    Eigen::Matrix2cd x, y, z;
    SpinOps() {
        const cplx i{0.0, 1.0};
        x << 0.0, 0.5, 0.5, 0.0;
        y << 0.0, -0.5 * i, 0.5 * i, 0.0;
        z << 0.5, 0.0, 0.0, -0.5;
    }
};

// H = -sum w_k I^z_k - 2J sum I_k . I_{k+1}, built from Kronecker products.
inline Matrix kron_hamiltonian(const ChainConfig& cfg) {
    const SpinOps s;
    const auto d = static_cast<Eigen::Index>(cfg.dimension());
    Matrix h = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < cfg.length; ++k) h -= cfg.larmor[k] * embed(s.z, cfg.length, k);
    for (std::size_t k = 0; k + 1 < cfg.length; ++k)
        for (const auto* op : {&s.x, &s.y, &s.z})
            h -= 2.0 * cfg.coupling * embed(*op, cfg.length, k) * embed(*op, cfg.length, k + 1);
    return h;
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline std::size_t pick(std::mt19937_64& g, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(g);
}

// Strictly increasing random field, J in [0.5, 3], gaps in [10, 60] J.
inline ChainConfig random_chain(std::mt19937_64& g, std::size_t length) {
    ChainConfig cfg;
    cfg.length = length;
    cfg.coupling = uniform(g, 0.5, 3.0);
    cfg.rabi = uniform(g, 0.05, 1.0);
    double w = uniform(g, 80.0, 120.0);
    for (std::size_t k = 0; k < length; ++k) {
        cfg.larmor.push_back(w);
        w += cfg.coupling * uniform(g, 10.0, 60.0);
    }
    return cfg;
}

} // namespace qubitless::testing
