#ifndef PSEUDOENT_CLIFFORD_HPP
#define PSEUDOENT_CLIFFORD_HPP

// Uniform sampling of the n-qubit Clifford group (modulo global phase).
//
// Hadamard-free Cliffords F (generated by X, S, CZ, CNOT) are exactly the
// Cliffords that map Z-type Paulis to Z-type Paulis. The group splits into
// n+1 double cosets F H_k F, where H_k is a Hadamard on k qubits. The coset
// sizes are proportional to the number of Lagrangian subspaces meeting the
// Z-Lagrangian in dimension n-k:
//     [n choose k]_2 * 2^{k(k+1)/2} / prod_{i=1..n} (2^i + 1).
// Drawing k from that law and F1, F2 uniformly from F makes F1 H_k F2
// uniform on the Clifford group, since (a, b) -> a H_k b has equal fibers.
//
// Qubit j is bit j of a basis-state index.

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace pseudoent {

using RowMatrixXcd = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace detail {

inline int parity(std::uint32_t x) { return std::popcount(x) & 1; }

/// Rank of a set of GF(2) row vectors.
inline int gf2_rank(std::vector<std::uint32_t> rows) {
    int rank = 0;
    for (int bit = 31; bit >= 0; --bit) {
        const std::uint32_t mask = std::uint32_t{1} << bit;
        std::size_t pivot = rank;
        while (pivot < rows.size() && !(rows[pivot] & mask)) ++pivot;
        if (pivot == rows.size()) continue;
        std::swap(rows[rank], rows[pivot]);
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (r != static_cast<std::size_t>(rank) && (rows[r] & mask)) rows[r] ^= rows[rank];
        ++rank;
    }
    return rank;
}

}  // namespace detail

/// x -> i^{q(Ax)} (-1)^{b.(Ax)} |Ax xor a>, q(y) = sum_i G_ii y_i + 2 sum_{i<j} G_ij y_i y_j.
struct HadamardFreeClifford {
    int n = 0;
    std::vector<std::uint32_t> rows;   ///< A as row bitmasks: (Ax)_i = parity(rows[i] & x)
    std::vector<std::uint32_t> gamma;  ///< symmetric G as row bitmasks
    std::uint32_t x_flips = 0;         ///< a
    std::uint32_t z_signs = 0;         ///< b

    static HadamardFreeClifford identity(int n) {
        HadamardFreeClifford f;
        f.n = n;
        f.rows.resize(n);
        f.gamma.assign(n, 0);
        for (int i = 0; i < n; ++i) f.rows[i] = std::uint32_t{1} << i;
        return f;
    }

    std::uint32_t linear(std::uint32_t x) const {
        std::uint32_t y = 0;
        for (int i = 0; i < n; ++i) y |= static_cast<std::uint32_t>(detail::parity(rows[i] & x)) << i;
        return y;
    }

    /// Image basis index and phase of |x>.
    std::pair<std::uint32_t, std::complex<double>> map(std::uint32_t x) const {
        const std::uint32_t y = linear(x);
        int q = 0;
        for (int i = 0; i < n; ++i) {
            if (!((y >> i) & 1u)) continue;
            q += (gamma[i] >> i) & 1u;
            for (int j = i + 1; j < n; ++j)
                if (((y >> j) & 1u) && ((gamma[i] >> j) & 1u)) q += 2;
        }
        q += 2 * detail::parity(z_signs & y);
        static const std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        return {y ^ x_flips, ipow[q & 3]};
    }

    template <class Gen>
    static HadamardFreeClifford sample(int n, Gen& gen) {
        HadamardFreeClifford f;
        f.n = n;
        std::uniform_int_distribution<std::uint32_t> bits(0, n == 32 ? 0xffffffffu : (std::uint32_t{1} << n) - 1);
        do {
            f.rows.resize(n);
            for (auto& r : f.rows) r = bits(gen);
        } while (detail::gf2_rank(f.rows) != n);
        f.gamma.assign(n, 0);
        std::bernoulli_distribution coin(0.5);
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                if (coin(gen)) {
                    f.gamma[i] |= std::uint32_t{1} << j;
                    f.gamma[j] |= std::uint32_t{1} << i;
                }
            }
        }
        f.x_flips = bits(gen);
        f.z_signs = bits(gen);
        return f;
    }
};

/// Probability that a uniform Clifford lies in the double coset F H_k F.
inline double clifford_coset_probability(int n, int k) {
    // Gaussian binomial [n choose k]_2
    double gb = 1.0;
    for (int i = 0; i < k; ++i) gb *= (std::ldexp(1.0, n - i) - 1.0) / (std::ldexp(1.0, i + 1) - 1.0);
    double total = 1.0;
    for (int i = 1; i <= n; ++i) total *= std::ldexp(1.0, i) + 1.0;
    return gb * std::ldexp(1.0, k * (k + 1) / 2) / total;
}

/// A Clifford as outer * H_{0..k-1} * inner.
struct CliffordCircuit {
    int n = 0;
    HadamardFreeClifford inner;
    int hadamards = 0;
    HadamardFreeClifford outer;

    static CliffordCircuit identity(int n) {
        return {n, HadamardFreeClifford::identity(n), 0, HadamardFreeClifford::identity(n)};
    }

    /// Applies to the rows of a (2^n x cols) row-major block.
    void apply_rows(RowMatrixXcd& block) const {
        apply_monomial(inner, block);
        const double s = 1.0 / std::sqrt(2.0);
        const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << n);
        for (int j = 0; j < hadamards; ++j) {
            const Eigen::Index bit = Eigen::Index{1} << j;
            for (Eigen::Index r = 0; r < dim; ++r) {
                if (r & bit) continue;
                auto u = block.row(r).eval();
                auto v = block.row(r | bit).eval();
                block.row(r) = s * (u + v);
                block.row(r | bit) = s * (u - v);
            }
        }
        apply_monomial(outer, block);
    }

    Eigen::MatrixXcd matrix() const {
        if (n > 12) throw std::length_error("CliffordCircuit::matrix: too many qubits for a dense matrix");
        const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << n);
        RowMatrixXcd M = RowMatrixXcd::Identity(dim, dim);
        apply_rows(M);
        return M;
    }

private:
    static void apply_monomial(const HadamardFreeClifford& f, RowMatrixXcd& block) {
        const auto dim = static_cast<Eigen::Index>(std::uint64_t{1} << f.n);
        RowMatrixXcd out(block.rows(), block.cols());
        for (Eigen::Index x = 0; x < dim; ++x) {
            const auto [y, phase] = f.map(static_cast<std::uint32_t>(x));
            out.row(static_cast<Eigen::Index>(y)) = phase * block.row(x);
        }
        block = std::move(out);
    }
};

template <class Gen>
CliffordCircuit sample_clifford_circuit(int n, Gen& gen) {
    if (n < 1 || n > 30) throw std::invalid_argument("sample_clifford_circuit: n out of range");
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double u = u01(gen);
    int k = 0;
    for (; k < n; ++k) {
        u -= clifford_coset_probability(n, k);
        if (u < 0) break;
    }
    CliffordCircuit c;
    c.n = n;
    c.inner = HadamardFreeClifford::sample(n, gen);
    c.hadamards = k;
    c.outer = HadamardFreeClifford::sample(n, gen);
    return c;
}

}  // namespace pseudoent

#endif  // PSEUDOENT_CLIFFORD_HPP
