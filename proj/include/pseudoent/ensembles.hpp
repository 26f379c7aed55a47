#ifndef PSEUDOENT_ENSEMBLES_HPP
#define PSEUDOENT_ENSEMBLES_HPP

// Gate samplers: Haar, uniform Clifford, binary phase, basis permutation and
// their PFC composition U = P F C (C acts first on states).

#include "pseudoent/clifford.hpp"
#include "pseudoent/seed.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace pseudoent {

enum class SourceMode { TrulyRandom, Keyed, Identity };

struct EnsembleSpec {
    enum class Kind { Haar, Clifford, PFC, Identity };
    Kind kind = Kind::Haar;
    SourceMode perm_mode = SourceMode::TrulyRandom;
    SourceMode phase_mode = SourceMode::TrulyRandom;
    /// Forces the Clifford factor of PFC to the identity.
    bool clifford_identity = false;
    std::optional<std::uint64_t> key;

    static EnsembleSpec haar() { return {}; }
    static EnsembleSpec clifford() {
        EnsembleSpec s;
        s.kind = Kind::Clifford;
        return s;
    }
    static EnsembleSpec identity() {
        EnsembleSpec s;
        s.kind = Kind::Identity;
        return s;
    }
    static EnsembleSpec pfc(SourceMode perm = SourceMode::TrulyRandom, SourceMode phase = SourceMode::TrulyRandom,
                            std::optional<std::uint64_t> key = std::nullopt) {
        return {Kind::PFC, perm, phase, false, key};
    }

    bool keyed() const {
        return kind == Kind::PFC && (perm_mode == SourceMode::Keyed || phase_mode == SourceMode::Keyed);
    }

    void check() const {
        if (keyed() && !key) throw std::invalid_argument("ensemble: keyed mode requires a key");
    }

    std::string name() const {
        switch (kind) {
            case Kind::Haar: return "haar";
            case Kind::Clifford: return "clifford";
            case Kind::Identity: return "identity";
            case Kind::PFC: return keyed() ? "pfc:keyed" : "pfc";
        }
        return "?";
    }
};

/// Parses haar | clifford | pfc | pfc:keyed | identity.
inline EnsembleSpec parse_ensemble(const std::string& s, std::optional<std::uint64_t> key = std::nullopt) {
    if (s == "haar") return EnsembleSpec::haar();
    if (s == "clifford") return EnsembleSpec::clifford();
    if (s == "identity") return EnsembleSpec::identity();
    if (s == "pfc") return EnsembleSpec::pfc();
    if (s == "pfc:keyed") {
        if (!key) throw std::invalid_argument("ensemble pfc:keyed requires --key");
        return EnsembleSpec::pfc(SourceMode::Keyed, SourceMode::Keyed, key);
    }
    throw std::invalid_argument("unknown ensemble '" + s + "'");
}

struct UnitaryGate {
    int dim = 0;
    Eigen::MatrixXcd matrix;

    double unitarity_error() const {
        return (matrix.adjoint() * matrix - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
    }
};

namespace detail {

inline int qubit_count(std::uint64_t dim) {
    if (dim < 2 || (dim & (dim - 1))) throw std::invalid_argument("gate dimension must be a power of two");
    return std::countr_zero(dim);
}

inline constexpr std::uint64_t kPhaseDomain = 0x5048415345ULL;
inline constexpr std::uint64_t kPermDomain = 0x5045524dULL;
inline constexpr std::uint64_t kGateKeyDomain = 0x4b4559ULL;

/// Per-gate key: the ensemble key mixed with the gate's seed path.
inline std::uint64_t gate_key(std::uint64_t key, const SeedTree& node, std::uint64_t domain) {
    return keyed_hash(key, node.seed(), kGateKeyDomain ^ domain);
}

}  // namespace detail

/// Ginibre matrix, QR, and the phase fix Q diag(R_ii / |R_ii|).
inline UnitaryGate sample_haar(int d, const SeedTree& node) {
    if (d < 2) throw std::invalid_argument("sample_haar: d must be at least 2");
    auto gen = node.engine();
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    Eigen::MatrixXcd Z(d, d);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i) Z(i, j) = {normal(gen), normal(gen)};
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Z);
    Eigen::MatrixXcd Q = qr.householderQ();
    const Eigen::MatrixXcd& R = qr.matrixQR();
    for (int j = 0; j < d; ++j) {
        const double a = std::abs(R(j, j));
        if (a > 0) Q.col(j) *= R(j, j) / a;
    }
    return {d, std::move(Q)};
}

inline CliffordCircuit sample_clifford_circuit(int n, const SeedTree& node) {
    auto gen = node.engine();
    return sample_clifford_circuit(n, gen);
}

inline UnitaryGate sample_clifford(int n, const SeedTree& node) {
    if (n < 1 || n > 6) throw std::invalid_argument("sample_clifford: n must be in [1, 6]");
    const auto c = sample_clifford_circuit(n, node);
    return {1 << n, c.matrix()};
}

/// Signs (-1)^{f(x)} for x in [0, 2^n).
inline std::vector<signed char> sample_phase_signs(int n, SourceMode mode, std::optional<std::uint64_t> key,
                                                   const SeedTree& node) {
    if (n < 1 || n > 22) throw std::invalid_argument("sample_phase: n must be in [1, 22]");
    const std::uint64_t dim = std::uint64_t{1} << n;
    std::vector<signed char> s(dim, 1);
    switch (mode) {
        case SourceMode::Identity: break;
        case SourceMode::TrulyRandom: {
            auto gen = node.engine();
            for (std::uint64_t x = 0; x < dim; x += 64) {
                const std::uint64_t bits = gen();
                for (std::uint64_t b = 0; b < 64 && x + b < dim; ++b)
                    if ((bits >> b) & 1u) s[x + b] = -1;
            }
            break;
        }
        case SourceMode::Keyed: {
            if (!key) throw std::invalid_argument("sample_phase: keyed mode requires a key");
            const std::uint64_t k = detail::gate_key(*key, node, detail::kPhaseDomain);
            for (std::uint64_t x = 0; x < dim; ++x)
                if (keyed_hash(k, x, detail::kPhaseDomain) & 1u) s[x] = -1;
            break;
        }
    }
    return s;
}

inline UnitaryGate sample_phase(int n, SourceMode mode, std::optional<std::uint64_t> key, const SeedTree& node) {
    const auto s = sample_phase_signs(n, mode, key, node);
    const int dim = 1 << n;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
    for (int x = 0; x < dim; ++x) M(x, x) = s[x];
    return {dim, std::move(M)};
}

/// Four-round Feistel network on n-bit strings, halves of ceil(n/2) and
/// floor(n/2) bits. Even rounds update the high half, odd rounds the low half.
class FeistelPermutation {
public:
    FeistelPermutation(int n, std::uint64_t key, int rounds = 4) : n_(n), key_(key), rounds_(rounds) {
        if (n < 2 || n > 62) throw std::invalid_argument("FeistelPermutation: n must be in [2, 62]");
        lo_bits_ = n / 2;
        hi_bits_ = n - lo_bits_;
    }

    std::uint64_t operator()(std::uint64_t x) const {
        const std::uint64_t lo_mask = (std::uint64_t{1} << lo_bits_) - 1;
        const std::uint64_t hi_mask = (std::uint64_t{1} << hi_bits_) - 1;
        std::uint64_t hi = (x >> lo_bits_) & hi_mask;
        std::uint64_t lo = x & lo_mask;
        for (int r = 0; r < rounds_; ++r) {
            if (r % 2 == 0) {
                hi ^= keyed_hash(key_, lo, detail::kPermDomain + r) & hi_mask;
            } else {
                lo ^= keyed_hash(key_, hi, detail::kPermDomain + r) & lo_mask;
            }
        }
        return (hi << lo_bits_) | lo;
    }

    int n() const { return n_; }

private:
    int n_;
    std::uint64_t key_;
    int rounds_;
    int lo_bits_ = 0;
    int hi_bits_ = 0;
};

/// Basis permutation as an image table: |x> -> |image[x]>.
inline std::vector<std::uint32_t> sample_permutation_table(int n, SourceMode mode, std::optional<std::uint64_t> key,
                                                           const SeedTree& node) {
    if (n < 1 || n > 22) throw std::invalid_argument("sample_permutation: n must be in [1, 22]");
    const std::uint32_t dim = std::uint32_t{1} << n;
    std::vector<std::uint32_t> image(dim);
    for (std::uint32_t x = 0; x < dim; ++x) image[x] = x;
    if (mode == SourceMode::Identity) return image;
    if (mode == SourceMode::Keyed) {
        if (!key) throw std::invalid_argument("sample_permutation: keyed mode requires a key");
        const std::uint64_t k = detail::gate_key(*key, node, detail::kPermDomain);
        if (n >= 2) {
            const FeistelPermutation f(n, k);
            for (std::uint32_t x = 0; x < dim; ++x) image[x] = static_cast<std::uint32_t>(f(x));
            return image;
        }
        // One bit has no two halves; use a key-derived stream instead.
        std::mt19937_64 gen(k);
        std::shuffle(image.begin(), image.end(), gen);
        return image;
    }
    auto gen = node.engine();
    std::shuffle(image.begin(), image.end(), gen);
    return image;
}

inline UnitaryGate sample_permutation(int n, SourceMode mode, std::optional<std::uint64_t> key, const SeedTree& node) {
    const auto image = sample_permutation_table(n, mode, key, node);
    const int dim = 1 << n;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
    for (int x = 0; x < dim; ++x) M(image[x], x) = 1.0;
    return {dim, std::move(M)};
}

/// P F C kept in factored form; applies to blocks of any qubit count.
struct PfcGate {
    int n = 0;
    CliffordCircuit clifford;
    std::vector<signed char> phase;
    std::vector<std::uint32_t> perm;

    void apply_rows(RowMatrixXcd& block) const {
        clifford.apply_rows(block);
        const auto dim = static_cast<Eigen::Index>(perm.size());
        RowMatrixXcd out(block.rows(), block.cols());
        for (Eigen::Index x = 0; x < dim; ++x) {
            if (phase[x] < 0) {
                out.row(perm[x]) = -block.row(x);
            } else {
                out.row(perm[x]) = block.row(x);
            }
        }
        block = std::move(out);
    }

    Eigen::MatrixXcd matrix() const {
        if (n > 12) throw std::length_error("PfcGate::matrix: too many qubits for a dense matrix");
        const auto dim = static_cast<Eigen::Index>(perm.size());
        RowMatrixXcd M = RowMatrixXcd::Identity(dim, dim);
        apply_rows(M);
        return M;
    }
};

/// Seed-path children used for the three PFC factors.
enum PfcStream : std::uint64_t { kCliffordStream = 0, kPhaseStream = 1, kPermStream = 2 };

inline PfcGate sample_pfc_gate(int n, const EnsembleSpec& spec, const SeedTree& node) {
    spec.check();
    PfcGate g;
    g.n = n;
    g.clifford = spec.clifford_identity ? CliffordCircuit::identity(n)
                                        : sample_clifford_circuit(n, node.child(kCliffordStream));
    g.phase = sample_phase_signs(n, spec.phase_mode, spec.key, node.child(kPhaseStream));
    g.perm = sample_permutation_table(n, spec.perm_mode, spec.key, node.child(kPermStream));
    return g;
}

inline UnitaryGate sample_pfc(int n, const EnsembleSpec& spec, const SeedTree& node) {
    if (n < 1 || n > 6) throw std::invalid_argument("sample_pfc: n must be in [1, 6]");
    const auto g = sample_pfc_gate(n, spec, node);
    return {1 << n, g.matrix()};
}

/// A sampled gate in whichever form is cheapest to apply.
class SampledGate {
public:
    SampledGate() = default;
    explicit SampledGate(Eigen::MatrixXcd dense) : dim_(static_cast<int>(dense.rows())), impl_(std::move(dense)) {}
    explicit SampledGate(CliffordCircuit c) : dim_(1 << c.n), impl_(std::move(c)) {}
    explicit SampledGate(PfcGate p) : dim_(1 << p.n), impl_(std::move(p)) {}
    static SampledGate identity(int dim) {
        SampledGate g;
        g.dim_ = dim;
        return g;
    }

    int dim() const { return dim_; }

    /// block <- U block, for a (dim x cols) row-major block.
    void apply_rows(RowMatrixXcd& block) const {
        if (block.rows() != dim_) throw std::invalid_argument("SampledGate: block has wrong row count");
        std::visit(
            [&](const auto& g) {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, Eigen::MatrixXcd>) {
                    block = (g * block).eval();
                } else if constexpr (!std::is_same_v<T, std::monostate>) {
                    g.apply_rows(block);
                }
            },
            impl_);
    }

    Eigen::MatrixXcd matrix() const {
        RowMatrixXcd M = RowMatrixXcd::Identity(dim_, dim_);
        apply_rows(M);
        return M;
    }

private:
    int dim_ = 0;
    std::variant<std::monostate, Eigen::MatrixXcd, CliffordCircuit, PfcGate> impl_;
};

/// Samples one gate of dimension `dim` from `spec` at seed node `node`.
inline SampledGate sample_gate(int dim, const EnsembleSpec& spec, const SeedTree& node) {
    switch (spec.kind) {
        case EnsembleSpec::Kind::Identity: return SampledGate::identity(dim);
        case EnsembleSpec::Kind::Haar: return SampledGate(sample_haar(dim, node).matrix);
        case EnsembleSpec::Kind::Clifford:
            return SampledGate(sample_clifford_circuit(detail::qubit_count(dim), node.child(kCliffordStream)));
        case EnsembleSpec::Kind::PFC: return SampledGate(sample_pfc_gate(detail::qubit_count(dim), spec, node));
    }
    throw std::logic_error("sample_gate: unknown ensemble kind");
}

}  // namespace pseudoent

#endif  // PSEUDOENT_ENSEMBLES_HPP
