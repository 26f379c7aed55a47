#include "pseudoent/ensembles.hpp"
#include "pseudoent/replica.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <map>
#include <set>
#include <sstream>

using namespace pseudoent;

namespace {

double unitarity_error(const Eigen::MatrixXcd& U) {
    return (U.adjoint() * U - Eigen::MatrixXcd::Identity(U.rows(), U.cols())).cwiseAbs().maxCoeff();
}

// U with its global phase removed, rounded, as a hashable key.
std::string phase_key(const Eigen::MatrixXcd& U) {
    cplx ph = 0;
    for (Eigen::Index k = 0; k < U.size() && std::abs(ph) < 1e-9; ++k) ph = U.data()[k];
    ph /= std::abs(ph);
    std::ostringstream os;
    for (Eigen::Index k = 0; k < U.size(); ++k) {
        const cplx v = U.data()[k] / ph;
        os << std::lround(v.real() * 1e6) << ',' << std::lround(v.imag() * 1e6) << ';';
    }
    return os.str();
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd r(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
}

// Whole two-qubit Clifford group modulo phases, by closure from H, S, CNOT.
std::vector<Eigen::MatrixXcd> two_qubit_clifford_group() {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXcd H(2, 2), S(2, 2), I = Eigen::MatrixXcd::Identity(2, 2), CX = Eigen::MatrixXcd::Zero(4, 4);
    H << r, r, r, -r;
    S << 1, 0, 0, cplx(0, 1);
    CX(0, 0) = CX(1, 1) = CX(2, 3) = CX(3, 2) = 1;
    const std::vector<Eigen::MatrixXcd> gens{kron(H, I), kron(I, H), kron(S, I), kron(I, S), CX};
    std::set<std::string> seen;
    std::vector<Eigen::MatrixXcd> out;
    std::deque<Eigen::MatrixXcd> todo{Eigen::MatrixXcd::Identity(4, 4)};
    seen.insert(phase_key(todo.front()));
    while (!todo.empty()) {
        const Eigen::MatrixXcd U = todo.front();
        todo.pop_front();
        out.push_back(U);
        for (const auto& g : gens) {
            Eigen::MatrixXcd V = g * U;
            if (seen.insert(phase_key(V)).second) todo.push_back(V);
        }
    }
    return out;
}

Eigen::MatrixXcd power_projector(const Eigen::VectorXcd& psi, int m) {
    Eigen::VectorXcd v = psi;
    for (int c = 1; c < m; ++c) {
        Eigen::VectorXcd w(v.size() * psi.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) w.segment(i * psi.size(), psi.size()) = v(i) * psi;
        v = w;
    }
    return v * v.adjoint();
}

}  // namespace

TEST(Haar, UnitaryAndReproducible) {
    for (int d : {2, 3, 8}) {
        const auto a = sample_haar(d, SeedTree(5).child(1));
        const auto b = sample_haar(d, SeedTree(5).child(1));
        EXPECT_LT(unitarity_error(a.matrix), 1e-12);
        EXPECT_EQ((a.matrix - b.matrix).cwiseAbs().maxCoeff(), 0.0);
    }
    const auto c = sample_haar(2, SeedTree(6).child(1));
    EXPECT_GT((c.matrix - sample_haar(2, SeedTree(5).child(1)).matrix).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Haar, FirstAndSecondMoments) {
    const int d = 4, samples = 10000;
    Eigen::MatrixXcd first = Eigen::MatrixXcd::Zero(d, d);
    double sum = 0.0, sum2 = 0.0;
    const SeedTree root(42);
    for (int s = 0; s < samples; ++s) {
        const auto U = sample_haar(d, root.child(s)).matrix;
        const Eigen::VectorXcd col = U.col(0);
        first += col * col.adjoint();
        const double p = std::norm(U(0, 0));
        sum += p * p;
        sum2 += p * p * p * p;
    }
    first /= samples;
    EXPECT_LT((first - Eigen::MatrixXcd::Identity(d, d) / d).cwiseAbs().maxCoeff(), 5.0 / std::sqrt(samples));
    const double mean = sum / samples;
    const double se = std::sqrt((sum2 / samples - mean * mean) / samples);
    EXPECT_LT(std::abs(mean - 0.1), 5.0 * se);
}

TEST(Clifford, SingleQubitConjugatesPaulis) {
    Eigen::MatrixXcd X(2, 2), Y(2, 2), Z(2, 2);
    X << 0, 1, 1, 0;
    Y << 0, cplx(0, -1), cplx(0, 1), 0;
    Z << 1, 0, 0, -1;
    const SeedTree root(3);
    for (int s = 0; s < 200; ++s) {
        const auto U = sample_clifford(1, root.child(s)).matrix;
        EXPECT_LT(unitarity_error(U), 1e-12);
        const Eigen::MatrixXcd P = U * X * U.adjoint();
        bool hit = false;
        for (const auto* Q : {&X, &Y, &Z})
            hit = hit || (P - *Q).cwiseAbs().maxCoeff() < 1e-12 || (P + *Q).cwiseAbs().maxCoeff() < 1e-12;
        EXPECT_TRUE(hit);
    }
}

TEST(Clifford, SingleQubitUniformOver24) {
    const int samples = 24000;
    std::map<std::string, int> count;
    const SeedTree root(8);
    for (int s = 0; s < samples; ++s) ++count[phase_key(sample_clifford(1, root.child(s)).matrix)];
    ASSERT_EQ(count.size(), 24u);
    const double p = 1.0 / 24.0;
    const double sigma = std::sqrt(samples * p * (1 - p));
    const int id = count[phase_key(Eigen::MatrixXcd::Identity(2, 2))];
    EXPECT_LT(std::abs(id - samples * p), 5 * sigma);
    double chi2 = 0.0;
    for (const auto& [k, c] : count) chi2 += (c - samples * p) * (c - samples * p) / (samples * p);
    // 23 degrees of freedom.
    EXPECT_LT(chi2, 23 + 5 * std::sqrt(46.0));
}

TEST(Clifford, TwoQubitUniformOver11520) {
    const auto group = two_qubit_clifford_group();
    ASSERT_EQ(group.size(), 11520u);
    std::map<std::string, int> count;
    for (const auto& U : group) count[phase_key(U)] = 0;
    const int samples = 115200;
    const SeedTree root(9);
    for (int s = 0; s < samples; ++s) {
        auto it = count.find(phase_key(sample_clifford(2, root.child(s)).matrix));
        ASSERT_NE(it, count.end());
        ++it->second;
    }
    const double e = static_cast<double>(samples) / 11520.0;
    double chi2 = 0.0;
    for (const auto& [k, c] : count) chi2 += (c - e) * (c - e) / e;
    const double df = 11519.0;
    EXPECT_LT(std::abs(chi2 - df), 5 * std::sqrt(2 * df));
}

TEST(Clifford, GroupIsExactThreeDesignButNotFour) {
    const auto group = two_qubit_clifford_group();
    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(4);
    zero(0) = 1.0;
    for (int m : {2, 3, 4}) {
        const Eigen::Index n = static_cast<Eigen::Index>(std::pow(4, m));
        Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(n, n);
        for (const auto& U : group) avg += power_projector(U.col(0), m);
        avg /= static_cast<double>(group.size());
        // The Haar state moment is the normalized projector onto Sym^m.
        const SymmetricBasis basis(4, m);
        const Eigen::MatrixXcd in_sym = basis.project(avg);
        const Eigen::MatrixXcd haar = Eigen::MatrixXcd::Identity(basis.size(), basis.size()) / double(basis.size());
        const double dist = trace_norm(in_sym - haar);
        if (m < 4) {
            EXPECT_LT(dist, 1e-10) << "m=" << m;
        } else {
            EXPECT_GT(dist, 1e-2);
        }
    }
}

TEST(Phase, ForcedIdentityAndSignEntries) {
    const SeedTree node(1);
    const auto I = sample_phase(3, SourceMode::Identity, std::nullopt, node).matrix;
    EXPECT_EQ((I - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff(), 0.0);
    for (auto mode : {SourceMode::TrulyRandom, SourceMode::Keyed}) {
        const auto M = sample_phase(4, mode, 77, node).matrix;
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j) {
                if (i == j) {
                    EXPECT_TRUE(M(i, i) == cplx(1.0) || M(i, i) == cplx(-1.0));
                } else {
                    EXPECT_EQ(M(i, j), cplx(0.0));
                }
            }
    }
    EXPECT_THROW(sample_phase(2, SourceMode::Keyed, std::nullopt, node), std::invalid_argument);
}

TEST(Phase, KeyedIsDeterministicAndBalanced) {
    const int n = 10;
    const SeedTree node(4);
    const auto a = sample_phase_signs(n, SourceMode::Keyed, 1234, node);
    EXPECT_EQ(a, sample_phase_signs(n, SourceMode::Keyed, 1234, node));
    for (std::uint64_t other : {1235ULL, 99ULL, 0xdeadbeefULL}) {
        const auto b = sample_phase_signs(n, SourceMode::Keyed, other, node);
        int hamming = 0;
        for (std::size_t x = 0; x < a.size(); ++x) hamming += a[x] != b[x];
        const double mean = 1 << (n - 1);
        EXPECT_LT(std::abs(hamming - mean), 5.0 * std::sqrt((1 << n) / 4.0));
    }
}

TEST(Permutation, ForcedIdentityAndPermutationMatrix) {
    const SeedTree node(2);
    const auto I = sample_permutation(3, SourceMode::Identity, std::nullopt, node).matrix;
    EXPECT_EQ((I - Eigen::MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff(), 0.0);
    for (auto mode : {SourceMode::TrulyRandom, SourceMode::Keyed}) {
        for (int n : {1, 3, 5}) {
            const auto M = sample_permutation(n, mode, 5, node).matrix;
            const Eigen::VectorXd rows = M.cwiseAbs().rowwise().sum();
            const Eigen::VectorXd cols = M.cwiseAbs().colwise().sum().transpose();
            EXPECT_TRUE(rows.isOnes());
            EXPECT_TRUE(cols.isOnes());
        }
    }
}

TEST(Permutation, FeistelIsBijective) {
    for (int n = 2; n <= 12; ++n) {
        for (std::uint64_t key : {1ULL, 42ULL, 0x123456789ULL}) {
            const FeistelPermutation f(n, key);
            std::vector<char> hit(std::size_t{1} << n, 0);
            for (std::uint64_t x = 0; x < hit.size(); ++x) {
                const auto y = f(x);
                ASSERT_LT(y, hit.size());
                ASSERT_FALSE(hit[y]) << "n=" << n;
                hit[y] = 1;
            }
        }
    }
}

TEST(Pfc, UnitaryAndFactorOrder) {
    const auto spec = EnsembleSpec::pfc();
    const SeedTree node(12);
    const auto g = sample_pfc_gate(3, spec, node);
    const auto U = g.matrix();
    EXPECT_LT(unitarity_error(U), 1e-11);
    const auto C = g.clifford.matrix();
    Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(8, 8), P = Eigen::MatrixXcd::Zero(8, 8);
    for (int x = 0; x < 8; ++x) {
        F(x, x) = g.phase[x];
        P(g.perm[x], x) = 1.0;
    }
    EXPECT_LT((U - P * F * C).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Pfc, ForcedFactorsReduceToClifford) {
    const auto spec = EnsembleSpec::pfc(SourceMode::Identity, SourceMode::Identity);
    for (int s = 0; s < 10; ++s) {
        const SeedTree node = SeedTree(3).child(s);
        const auto a = sample_pfc(2, spec, node).matrix;
        const auto b = sample_clifford(2, node.child(kCliffordStream)).matrix;
        EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(Pfc, MonteCarloTwoDesign) {
    for (int n : {2, 3}) {
        for (const auto& spec : {EnsembleSpec::pfc(), EnsembleSpec::pfc(SourceMode::Keyed, SourceMode::Keyed, 31)}) {
            const int d = 1 << n;
            const int samples = 10000;
            Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d * d, d * d);
            Eigen::MatrixXcd sum2 = Eigen::MatrixXcd::Zero(d * d, d * d);
            const SeedTree root(100 + n);
            for (int s = 0; s < samples; ++s) {
                const Eigen::VectorXcd col = sample_pfc(n, spec, root.child(s)).matrix.col(0);
                const Eigen::MatrixXcd p = power_projector(col, 2);
                sum += p;
                sum2 += p.cwiseAbs2();
            }
            const Eigen::MatrixXcd mean = sum / samples;
            const auto haar = haar_state_moment(RegisterLayout{{d}, 2}).matrix;
            for (Eigen::Index i = 0; i < mean.rows(); ++i)
                for (Eigen::Index j = 0; j < mean.cols(); ++j) {
                    const double var = sum2(i, j).real() / samples - std::norm(mean(i, j));
                    const double se = std::sqrt(std::max(var, 0.0) / samples) + 1e-12;
                    EXPECT_LT(std::abs(mean(i, j) - haar(i, j)), 5 * se + 1e-12) << spec.name() << " n=" << n;
                }
        }
    }
}

TEST(SampledGate, FactoredFormsMatchDenseMatrices) {
    const SeedTree node(21);
    for (const auto& spec : {EnsembleSpec::haar(), EnsembleSpec::clifford(), EnsembleSpec::pfc(), EnsembleSpec::identity()}) {
        const auto g = sample_gate(8, spec, node);
        const Eigen::MatrixXcd U = g.matrix();
        EXPECT_LT(unitarity_error(U), 1e-11);
        RowMatrixXcd block = RowMatrixXcd::Random(8, 5);
        const Eigen::MatrixXcd expect = U * block;
        g.apply_rows(block);
        EXPECT_LT((Eigen::MatrixXcd(block) - expect).cwiseAbs().maxCoeff(), 1e-12) << spec.name();
    }
}

TEST(EnsembleSpec, Parsing) {
    EXPECT_EQ(parse_ensemble("haar").name(), "haar");
    EXPECT_EQ(parse_ensemble("clifford").name(), "clifford");
    EXPECT_EQ(parse_ensemble("pfc").name(), "pfc");
    EXPECT_EQ(parse_ensemble("pfc:keyed", 5).name(), "pfc:keyed");
    EXPECT_THROW(parse_ensemble("pfc:keyed"), std::invalid_argument);
    EXPECT_THROW(parse_ensemble("gue"), std::invalid_argument);
}
