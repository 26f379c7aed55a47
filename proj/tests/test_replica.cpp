#include "pseudoent/ensembles.hpp"
#include "pseudoent/replica.hpp"

#include <gtest/gtest.h>
#include <unsupported/Eigen/KroneckerProduct>

#include <random>

using namespace pseudoent;

namespace {

Eigen::MatrixXcd random_hermitian(Eigen::Index n, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g;
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cplx(g(gen), g(gen));
    return (a + a.adjoint()) / 2.0;
}

Eigen::MatrixXcd swap_operator(int d) {
    Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) F(j * d + i, i * d + j) = 1.0;
    return F;
}

}  // namespace

TEST(ReplicaOperator, TraceCountsCycles) {
    for (int m = 1; m <= 4; ++m) {
        const RegisterLayout layout{{2, 3}, m};
        for (const auto& s : enumerate_group(m)) EXPECT_EQ(ReplicaOperator(s, layout).trace(), upow(6, s.cycle_count()));
    }
}

TEST(ReplicaOperator, IsRepresentation) {
    const RegisterLayout layout{{2, 2}, 3};
    for (const auto& a : enumerate_group(3))
        for (const auto& b : enumerate_group(3)) {
            const Eigen::MatrixXcd lhs = ReplicaOperator(a * b, layout).dense();
            const Eigen::MatrixXcd rhs = ReplicaOperator(a, layout).dense() * ReplicaOperator(b, layout).dense();
            EXPECT_EQ((lhs - rhs).cwiseAbs().maxCoeff(), 0.0);
        }
}

TEST(ReplicaOperator, TranspositionIsSwap) {
    const RegisterLayout layout{{3}, 2};
    const auto F = ReplicaOperator(Permutation::transposition(2, 0, 1), layout).dense();
    EXPECT_EQ((F - swap_operator(3)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ReplicaOperator, SendsCopyContentToImageCopy) {
    // sigma = (0 -> 1 -> 2 -> 0): |a>|b>|c> goes to |c>|a>|b>.
    const RegisterLayout layout{{3}, 3};
    const ReplicaOperator op(Permutation({1, 2, 0}), layout);
    const Index a = 0, b = 1, c = 2;
    EXPECT_EQ(op.image()[a * 9 + b * 3 + c], c * 9 + a * 3 + b);
}

TEST(HaarStateMoment, IsNormalizedSymmetricProjector) {
    for (int m = 1; m <= 3; ++m) {
        const RegisterLayout layout{{2, 2}, m};
        const auto rho = haar_state_moment(layout);
        EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
        const auto ev = hermitian_eigenvalues(rho.matrix);
        const double top = ev.maxCoeff();
        for (Eigen::Index i = 0; i < ev.size(); ++i) EXPECT_TRUE(std::abs(ev(i)) < 1e-12 || std::abs(ev(i) - top) < 1e-12);
        const double rank = std::round(1.0 / top);
        EXPECT_DOUBLE_EQ(rank, static_cast<double>(rising_factorial(4, m)) / std::tgamma(m + 1));
    }
}

TEST(HaarStateMoment, RejectsTooManyCopies) {
    EXPECT_THROW(haar_state_moment(RegisterLayout{{2}, 2}), std::invalid_argument);
}

TEST(HaarTwirl, MatchesTwoCopyClosedForm) {
    for (int d : {3, 4, 5}) {
        const RegisterLayout layout{{d}, 2};
        MomentOperator X{layout, random_hermitian(d * d, 17 + d)};
        const auto T = haar_twirl(X, {0}, d);
        const Eigen::MatrixXcd F = swap_operator(d);
        const cplx tx = X.matrix.trace();
        const cplx tf = (X.matrix * F).trace();
        const double dd = d;
        const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(d * d, d * d);
        const Eigen::MatrixXcd expect = (tx - tf / dd) / (dd * dd - 1.0) * I + (tf - tx / dd) / (dd * dd - 1.0) * F;
        EXPECT_LT((T.matrix - expect).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(HaarTwirl, IsIdempotentAndTracePreserving) {
    const RegisterLayout layout{{2, 3}, 2};
    MomentOperator X{layout, random_hermitian(36, 5)};
    const auto T = haar_twirl(X, {0, 1}, 6);
    const auto TT = haar_twirl(T, {0, 1}, 6);
    EXPECT_LT((T.matrix - TT.matrix).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(std::abs(T.trace() - X.trace()), 0.0, 1e-12);
}

TEST(HaarTwirl, PartialTwirlMatchesMonteCarlo) {
    // Twirl only site 1 of a (2, 3) register; compare with sampled U on that site.
    const RegisterLayout layout{{2, 3}, 2};
    MomentOperator X{layout, random_hermitian(36, 99)};
    const auto T = haar_twirl(X, {1}, 3);
    const int samples = 20000;
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(36, 36);
    const SeedTree root(2024);
    for (int s = 0; s < samples; ++s) {
        const Eigen::MatrixXcd U = sample_haar(3, root.child(s)).matrix;
        const Eigen::MatrixXcd one = Eigen::kroneckerProduct(Eigen::MatrixXcd::Identity(2, 2), U);
        const Eigen::MatrixXcd two = Eigen::kroneckerProduct(one, one);
        acc += two * X.matrix * two.adjoint();
    }
    acc /= samples;
    EXPECT_LT((acc - T.matrix).cwiseAbs().maxCoeff(), 0.1);
}

TEST(HaarTwirl, RequiresMatchingDimension) {
    const RegisterLayout layout{{2, 2}, 2};
    const auto X = MomentOperator::zero(layout);
    EXPECT_THROW(haar_twirl(X, {0}, 4), std::invalid_argument);
    EXPECT_THROW(haar_twirl(X, {0, 0}, 4), std::invalid_argument);
}

TEST(PermuteSites, ReordersTensorFactors) {
    const RegisterLayout layout{{2, 3}, 1};
    MomentOperator X{layout, random_hermitian(6, 3)};
    const auto Y = permute_sites(X, {1, 0});
    EXPECT_EQ(Y.layout.site_dims, (std::vector<int>{3, 2}));
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 2; ++c)
                for (int e = 0; e < 3; ++e) EXPECT_EQ(Y.matrix(b * 2 + a, e * 2 + c), X.matrix(a * 3 + b, c * 3 + e));
}

TEST(TraceNorm, SumOfAbsoluteEigenvalues) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(3, 3);
    h(0, 0) = 1.0;
    h(1, 1) = -2.5;
    h(2, 2) = 0.25;
    EXPECT_NEAR(trace_norm(h), 3.75, 1e-14);
    const RegisterLayout layout{{2}, 2};
    const auto a = MomentOperator::zero(layout);
    EXPECT_EQ(trace_norm_distance(a, a), 0.0);
}

TEST(SymmetricBasis, DimensionAndEmbedding) {
    const SymmetricBasis basis(4, 3);
    EXPECT_EQ(basis.size(), 20);
    std::mt19937_64 gen(1);
    std::normal_distribution<double> g;
    Eigen::VectorXcd psi(4);
    for (int i = 0; i < 4; ++i) psi(i) = cplx(g(gen), g(gen));
    psi.normalize();
    const auto v = basis.embed_power(psi);
    EXPECT_NEAR(v.norm(), 1.0, 1e-12);

    Eigen::VectorXcd full(64);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) full(a * 16 + b * 4 + c) = psi(a) * psi(b) * psi(c);
    const Eigen::MatrixXcd proj = basis.project(full * full.adjoint());
    EXPECT_LT((proj - v * v.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SymmetricBasis, HaarMomentProjectsToScaledIdentity) {
    const RegisterLayout layout{{3}, 2};
    const auto rho = haar_state_moment(layout);
    const SymmetricBasis basis(3, 2);
    const auto p = basis.project(rho.matrix);
    const Eigen::MatrixXcd expect = Eigen::MatrixXcd::Identity(6, 6) / 6.0;
    EXPECT_LT((p - expect).cwiseAbs().maxCoeff(), 1e-12);
}
