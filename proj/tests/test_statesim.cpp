#include "pseudoent/statesim.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pseudoent;

namespace {

std::vector<int> range(int a, int b) {
    std::vector<int> r;
    for (int k = a; k <= b; ++k) r.push_back(k);
    return r;
}

// Mean von Neumann entropy (bits) of the smaller side of a Haar state on
// dA x dB with dA <= dB.
double page_bits(int dA, int dB) {
    double s = 0.0;
    for (int k = dB + 1; k <= dA * dB; ++k) s += 1.0 / k;
    s -= (dA - 1.0) / (2.0 * dB);
    return s / std::log(2.0);
}

}  // namespace

TEST(BuildState, IdentityGateOnProductInput) {
    const auto g = parse_graph("vertex 1 product\nvertex 2 unitary\nvertex 3 output\nedge 1 2 2\nedge 2 3 2\n");
    const auto st = build_state(g, EnsembleSpec::identity(), SeedTree(1));
    ASSERT_EQ(st.dim(), 2u);
    EXPECT_EQ(st.amplitudes(0), std::complex<double>(1.0));
    EXPECT_EQ(st.amplitudes(1), std::complex<double>(0.0));
}

TEST(BuildState, BellPairHalfHasLogChiBits) {
    const auto g = parse_graph("vertex 1 output\nvertex 2 output\nvertex 3 bell\nedge 3 1 4\nedge 3 2 4\n");
    const auto st = build_state(g, EnsembleSpec::haar(), SeedTree(1));
    EXPECT_NEAR(entropy(st, {1}), 2.0, 1e-12);
    EXPECT_NEAR(purity(st, {1}), 0.25, 1e-12);
    const auto two = parse_graph("vertex 1 output\nvertex 2 output\nvertex 3 bell\nedge 3 1 2\nedge 3 2 2\n");
    const auto s2 = build_state(two, EnsembleSpec::haar(), SeedTree(1));
    EXPECT_NEAR(entropy(s2, {2}), 1.0, 1e-12);
    EXPECT_NEAR(purity(s2, {2}), 0.5, 1e-12);
}

TEST(BuildState, MatchesExplicitKroneckerConstruction) {
    // staircase(2,1): gate 1 on (bond, fresh) -> (out 1, bond); gate 2 on
    // (bond, fresh) -> (out 2, out 3).
    const auto g = build_staircase(2, 1);
    const auto gates = g.unitaries();
    std::map<int, Eigen::MatrixXcd> U;
    for (int u : gates) U[u] = sample_haar(4, SeedTree(77).child(u)).matrix;
    const auto st = build_state(g, [&](int u, int) { return SampledGate(U.at(u)); });

    const Eigen::VectorXcd psi1 = U.at(gates[0]).col(0);  // |out1, bond>
    Eigen::VectorXcd with_fresh = Eigen::VectorXcd::Zero(8);
    for (int k = 0; k < 4; ++k) with_fresh(2 * k) = psi1(k);
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(8, 8);
    big.block(0, 0, 4, 4) = U.at(gates[1]);
    big.block(4, 4, 4, 4) = U.at(gates[1]);
    const Eigen::VectorXcd expect = big * with_fresh;
    EXPECT_EQ(st.outputs, (std::vector<int>{1, 2, 3}));
    EXPECT_LT((st.amplitudes - expect).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(BuildState, StaircaseNormAndPrefixBound) {
    const auto g = build_staircase(4, 2);
    for (int s = 0; s < 5; ++s) {
        const auto st = build_state(g, EnsembleSpec::haar(), SeedTree(3).child(s));
        EXPECT_NEAR(st.norm(), 1.0, 1e-10);
        for (int l = 1; l < 6; ++l) EXPECT_LE(entropy(st, range(1, l)), 2.0 + 1e-9);
    }
}

TEST(BuildState, RejectsInvalidAndOversizedGraphs) {
    const auto bad = parse_graph("vertex 1 product\nvertex 2 unitary\nvertex 3 output\nedge 1 2 2\nedge 2 3 4\n");
    EXPECT_THROW(build_state(bad, EnsembleSpec::haar(), SeedTree(1)), std::invalid_argument);
    EXPECT_THROW(build_state(build_staircase(22, 3), EnsembleSpec::haar(), SeedTree(1)), std::length_error);
}

TEST(BuildState, ReproducibleForSameSeedPath) {
    const auto g = build_staircase(5, 2);
    for (const auto& spec : {EnsembleSpec::haar(), EnsembleSpec::pfc(), EnsembleSpec::clifford()}) {
        const auto a = build_state(g, spec, SeedTree(9));
        const auto b = build_state(g, spec, SeedTree(9));
        EXPECT_EQ((a.amplitudes - b.amplitudes).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(Entropy, ProductStateIsZero) {
    const auto st = build_state(build_staircase(4, 2), EnsembleSpec::identity(), SeedTree(1));
    for (int l = 1; l < 6; ++l) {
        EXPECT_NEAR(entropy(st, range(1, l)), 0.0, 1e-12);
        EXPECT_NEAR(purity(st, range(1, l)), 1.0, 1e-12);
    }
}

TEST(Entropy, ComplementSymmetryAndRenyiOrdering) {
    std::mt19937 gen(5);
    for (int s = 0; s < 100; ++s) {
        StateVector st;
        const int n = 2 + static_cast<int>(gen() % 6);
        for (int q = 1; q <= n; ++q) {
            st.outputs.push_back(q);
            st.dims.push_back(2);
        }
        st.amplitudes = haar_random_state(std::uint64_t{1} << n, SeedTree(11).child(s));
        std::vector<int> A, B;
        for (int q = 1; q <= n; ++q) (gen() % 2 ? A : B).push_back(q);
        if (A.empty() || B.empty()) continue;
        const double sA = entropy(st, A), sB = entropy(st, B);
        EXPECT_NEAR(sA, sB, 1e-9);
        const double r2 = entropy(st, A, EntropyKind::Renyi2);
        EXPECT_LE(r2, sA + 1e-12);
        EXPECT_NEAR(-std::log2(purity(st, A)), r2, 1e-10);
    }
}

TEST(Entropy, SchmidtRankBoundHoldsSampleWise) {
    std::vector<TensorNetworkGraph> graphs{build_staircase(6, 2), build_staircase(4, 3), build_hyperbolic_64(1, 4)};
    std::mt19937 gen(8);
    for (const auto& g : graphs) {
        const auto outs = g.outputs();
        for (const auto& spec : {EnsembleSpec::haar(), EnsembleSpec::pfc()}) {
            for (int s = 0; s < 4; ++s) {
                const auto st = build_state(g, spec, SeedTree(21).child(s));
                for (int trial = 0; trial < 20; ++trial) {
                    std::vector<int> A;
                    for (int o : outs)
                        if (gen() % 2) A.push_back(o);
                    if (A.empty() || A.size() == outs.size()) continue;
                    EXPECT_LE(entropy(st, A), min_cut(g, A).weight_bits + 1e-9);
                }
            }
        }
    }
}

TEST(Profile, IdentityGatesGiveZeros) {
    const auto p = entropy_profile(build_staircase(5, 2), EnsembleSpec::identity(), SeedTree(1), CutFamily::Prefix, 3);
    ASSERT_EQ(p.points.size(), 6u);
    for (const auto& pt : p.points) EXPECT_NEAR(pt.mean, 0.0, 1e-12);
}

TEST(Profile, CutFamilies) {
    EXPECT_EQ(cut_family(5, CutFamily::Prefix).size(), 4u);
    const auto seg = cut_family(5, CutFamily::Segment);
    EXPECT_EQ(seg.size(), 6u);
    for (const auto& [a, b] : seg) {
        EXPECT_GT(a, 1);
        EXPECT_LT(b, 5);
    }
}

TEST(Profile, StaircaseRisesThenPlateaus) {
    const auto p = entropy_profile(build_staircase(8, 2), EnsembleSpec::haar(), SeedTree(4), CutFamily::Prefix, 50);
    for (const auto& pt : p.points) {
        EXPECT_LE(pt.mean, 2.0 + 1e-9);
        EXPECT_GE(pt.mean, 0.0);
    }
    for (int l = 3; l <= 7; ++l) EXPECT_GE(p.points[l - 1].mean, 1.0);
    EXPECT_LT(p.points[0].mean, p.points[2].mean);
}

TEST(Profile, SingleGateMatchesPageValue) {
    // One Haar gate on 3 qubits: the state is Haar on dimension 8.
    const auto g = build_staircase(1, 2);
    const auto p = entropy_profile(g, EnsembleSpec::haar(), SeedTree(6), CutFamily::Prefix, 200);
    const auto ref = page_reference(3, {1}, 200, SeedTree(7));
    const double se = std::hypot(p.points[0].stderr_, ref.points[0].stderr_);
    EXPECT_LT(std::abs(p.points[0].mean - ref.points[0].mean), 3 * se);
    EXPECT_LT(std::abs(p.points[0].mean - page_bits(2, 4)), 3 * p.points[0].stderr_);
}

TEST(PageReference, SmallCasesAndSymmetry) {
    const auto two = page_reference(2, {0, 1}, 1000, SeedTree(2));
    EXPECT_EQ(two.points[0].mean, 0.0);
    EXPECT_LT(std::abs(two.points[1].mean - page_bits(2, 2)), 3 * two.points[1].stderr_);

    const auto six = page_reference(6, {1, 2, 4, 5}, 400, SeedTree(3));
    const auto diff = [&](int a, int b) {
        return std::abs(six.points[a].mean - six.points[b].mean) /
               std::hypot(six.points[a].stderr_, six.points[b].stderr_);
    };
    EXPECT_LT(diff(0, 3), 3.0);
    EXPECT_LT(diff(1, 2), 3.0);
    EXPECT_THROW(page_reference(15, {1}, 1, SeedTree(1)), std::invalid_argument);
}
