#include "pseudoent/experiments.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace pseudoent;

namespace {

double max_diff(const MomentOperator& a, const MomentOperator& b) { return (a.matrix - b.matrix).cwiseAbs().maxCoeff(); }

TensorNetworkGraph bare_bell(int chi) {
    const auto c = std::to_string(chi);
    return parse_graph("vertex 1 output\nvertex 2 output\nvertex 3 bell\nedge 3 1 " + c + "\nedge 3 2 " + c + "\n");
}

}  // namespace

TEST(ExactMoment, SingleGateIsGlobalHaar) {
    for (auto engine : {MomentEngine::Expansion, MomentEngine::Dense}) {
        const auto rho = ensemble_moment_exact(build_staircase(1, 1), 2, engine);
        EXPECT_LT(max_diff(rho, haar_state_moment(RegisterLayout{{2, 2}, 2})), 1e-10);
    }
}

TEST(ExactMoment, EnginesAgree) {
    for (const auto& [L, nu, m] : std::vector<std::tuple<int, int, int>>{{2, 1, 2}, {3, 1, 2}, {2, 2, 2}, {2, 1, 3}}) {
        const auto g = build_staircase(L, nu);
        EXPECT_LT(max_diff(ensemble_moment_exact(g, m, MomentEngine::Expansion), ensemble_moment_exact(g, m, MomentEngine::Dense)),
                  1e-12);
    }
    const auto hyp = build_hyperbolic_64(1, 2);
    EXPECT_LT(max_diff(ensemble_moment_exact(hyp, 2), ensemble_moment_exact(hyp, 2, MomentEngine::Dense)), 1e-12);
}

TEST(ExactMoment, PhysicalForStaircase32) {
    const auto rho = ensemble_moment_exact(build_staircase(3, 2), 2);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-9);
    EXPECT_GT(hermitian_eigenvalues(rho.matrix).minCoeff(), -1e-9);
}

TEST(ExactMoment, DenseCap) {
    EXPECT_THROW(ensemble_moment_exact(build_staircase(5, 2), 2), std::length_error);
}

TEST(SampledMoment, SingleSampleIsPureProjector) {
    const auto s = ensemble_moment_sampled(build_staircase(2, 1), EnsembleSpec::haar(), 2, 1, SeedTree(1));
    EXPECT_NEAR(s.mean.trace().real(), 1.0, 1e-12);
    const auto ev = hermitian_eigenvalues(s.mean);
    EXPECT_NEAR(ev.maxCoeff(), 1.0, 1e-12);
    EXPECT_NEAR(ev.cwiseAbs().sum(), 1.0, 1e-10);
    EXPECT_THROW(ensemble_moment_sampled(build_staircase(2, 1), EnsembleSpec::haar(), 2, 0, SeedTree(1)), std::invalid_argument);
}

TEST(SampledMoment, HaarGatesMatchExact) {
    const auto g = build_staircase(2, 1);
    const auto s = ensemble_moment_sampled(g, EnsembleSpec::haar(), 2, 20000, SeedTree(5));
    const double d = sampled_distance(s, ensemble_moment_exact(g, 2));
    EXPECT_LT(d, 5 * s.stderr_);
    EXPECT_GT(s.stderr_, 0.0);
}

TEST(SampledMoment, DeviceDistinguishesWrongEnsemble) {
    // Identity gates give a product state, far from the Haar-gate moment.
    const auto g = build_staircase(2, 1);
    const auto s = ensemble_moment_sampled(g, EnsembleSpec::identity(), 2, 100, SeedTree(5));
    EXPECT_GT(sampled_distance(s, ensemble_moment_exact(g, 2)), 1.0);
}

TEST(Lemma2, DecreasingWithBondDimension) {
    const auto rows = lemma2_sweep(3, {1, 2, 3}, 2);
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        EXPECT_GE(rows[k].distance, 0.0);
        EXPECT_EQ(rows[k].method, "exact");
        if (k) EXPECT_LT(rows[k].distance, rows[k - 1].distance);
    }
    // The sector formula agrees with dense eigenvalues where both are available.
    const auto g = build_staircase(2, 1);
    const auto dense = ensemble_moment_exact(g, 2, MomentEngine::Dense);
    const auto haar = haar_state_moment(dense.layout);
    EXPECT_NEAR(lemma2_sweep(2, {1}, 2)[0].distance, trace_norm_distance(dense, haar), 1e-12);
    EXPECT_THROW(lemma2_sweep(3, {}, 2), std::invalid_argument);
}

TEST(Lemma1, TwoCopyPfcMatchesWithinNoise) {
    const auto r = lemma1_check(2, 1, 2, 4000, SeedTree(8));
    EXPECT_LT(r.distance, 5 * r.stderr_);
    EXPECT_EQ(r.method, "sampled");
    EXPECT_THROW(lemma1_check(2, 1, 2, 0, SeedTree(8)), std::invalid_argument);
}

TEST(AreaLaw, IdentityAndBound) {
    for (const auto& r : area_law_profile(6, 2, EnsembleSpec::identity(), 2, SeedTree(1))) EXPECT_NEAR(r.mean, 0.0, 1e-12);
    const auto rows = area_law_profile(6, 2, EnsembleSpec::pfc(), 10, SeedTree(2));
    EXPECT_EQ(rows.size(), 7u);
    for (const auto& r : rows) {
        EXPECT_LE(r.mean, 2.0 + 1e-9);
        EXPECT_TRUE(r.has_page);
    }
}

TEST(RTVerify, BellPairSaturates) {
    const auto r = rt_verify(bare_bell(8), {1}, EnsembleSpec::haar(), 3, SeedTree(1));
    EXPECT_EQ(r.mincut_bits, 3);
    EXPECT_NEAR(r.rt_lower_bound_bits, 3.0, 1e-12);
    EXPECT_NEAR(r.mean_entropy, 3.0, 1e-12);
    EXPECT_TRUE(r.sandwich);
    EXPECT_EQ(r.chi, 8);
}

TEST(RTVerify, StaircasePrefix) {
    const auto r = rt_verify(build_staircase(6, 2), {1, 2, 3}, EnsembleSpec::haar(), 100, SeedTree(4));
    EXPECT_EQ(r.mincut_bits, 2);
    EXPECT_GE(r.mean_entropy, 0.8);
    EXPECT_LE(r.mean_entropy, 2.0 + 1e-9);
    EXPECT_TRUE(r.sandwich);
    EXPECT_NEAR(r.newton_log2, 2.0, 1e-15);
    EXPECT_NEAR(r.newton_ln, 4.0 / std::log(4.0), 1e-15);
}

TEST(WeingartenCheck, Rows) {
    const auto rows = weingarten_check({2, 4}, {4, 8, 16, 32, 64});
    const auto& r24 = rows[0];
    ASSERT_TRUE(r24.valid);
    EXPECT_EQ(r24.s1_residual, 0);
    EXPECT_LT(r24.s2_residual, 1e-12);
    EXPECT_EQ(r24.s3_sign_violations, 0);
    for (std::size_t k = 1; k < 5; ++k) EXPECT_LT(rows[k].s4_residual, rows[k - 1].s4_residual);
    EXPECT_FALSE(rows[5].valid);
    EXPECT_EQ(rows[5].reason, "m < d violated");
}

TEST(Csv, FormatsAndDeterminism) {
    EXPECT_EQ(fmt17(0.1), "0.10000000000000001");
    EXPECT_EQ(fmt17(2.0), "2");
    auto run = [] {
        std::ostringstream os;
        write_csv(os, std::vector<DistanceRecord>{lemma1_check(2, 1, 2, 200, SeedTree(3))});
        write_csv(os, area_law_profile(4, 1, EnsembleSpec::pfc(SourceMode::Keyed, SourceMode::Keyed, 9), 5, SeedTree(3)));
        return os.str();
    };
    const auto a = run();
    EXPECT_EQ(a, run());
    EXPECT_EQ(a.substr(0, a.find('\n')), "chi,nu,L,N,m,distance,method,samples,stderr");

    std::ostringstream ex;
    write_csv(ex, lemma2_sweep(2, {1}, 2));
    EXPECT_NE(ex.str().find(",exact,,\n"), std::string::npos);
}
