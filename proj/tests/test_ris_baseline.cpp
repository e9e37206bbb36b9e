#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "rsorth/ris_baseline.hpp"
#include "test_support.hpp"

using namespace rsorth;

namespace {

RisOptConfig quick(std::uint64_t seed) {
    RisOptConfig cfg;
    cfg.restarts = 3;
    cfg.max_iters = 60;
    cfg.seed = seed;
    return cfg;
}

} // namespace

TEST(KappaObjective, AtLeastOneAndMatchesConditionNumber) {
    const ChannelSet cs = generate_iid_rayleigh(4, 2, 8, 1.0, 1);
    for (std::uint64_t t = 0; t < 20; ++t) {
        const RVector phi = random_phases(8, t);
        const double kappa = kappa_objective(cs, phi);
        EXPECT_GE(kappa, 1.0);
        const RVector s = singular_values(effective_channel(cs, RsConfig::ris(phi)));
        EXPECT_NEAR(kappa, s(0) / s(s.size() - 1), 1e-10 * kappa);
    }
    EXPECT_THROW((void)kappa_objective(cs, RVector::Zero(7)), Error);
}

TEST(KappaObjective, PeriodicInPhase) {
    const ChannelSet cs = generate_iid_rayleigh(4, 2, 8, 1.0, 2);
    const RVector phi = random_phases(8, 3);
    RVector shifted = phi;
    shifted(3) += 2.0 * std::numbers::pi;
    EXPECT_NEAR(kappa_objective(cs, phi), kappa_objective(cs, shifted), 1e-10);
}

TEST(WrapPhases, IntoPrincipalRange) {
    RVector phi(4);
    phi << -0.1, 7.0, 2.0 * std::numbers::pi, 1.0;
    const RVector w = wrap_phases(phi);
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        EXPECT_GE(w(i), 0.0);
        EXPECT_LT(w(i), 2.0 * std::numbers::pi);
        EXPECT_NEAR(std::cos(w(i)), std::cos(phi(i)), 1e-12);
        EXPECT_NEAR(std::sin(w(i)), std::sin(phi(i)), 1e-12);
    }
}

TEST(ChannelGains, EigenvaluesOfGram) {
    const SemiUnitary u = random_semi_unitary(4, 2, 3);
    CMatrix h = u.matrix();
    h.col(0) *= 3.0;
    const ChannelGains g = channel_gains(h);
    EXPECT_NEAR(g.minimum, 1.0, 1e-12);
    EXPECT_NEAR(g.average, 5.0, 1e-12);
}

TEST(MinimizeConditionNumber, ImprovesOnStartAndTraceDecreases) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ChannelSet cs = generate_iid_rayleigh(4, 2, 8, 1.0, seed);
        const RisResult r = minimize_condition_number(cs, quick(seed));
        EXPECT_GE(r.kappa, 1.0);
        ASSERT_EQ(r.initial_kappas.size(), 3u);
        EXPECT_LE(r.kappa, *std::min_element(r.initial_kappas.begin(), r.initial_kappas.end()));
        for (std::size_t i = 1; i < r.trace.size(); ++i) {
            EXPECT_LT(r.trace[i], r.trace[i - 1]);
        }
        EXPECT_NEAR(kappa_objective(cs, r.phases), r.kappa, 1e-12 * r.kappa);
        EXPECT_EQ(r.phases.size(), 8);
    }
}

TEST(MinimizeConditionNumber, BeatsRandomPhasesInMedian) {
    std::vector<double> optimized;
    std::vector<double> random;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ChannelSet cs = generate_iid_rayleigh(4, 2, 8, 1.0, seed);
        optimized.push_back(minimize_condition_number(cs, quick(seed)).kappa);
        random.push_back(kappa_objective(cs, random_phases(8, derive_seed(seed, Stream::Probe))));
    }
    std::ranges::sort(optimized);
    std::ranges::sort(random);
    EXPECT_LT(optimized[10], random[10]);
}

TEST(MinimizeConditionNumber, NoElementsReturnsDirectChannel) {
    const CMatrix h0 = rsorth::testing::random_matrix(4, 2, 1);
    const ChannelSet cs(h0, CMatrix(4, 0), CMatrix(0, 2), 1.0);
    const RisResult r = minimize_condition_number(cs, quick(1));
    EXPECT_NEAR(r.kappa, condition_number(h0), 1e-12);
}

TEST(MinimizeConditionNumber, DeterministicAndValidated) {
    const ChannelSet cs = generate_iid_rayleigh(4, 2, 8, 1.0, 4);
    EXPECT_EQ(minimize_condition_number(cs, quick(5)).phases, minimize_condition_number(cs, quick(5)).phases);
    RisOptConfig bad = quick(1);
    bad.decay = 1.5;
    EXPECT_THROW((void)minimize_condition_number(cs, bad), Error);
}
