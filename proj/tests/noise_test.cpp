#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "rspde/noise.hpp"

namespace rspde {
namespace {

TEST(Sample, Deterministic) {
    const GridSpec spec(3, 4);
    const NoiseSample a = sample_noise(spec, 7);
    const NoiseSample b = sample_noise(spec, 7);
    const NoiseSample c = sample_noise(spec, 8);
    EXPECT_TRUE(std::equal(a.increments().begin(), a.increments().end(), b.increments().begin()));
    EXPECT_FALSE(std::equal(a.increments().begin(), a.increments().end(), c.increments().begin()));
    EXPECT_EQ(a.increments().size(), 64u);
}

TEST(Sample, CellStatistics) {
    const GridSpec spec(1, 4);
    constexpr int reps = 100000;
    std::array<double, 4> s{};
    std::array<double, 4> s2{};
    double cross = 0.0;
    for (int r = 0; r < reps; ++r) {
        const NoiseSample x = sample_noise(spec, replicate_seed(3, static_cast<std::uint64_t>(r)));
        for (int c = 0; c < 4; ++c) {
            s[c] += x.increments()[c];
            s2[c] += x.increments()[c] * x.increments()[c];
        }
        cross += x.increments()[0] * x.increments()[1];
    }
    for (int c = 0; c < 4; ++c) {
        const double var = s2[c] / reps;
        EXPECT_NEAR(var, 0.25, 0.05 * 0.25) << "cell " << c;
        EXPECT_LT(std::abs(s[c] / reps), 3.0 * std::sqrt(0.25 / reps));
    }
    // covariance of independent N(0, 1/4) has standard error 1/(4 sqrt(reps))
    EXPECT_LT(std::abs(cross / reps), 3.0 * 0.25 / std::sqrt(reps));
}

TEST(Refine, ChildrenSumToParent) {
    for (int d = 1; d <= 3; ++d) {
        const NoiseSample parent = sample_noise(GridSpec(d, 4), 21);
        const NoiseSample child = refine_noise(parent);
        EXPECT_EQ(child.spec().n(), 8);
        EXPECT_EQ(child.level(), 1);
        const NoiseSample back = coarsen_noise(child);
        EXPECT_TRUE(std::equal(parent.increments().begin(), parent.increments().end(), back.increments().begin()));
    }
}

TEST(Refine, OnlyFactorTwo) {
    const NoiseSample parent = sample_noise(GridSpec(1, 4), 1);
    EXPECT_THROW(refine_noise(parent, 3), std::invalid_argument);
    EXPECT_THROW(coarsen_noise(parent, 4), std::invalid_argument);
}

TEST(Refine, CovarianceMatchesDirectFineSampling) {
    // refining n=2 to n=4 must give four independent N(0, 1/4) cells
    constexpr int reps = 100000;
    double c00 = 0.0;
    double c01 = 0.0;
    double c12 = 0.0;
    for (int r = 0; r < reps; ++r) {
        const NoiseSample fine = refine_noise(sample_noise(GridSpec(1, 2), replicate_seed(9, static_cast<std::uint64_t>(r))));
        const auto x = fine.increments();
        c00 += x[0] * x[0];
        c01 += x[0] * x[1];
        c12 += x[1] * x[2];
    }
    const double se_var = 0.25 * std::sqrt(2.0 / reps);
    const double se_cov = 0.25 / std::sqrt(reps);
    EXPECT_NEAR(c00 / reps, 0.25, 3 * se_var);
    EXPECT_NEAR(c01 / reps, 0.0, 3 * se_cov);
    EXPECT_NEAR(c12 / reps, 0.0, 3 * se_cov);
}

TEST(NoiseTerm, ZeroSigma) {
    const NoiseSample s = sample_noise(GridSpec(2, 4), 5);
    EXPECT_EQ(discrete_noise_term(s, GridField(GridSpec(2, 4))).sup_norm(), 0.0);
}

TEST(NoiseTerm, UsesForwardCell) {
    const GridSpec spec(1, 2);
    const NoiseSample s(spec, {0.3, -0.7}, 0, 0);
    const GridField term = discrete_noise_term(s, GridField(spec, {1.0}));
    EXPECT_DOUBLE_EQ(term[0], 2.0 * -0.7);
}

TEST(NoiseTerm, LinearInSigma) {
    const GridSpec spec(2, 5);
    const NoiseSample s = sample_noise(spec, 11);
    GridField sigma(spec);
    for (std::size_t k = 0; k < sigma.size(); ++k) sigma[k] = 0.1 * static_cast<double>(k);
    EXPECT_LT(sup_distance(discrete_noise_term(s, 2.0 * sigma), 2.0 * discrete_noise_term(s, sigma)), 1e-14);
}

TEST(NoiseTerm, SpecMismatchThrows) {
    const NoiseSample s = sample_noise(GridSpec(1, 4), 1);
    EXPECT_THROW(discrete_noise_term(s, GridField(GridSpec(1, 8))), std::invalid_argument);
}

TEST(Dump, RoundTrip) {
    const GridSpec spec(2, 4);
    const NoiseSample s = sample_noise(spec, 33, 2);
    const auto path = std::filesystem::temp_directory_path() / "rspde_noise_roundtrip.bin";
    write_increments(s, path);
    const NoiseSample back = read_increments(spec, 33, 2, path);
    std::filesystem::remove(path);
    EXPECT_TRUE(std::equal(s.increments().begin(), s.increments().end(), back.increments().begin()));
    EXPECT_EQ(std::filesystem::exists(path), false);
}

}  // namespace
}  // namespace rspde
