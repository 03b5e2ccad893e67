#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "rspde/obstacle.hpp"
#include "rspde/registry.hpp"
#include "rspde/spde.hpp"

namespace rspde {
namespace {

std::shared_ptr<const NoiseSample> noise_for(const GridSpec& spec, std::uint64_t seed) {
    return std::make_shared<const NoiseSample>(sample_noise(spec, seed));
}

TEST(Picard, ZeroCoefficients) {
    const GridSpec spec(2, 6);
    const SpdeSolution s = picard_solve(make_coefficients("zero", "zero", 2), noise_for(spec, 1));
    EXPECT_EQ(s.u.sup_norm(), 0.0);
    EXPECT_EQ(s.eta.sup_norm(), 0.0);
}

TEST(Picard, PositiveForcingNeedsNoReflection) {
    const GridSpec spec(1, 16);
    const CoefficientPair c = make_coefficients("const:c=2", "zero", 1);
    const SpdeSolution s = picard_solve(c, noise_for(spec, 1));
    GridField rhs(spec);
    for (double& v : rhs.values()) v = 2.0;
    EXPECT_LT(sup_distance(s.u, solve_poisson(rhs)), 1e-12);
    EXPECT_EQ(s.eta.sup_norm(), 0.0);
    for (double v : s.u.values()) EXPECT_GT(v, 0.0);
}

TEST(Picard, NegativeForcingReducesToObstacle) {
    const GridSpec spec(1, 16);
    const SpdeSolution s = picard_solve(make_coefficients("const:c=-3", "zero", 1), noise_for(spec, 1));
    GridField rhs(spec);
    for (double& v : rhs.values()) v = -3.0;
    const GridField v = solve_poisson(rhs);
    const LcpSolution lcp = solve_lcp(LcpProblem{v});
    EXPECT_LT(sup_distance(s.u, v + lcp.z), 1e-10);
    EXPECT_LT(sup_distance(s.eta, lcp.eta), 1e-8);
    // constant negative forcing pushes everything onto the obstacle
    EXPECT_LT(s.u.sup_norm(), 1e-12);
}

TEST(Picard, StochasticSolutionIsValid) {
    const GridSpec spec(1, 32);
    const CoefficientPair c = make_coefficients("linear:a=-0.1,b=-1", "const:c=0.1", 1);
    const auto noise = noise_for(spec, 77);
    const SpdeSolution s = picard_solve(c, noise);
    for (std::size_t k = 0; k < s.u.size(); ++k) {
        EXPECT_GE(s.u[k], -1e-8);
        EXPECT_GE(s.eta[k], -1e-8);
    }
    EXPECT_LE(equation_residual(c, *noise, s.u, s.eta).sup_norm(), 1e-7);
    EXPECT_LE(s.picard_iterations, 200);
}

TEST(Picard, NonContractionReportsHistory) {
    const GridSpec spec(1, 8);
    CoefficientPair c;
    c.f = [](const Point&, double u) { return 30.0 * u + 1.0; };  // beyond the first eigenvalue
    c.sigma = [](const Point&, double) { return 0.0; };
    PicardOptions o;
    o.max_iters = 15;
    try {
        picard_solve(c, noise_for(spec, 1), o);
        FAIL() << "expected divergence";
    } catch (const PicardConvergenceError& e) {
        EXPECT_EQ(e.change_history().size(), 15u);
    }
}

TEST(Picard, SameSeedSameSolution) {
    const GridSpec spec(2, 8);
    const CoefficientPair c = make_coefficients("linear:a=-0.1,b=-1", "const:c=0.1", 2);
    const SpdeSolution a = picard_solve(c, noise_for(spec, 5));
    const SpdeSolution b = picard_solve(c, noise_for(spec, 5));
    EXPECT_TRUE(std::equal(a.u.values().begin(), a.u.values().end(), b.u.values().begin()));
}

TEST(Continuous, NodesAndBoundary) {
    const GridSpec spec(1, 8);
    const CoefficientPair c = make_coefficients("linear:a=-0.1,b=-1", "const:c=0.5", 1);
    const SpdeSolution s = picard_solve(c, noise_for(spec, 3));
    const ContinuousField u = assemble_continuous(s);
    for (std::size_t k = 0; k < spec.interior_count(); ++k) EXPECT_EQ(u(spec.point(k)), s.u[k]);
    EXPECT_EQ(u({0.0, 0, 0}), 0.0);
    EXPECT_EQ(u({1.0, 0, 0}), 0.0);
}

TEST(Continuous, KernelRepresentationAgrees) {
    const GridSpec spec(1, 8);
    const CoefficientPair c = make_coefficients("linear:a=-0.1,b=-1", "const:c=0.5", 1);
    const SpdeSolution s = picard_solve(c, noise_for(spec, 4));
    const ContinuousField u = assemble_continuous(s);
    for (int i = 0; i < 20; ++i) {
        const Point x{0.013 + 0.049 * i, 0, 0};
        EXPECT_NEAR(u(x), kernel_representation(s, c, x), 1e-7);
    }
}

TEST(Smallness, NoCouplingIsSatisfied) {
    const SmallnessReport r = check_smallness(make_coefficients("const:c=-1", "const:c=0.3", 1), GridSpec(1, 16), {});
    EXPECT_EQ(r.lipschitz, 0.0);
    EXPECT_EQ(r.lhs, 0.0);
    EXPECT_TRUE(r.satisfied);
}

TEST(Smallness, LiteralFormula) {
    const CoefficientPair c = make_coefficients("linear:a=-0.1,b=-1", "zero", 1);
    SmallnessInputs in;
    const SmallnessReport r = check_smallness(c, GridSpec(1, 16), in);
    const double expected = std::pow(2.0, 4) * std::pow(0.1, 2) * r.c_d_tilde +
                            std::pow(2.0, 5) * std::pow(0.1, 2) * (1.0 + r.c_d_tilde);
    EXPECT_NEAR(r.lhs, expected, 1e-14);
    EXPECT_EQ(r.satisfied, expected < 1.0);
    EXPECT_GT(r.c_d_tilde, 0.0);
}

TEST(Smallness, MomentOrderPrecondition) {
    SmallnessInputs in;
    in.p = 2.0;  // d = 2 needs p > 2 / (1 - 2 eps)
    EXPECT_THROW(check_smallness(make_coefficients("zero", "zero", 2), GridSpec(2, 4), in), std::domain_error);
}

TEST(Probe, DetectsNonMonotoneDrift) {
    const CoefficientProbe p = probe_coefficients(make_coefficients("linear:a=-0.1,b=-1", "const:c=0.1", 1), 1);
    EXPECT_TRUE(p.lipschitz_ok);
    EXPECT_FALSE(p.monotone_observed);
}

TEST(GeometricTail, Classifies) {
    EXPECT_TRUE(geometric_tail({1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125}));
    EXPECT_FALSE(geometric_tail({1.0, 1.0, 1.0, 1.0, 1.0, 1.0}));
}

}  // namespace
}  // namespace rspde
