#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rspde/obstacle.hpp"
#include "rspde/reference.hpp"

namespace rspde {
namespace {

double sine_bump(const Point& x) { return -std::sin(std::numbers::pi * x[0]); }

TEST(Lcp, FeasibleBarrierGivesZero) {
    const GridSpec spec(2, 6);
    GridField v(spec);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = 0.1 + 0.01 * static_cast<double>(k);
    const LcpSolution s = solve_lcp(LcpProblem{v});
    EXPECT_EQ(s.z.sup_norm(), 0.0);
    EXPECT_EQ(s.eta.sup_norm(), 0.0);
}

TEST(Lcp, OneByOneByHand) {
    const LcpSolution s = solve_lcp(LcpProblem{GridField(GridSpec(1, 2), {-1.0})});
    EXPECT_NEAR(s.z[0], 1.0, 1e-12);
    EXPECT_NEAR(s.eta[0], 8.0, 1e-10);
}

TEST(Lcp, FrozenActiveSetSolution) {
    // numpy enumeration over all 2^7 active sets for v = -sin(pi x) + 0.5, n = 8
    const std::vector<double> z = {0.14129317750376225, 0.2825863550075245, 0.42387953251128674, 0.5,
                                   0.42387953251128674, 0.2825863550075245, 0.14129317750376225};
    const std::vector<double> eta = {0.0, 0.0, 4.171053440963135, 9.743419838555297, 4.171053440963135, 0.0, 0.0};
    const LcpSolution s =
        solve_lcp(LcpProblem{sample_on_lattice([](const Point& x) { return sine_bump(x) + 0.5; }, GridSpec(1, 8))});
    for (std::size_t k = 0; k < 7; ++k) {
        EXPECT_NEAR(s.z[k], z[k], 1e-9) << k;
        EXPECT_NEAR(s.eta[k], eta[k], 1e-7) << k;
    }
}

TEST(Lcp, AgreesWithEnumerationOracle) {
    for (int d = 1; d <= 3; ++d) {
        const int n = d == 1 ? 9 : 3;
        const GridSpec spec(d, n);
        GridField v(spec);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::sin(2.1 * static_cast<double>(k) + d) - 0.3;
        const LcpSolution s = solve_lcp(LcpProblem{v});
        const auto oracle = reference::enumerate_active_sets(LcpProblem{v});
        ASSERT_TRUE(oracle.has_value());
        EXPECT_LT(sup_distance(s.z, oracle->z), 1e-9);
        EXPECT_LE(s.residuals.max_violation, 1e-8);
        EXPECT_LE(s.residuals.max_negative_eta, 1e-8);
    }
}

TEST(Lcp, SweepBudgetExhaustion) {
    LcpOptions options;
    options.max_sweeps = 2;
    options.active_set_polish = false;
    const GridField v =
        sample_on_lattice([](const Point& x) { return sine_bump(x) + 0.5 * std::sin(3 * std::numbers::pi * x[0]); },
                          GridSpec(1, 64));
    try {
        solve_lcp(LcpProblem{v}, options);
        FAIL() << "expected a convergence failure";
    } catch (const LcpConvergenceError& e) {
        EXPECT_GT(e.last_change(), options.tol);
    }
}

TEST(Lcp, RejectsBadOptions) {
    const GridField v(GridSpec(1, 4));
    LcpOptions bad;
    bad.tol = 0.0;
    EXPECT_THROW(solve_lcp(LcpProblem{v}, bad), std::invalid_argument);
    GridField inf(GridSpec(1, 4));
    inf[1] = INFINITY;
    EXPECT_THROW(solve_lcp(LcpProblem{inf}), std::invalid_argument);
}

TEST(Penalized, ScalarFixedPoint) {
    const LcpProblem p{GridField(GridSpec(1, 2), {-1.0})};
    for (double eps : {1e-1, 1e-2, 1e-3}) EXPECT_NEAR(solve_penalized(p, eps)[0], 1.0 / (1.0 + 8.0 * eps), 1e-12);
}

TEST(Penalized, FeasibleBarrierGivesZero) {
    GridField v(GridSpec(2, 5));
    for (double& x : v.values()) x = 0.2;
    EXPECT_EQ(solve_penalized(LcpProblem{v}, 1e-3).sup_norm(), 0.0);
}

TEST(Penalized, ApproachesLcp) {
    const LcpProblem p{sample_on_lattice(sine_bump, GridSpec(1, 64))};
    const LcpSolution exact = solve_lcp(p);
    double prev = INFINITY;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        const double gap = sup_distance(solve_penalized(p, eps), exact.z);
        EXPECT_LT(gap, prev);
        prev = gap;
    }
    EXPECT_LE(prev, 1e-3);
    EXPECT_THROW(solve_penalized(p, 0.0), std::invalid_argument);
}

TEST(Deterministic, PositiveBarrier) {
    const DeterministicSolution s =
        deterministic_scheme([](const Point& x) { return std::sin(std::numbers::pi * x[0]); }, GridSpec(1, 16));
    EXPECT_EQ(s.lattice.z.sup_norm(), 0.0);
}

TEST(Deterministic, Feasibility) {
    const GridSpec spec(1, 16);
    const DeterministicSolution s = deterministic_scheme([](const Point& x) { return -x[0] * (1.0 - x[0]); }, spec);
    for (std::size_t k = 0; k < spec.interior_count(); ++k) {
        const double x = spec.point(k)[0];
        EXPECT_GE(s.lattice.z[k], x * (1.0 - x) - 1e-10);
        EXPECT_DOUBLE_EQ(s.z(spec.point(k)), s.lattice.z[k]);
    }
}

TEST(Deterministic, BoundaryMustVanish) {
    EXPECT_THROW(deterministic_scheme([](const Point&) { return -1.0; }, GridSpec(1, 8)), std::invalid_argument);
}

TEST(EtaBound, SmoothBarrier) {
    EXPECT_NEAR(second_derivative_norm(sine_bump, 1), std::numbers::pi * std::numbers::pi, 1e-4);
    const EtaBoundReport r = eta_smooth_bound_check(sine_bump, GridSpec(1, 32));
    EXPECT_TRUE(r.satisfied);
    EXPECT_GT(r.max_eta, 0.0);
}

TEST(EtaBound, PositiveBarrierHasNoForce) {
    const EtaBoundReport r =
        eta_smooth_bound_check([](const Point& x) { return std::sin(std::numbers::pi * x[0]); }, GridSpec(1, 16));
    EXPECT_EQ(r.max_eta, 0.0);
    EXPECT_TRUE(r.satisfied);
}

}  // namespace
}  // namespace rspde
