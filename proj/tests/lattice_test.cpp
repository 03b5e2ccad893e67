#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "rspde/lattice.hpp"
#include "rspde/reference.hpp"

namespace rspde {
namespace {

TEST(Ordering, TwoDimensionalRanks) {
    const GridSpec spec(2, 3);
    EXPECT_EQ(natural_rank({2, 1, 0}, spec), 2u);
    EXPECT_EQ(natural_rank({1, 2, 0}, spec), 3u);
    EXPECT_EQ(unrank(4, spec)[0], 2);
    EXPECT_EQ(unrank(4, spec)[1], 2);
}

TEST(Ordering, OneDimensionalIdentity) {
    const GridSpec spec(1, 9);
    for (int j = 1; j < 9; ++j) EXPECT_EQ(natural_rank({j, 0, 0}, spec), static_cast<std::size_t>(j));
}

TEST(Ordering, OutOfRangeThrows) {
    const GridSpec spec(2, 4);
    EXPECT_THROW(natural_rank({0, 1, 0}, spec), std::domain_error);
    EXPECT_THROW(natural_rank({1, 4, 0}, spec), std::domain_error);
    EXPECT_THROW(unrank(0, spec), std::domain_error);
    EXPECT_THROW(unrank(10, spec), std::domain_error);
}

TEST(GridSpec, RejectsBadShapes) {
    EXPECT_THROW(GridSpec(0, 4), std::invalid_argument);
    EXPECT_THROW(GridSpec(4, 4), std::invalid_argument);
    EXPECT_THROW(GridSpec(1, 1), std::invalid_argument);
}

TEST(Laplacian, SinglePoint) {
    const GridField f(GridSpec(1, 2), {3.0});
    EXPECT_DOUBLE_EQ(apply_discrete_laplacian(f)[0], -24.0);
}

TEST(Laplacian, SineIsEigenvector) {
    const GridSpec spec(1, 4);
    GridField f(spec);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::sin(std::numbers::pi * spec.point(k)[0]);
    const double lambda = 9.37258300203048;  // pi^2 c_1^4, numpy
    EXPECT_LT(sup_distance(apply_discrete_laplacian(f), -lambda * f), 1e-12);
    EXPECT_NEAR(EigenBasis(spec).eigenvalue({1, 0, 0}), lambda, 1e-12);
}

TEST(Laplacian, MatchesDenseOracle) {
    for (int d = 1; d <= 3; ++d) {
        const GridSpec spec(d, 4);
        const std::vector<double> b = reference::dense_b(spec);
        GridField f(spec);
        for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::cos(1.0 + 0.7 * static_cast<double>(k));
        const GridField bf = apply_b(f);
        for (std::size_t r = 0; r < f.size(); ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < f.size(); ++c) s += b[r * f.size() + c] * f[c];
            EXPECT_NEAR(bf[r], s, 1e-11) << "d=" << d << " row " << r;
        }
    }
}

TEST(Laplacian, ZeroMapsToZero) {
    const GridField f(GridSpec(3, 5));
    EXPECT_EQ(apply_discrete_laplacian(f).sup_norm(), 0.0);
}

TEST(Poisson, OneByOne) {
    const GridField rhs(GridSpec(1, 2), {8.0});
    EXPECT_NEAR(solve_poisson(rhs)[0], 1.0, 1e-14);
}

TEST(Poisson, EigenvectorRhs) {
    const GridSpec spec(1, 8);
    const EigenBasis basis(spec);
    for (int a = 1; a < 8; ++a) {
        const GridField b = basis.mode({a, 0, 0});
        const GridField u = solve_poisson(b, basis);
        EXPECT_LT(sup_distance(u, (1.0 / basis.eigenvalue({a, 0, 0})) * b), 1e-14);
    }
}

TEST(Poisson, TwoDimensionalCentre) {
    const GridSpec spec(2, 4);
    GridField rhs(spec);
    for (double& v : rhs.values()) v = 1.0;
    EXPECT_NEAR(solve_poisson(rhs).at({2, 2, 0}), 0.07031249999999999, 1e-15);  // numpy dense solve
}

TEST(Poisson, ZeroRhs) {
    EXPECT_EQ(solve_poisson(GridField(GridSpec(2, 6))).sup_norm(), 0.0);
}

TEST(Poisson, AgreesWithSparseDirect) {
    const GridSpec spec(3, 6);
    GridField rhs(spec);
    for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = std::sin(0.3 * static_cast<double>(k * k));
    EXPECT_LT(sup_distance(solve_poisson(rhs), reference::sparse_poisson(rhs)), 1e-13);
}

TEST(Interpolation, NodesAreExact) {
    const GridSpec spec(2, 4);
    GridField f(spec);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(k) - 3.5;
    for (std::size_t k = 0; k < f.size(); ++k) EXPECT_EQ(multilinear_extend(f, spec.point(k)), f[k]);
}

TEST(Interpolation, QuarterPoint) {
    const GridField f(GridSpec(1, 2), {1.0});
    EXPECT_DOUBLE_EQ(multilinear_extend(f, {0.25, 0.0, 0.0}), 0.5);
}

TEST(Interpolation, VanishesOnBoundary) {
    const GridSpec spec(2, 3);
    GridField f(spec);
    for (double& v : f.values()) v = 2.0;
    EXPECT_EQ(multilinear_extend(f, {0.0, 0.4, 0.0}), 0.0);
    EXPECT_EQ(multilinear_extend(f, {0.7, 1.0, 0.0}), 0.0);
}

TEST(Interpolation, OutsideDomainThrows) {
    const GridField f(GridSpec(1, 4));
    EXPECT_THROW(multilinear_extend(f, {1.2, 0.0, 0.0}), std::domain_error);
    EXPECT_THROW(multilinear_extend(f, {-0.1, 0.0, 0.0}), std::domain_error);
}

TEST(Interpolation, TrilinearMatchesAxisByAxisFormula) {
    const GridSpec spec(3, 4);
    GridField f(spec);
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = std::sin(1.3 * static_cast<double>(k));
    for (int s = 0; s < 50; ++s) {
        const Point x{std::fmod(0.137 * s, 1.0), std::fmod(0.291 * s + 0.05, 1.0), std::fmod(0.413 * s + 0.11, 1.0)};
        EXPECT_NEAR(multilinear_extend(f, x), reference::trilinear_successive(f, x), 1e-14);
    }
}

TEST(FloorMap, Examples) {
    EXPECT_DOUBLE_EQ(floor_map({0.3, 0, 0}, GridSpec(1, 4))[0], 0.25);
    EXPECT_DOUBLE_EQ(floor_map({0.25, 0, 0}, GridSpec(1, 4))[0], 0.25);
    const Point p = floor_map({0.49, 0.51, 0}, GridSpec(2, 2));
    EXPECT_DOUBLE_EQ(p[0], 0.0);
    EXPECT_DOUBLE_EQ(p[1], 0.5);
}

TEST(FloorMap, ConsistentWithNodeCoordinates) {
    EXPECT_EQ(floor_index(0.3, 10), 3);
    // t * n rounds up to 3 here, but t lies below the node 3/10
    EXPECT_EQ(floor_index(std::nextafter(0.3, 0.0), 10), 2);
    EXPECT_EQ(floor_index(1.0, 8), 8);
}

}  // namespace
}  // namespace rspde
