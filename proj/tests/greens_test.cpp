#include <gtest/gtest.h>

#include <cmath>

#include "rspde/greens.hpp"
#include "rspde/lattice.hpp"

namespace rspde {
namespace {

const KernelKind kK{KernelTag::Continuous, std::nullopt};
const KernelKind kKn{KernelTag::Discrete, std::nullopt};
const KernelKind kKprime{KernelTag::InterpolatedContinuous, std::nullopt};
const KernelKind kKcaret{KernelTag::InterpolatedDiscrete, std::nullopt};

TEST(Kernel, TruncatedSeriesMatchesClosedForm) {
    const GridSpec spec(1, 8);
    const KernelKind series{KernelTag::Continuous, 2000};
    EXPECT_NEAR(eval_kernel(series, spec, {0.3, 0, 0}, {0.7, 0, 0}), 0.3 * 0.3, 1e-4);
    EXPECT_DOUBLE_EQ(eval_kernel(kK, spec, {0.3, 0, 0}, {0.7, 0, 0}), 0.09);
}

TEST(Kernel, DiscreteKernelAtNodes) {
    for (int n : {2, 5, 16, 64}) {
        const GridSpec spec(1, n);
        for (int i = 1; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                const double expected = (static_cast<double>(i) / n) * (1.0 - static_cast<double>(j) / n);
                EXPECT_NEAR(eval_kernel(kKn, spec, {spec.coord(i), 0, 0}, {spec.coord(j), 0, 0}), expected, 1e-10);
            }
        }
    }
}

TEST(Kernel, Symmetry) {
    const GridSpec spec(2, 5);
    const KernelKind k{KernelTag::Continuous, 40};
    for (std::size_t a = 0; a < spec.interior_count(); a += 3) {
        for (std::size_t b = 0; b < spec.interior_count(); b += 2) {
            EXPECT_NEAR(eval_kernel(k, spec, spec.point(a), spec.point(b)), eval_kernel(k, spec, spec.point(b), spec.point(a)),
                        1e-14);
        }
    }
}

TEST(Kernel, VanishesOnBoundary) {
    for (int d = 1; d <= 3; ++d) {
        const GridSpec spec(d, 4);
        const Point edge{0.0, 0.5, 0.5};
        const Point y{0.3, 0.6, 0.4};
        for (const KernelKind& k : {kK, kKn, kKprime, kKcaret}) {
            EXPECT_NEAR(eval_kernel(k, spec, edge, y), 0.0, 1e-15);
            EXPECT_NEAR(kernel_l2_norm_sq(k, spec, edge, 8), 0.0, 1e-15);
        }
    }
}

TEST(Kernel, OneDimensionalInterpolatedKinds) {
    const GridSpec spec(1, 4);
    // K' is linear in x between nodes, so at a midpoint it averages the nodal closed forms
    const double y = 0.8;
    const double expected = 0.5 * (green_1d_closed_form(0.25, y) + green_1d_closed_form(0.5, y));
    EXPECT_NEAR(eval_kernel(kKprime, spec, {0.375, 0, 0}, {y, 0, 0}), expected, 1e-14);
    // K^n equals K_n at nodes
    EXPECT_NEAR(eval_kernel(kKcaret, spec, {0.5, 0, 0}, {y, 0, 0}), eval_kernel(kKn, spec, {0.5, 0, 0}, {y, 0, 0}), 1e-14);
}

TEST(Kernel, UnknownNamesAndBadArgs) {
    EXPECT_THROW(kernel_tag_from_string("Kbogus"), std::invalid_argument);
    EXPECT_EQ(kernel_tag_from_string("Kcaret_n"), KernelTag::InterpolatedDiscrete);
    EXPECT_THROW(eval_kernel(kKn, GridSpec(1, 4), {1.5, 0, 0}, {0.5, 0, 0}), std::domain_error);
    EXPECT_THROW(kernel_l2_norm_sq(kKn, GridSpec(1, 8), {0.5, 0, 0}, 4), std::invalid_argument);
}

TEST(KernelNorm, ClosedFormCentre) {
    // int_0^1/2 (y/2)^2 dy + int_1/2^1 ((1-y)/2)^2 dy = 1/96 + 1/96
    EXPECT_NEAR(kernel_l2_norm_sq(kK, GridSpec(1, 8), {0.5, 0, 0}, 4096), 1.0 / 48.0, 1e-7);
}

TEST(KernelNorm, DiscreteKernelExactQuadrature) {
    // numpy: sum over cells of (n (B^-1)_{4j})^2 / n
    const GridSpec spec(1, 8);
    EXPECT_NEAR(kernel_l2_norm_sq(kKn, spec, {0.5, 0, 0}, 8), 0.021484375, 1e-15);
    EXPECT_NEAR(kernel_l2_norm_sq(kKn, spec, {0.5, 0, 0}, 64), 0.021484375, 1e-14);
}

TEST(KernelNorm, ParsevalOracle) {
    for (int d = 1; d <= 2; ++d) {
        const GridSpec spec(d, 6);
        const EigenBasis basis(spec);
        const std::size_t k = spec.interior_count() / 2;
        const Point x = spec.point(k);
        double parseval = 0.0;
        for (std::size_t a = 0; a < spec.interior_count(); ++a) {
            const MultiIndex alpha = unrank(a + 1, spec);
            // phi_alpha(x) = n^{d/2} b_alpha(x)
            const double phi = basis.mode(alpha)[k] * std::pow(spec.n(), 0.5 * d);
            parseval += phi * phi / (basis.eigenvalue(alpha) * basis.eigenvalue(alpha));
        }
        EXPECT_NEAR(kernel_l2_norm_sq(kKn, spec, x, 6), parseval, 1e-10) << "d=" << d;
    }
}

TEST(KernelDifference, SameKindIsZero) {
    EXPECT_EQ(kernel_l2_difference(kKn, kKn, GridSpec(2, 4), {0.3, 0.6, 0}, 8), 0.0);
}

TEST(KernelDifference, DecreasesUnderRefinement) {
    double prev = INFINITY;
    for (int n : {4, 8, 16, 32}) {
        const double v = kernel_l2_difference(kK, kKn, GridSpec(1, n), {0.5, 0, 0}, 1024);
        EXPECT_LT(v, prev) << "n=" << n;
        prev = v;
    }
}

TEST(KernelIncrement, HolderRatioBounded) {
    const GridSpec spec(1, 8);
    double max_ratio = 0.0;
    double min_ratio = INFINITY;
    for (double delta : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
        const double r = kernel_l2_increment(kK, spec, {0.5, 0, 0}, {0.5 + delta, 0, 0}, 2048) / (delta * delta);
        max_ratio = std::max(max_ratio, r);
        min_ratio = std::min(min_ratio, r);
    }
    EXPECT_LT(max_ratio / min_ratio, 2.0);
}

TEST(Holder, Exponents) {
    const HolderEstimate e1 = holder_estimate(1, 0.1);
    EXPECT_DOUBLE_EQ(e1.gamma, 0.5);
    EXPECT_THROW(holder_estimate(2, 0.5), std::invalid_argument);
    EXPECT_THROW(holder_estimate(3, 0.25), std::invalid_argument);
    EXPECT_THROW(holder_estimate(1, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace rspde
