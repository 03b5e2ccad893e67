#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rspde/lattice.hpp"

namespace rspde {

/**
 * The four Green kernels of the Dirichlet Laplacian on (0,1)^d.
 *
 *   Continuous             K(x,y)   = sum_{alpha in N^d} phi_a(x) phi_a(y) / (pi^2 |alpha|^2)
 *   InterpolatedContinuous K'(x,y)  = same series with phi^n_a(x) in place of phi_a(x)
 *   Discrete               K_n(x,y) = sum_{alpha in I_n^d} phi_a(k_n(x)) phi_a(k_n(y)) / lambda^n_a
 *   InterpolatedDiscrete   K^n(x,y) = sum_{alpha in I_n^d} phi^n_a(x) phi_a(k_n(y)) / lambda^n_a
 *
 * phi^n_a is the multilinear interpolant of phi_a on the n-lattice.
 */
enum class KernelTag { Continuous, InterpolatedContinuous, Discrete, InterpolatedDiscrete };

std::string to_string(KernelTag tag);
KernelTag kernel_tag_from_string(const std::string& name);

struct KernelKind {
    KernelTag tag = KernelTag::Discrete;
    /// Modes per axis for K and K'. Unset means the default truncation, or the
    /// closed form for K in d = 1. Ignored for K_n and K^n.
    std::optional<int> truncation;
};

/// max(64, 4n) for d = 1, 2 and max(32, 2n) for d = 3.
int default_truncation(const GridSpec& spec);

/// Modes per axis actually summed for this kind on this lattice.
int mode_count(const KernelKind& kind, const GridSpec& spec);

/// (x ^ y)(1 - (x v y)), the one-dimensional Green function.
double green_1d_closed_form(double x, double y);

double eval_kernel(const KernelKind& kind, const GridSpec& spec, const Point& x, const Point& y);

/**
 * G(x, y_q) at the cell midpoints y_q of a quadrature_n^d grid, natural
 * ordering over cells (first axis fastest).
 */
std::vector<double> kernel_slice(const KernelKind& kind, const GridSpec& spec, const Point& x, int quadrature_n);

/// Midpoint-rule approximation of int_D G(x,y)^2 dy.
double kernel_l2_norm_sq(const KernelKind& kind, const GridSpec& spec, const Point& x, int quadrature_n);

/// Midpoint-rule approximation of int_D (G_A(x,y) - G_B(x,y))^2 dy.
double kernel_l2_difference(const KernelKind& a, const KernelKind& b, const GridSpec& spec, const Point& x,
                            int quadrature_n);

/// Midpoint-rule approximation of int_D (G(x,y) - G(z,y))^2 dy.
double kernel_l2_increment(const KernelKind& kind, const GridSpec& spec, const Point& x, const Point& z,
                           int quadrature_n);

/// Hoelder exponents of the kernel estimates for a given dimension and epsilon.
struct HolderEstimate {
    int dim;
    double epsilon;
    double gamma;  ///< increment exponent: int |G(x,.)-G(z,.)|^2 <= B |x-z|^{4 gamma}
    double sigma;  ///< rate exponent: int |K(x,.)-K^n(x,.)|^2 <= C n^{-2 sigma}
};

HolderEstimate holder_estimate(int dim, double epsilon);

}  // namespace rspde
