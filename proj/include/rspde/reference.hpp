#pragma once

#include <optional>

#include "rspde/lattice.hpp"
#include "rspde/obstacle.hpp"

// Brute-force reference solvers. They share no code path with the production
// solvers and exist to check them.
namespace rspde::reference {

/// Dense B = -n^2 A^n, row-major, natural ordering.
std::vector<double> dense_b(const GridSpec& spec);

/// Sparse direct solve of B u = rhs (Eigen simplicial LDL^T).
GridField sparse_poisson(const GridField& rhs);

/**
 * Exhaustive search over all 2^N active sets; the first set whose linear
 * solve satisfies every LCP condition (to `tol`) is returned. Practical for
 * N = (n-1)^d <= 16.
 */
std::optional<LcpSolution> enumerate_active_sets(const LcpProblem& problem, double tol = 1e-10);

/// The d = 3 multilinear interpolation formulas, written out axis by axis.
double trilinear_successive(const GridField& f, const Point& x);

}  // namespace rspde::reference
