#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rspde/lattice.hpp"

namespace rspde {

/// Continuous function on [0,1]^d (only the first d coordinates are read).
using ScalarFunction = std::function<double(const Point&)>;

/// Discrete obstacle problem: B Z = eta, Z >= -V, eta >= 0, <Z + V, eta> = 0.
struct LcpProblem {
    GridField barrier;  ///< V
};

struct LcpResiduals {
    double max_violation = 0.0;     ///< max_k (-(Z_k + V_k))^+
    double max_negative_eta = 0.0;  ///< max_k (-eta_k)^+
    double complementarity_gap = 0.0;  ///< |<Z + V, eta>|
};

struct LcpSolution {
    GridField z;
    GridField eta;
    LcpResiduals residuals;
    int sweeps = 0;
    bool polished = false;
};

struct LcpOptions {
    double omega = 1.5;
    /// Stop sweeping once the sup change between successive iterates is below tol.
    double tol = 1e-10;
    int max_sweeps = 2'000'000;
    /// After the sweeps, solve exactly on the detected free set and keep the
    /// result when it satisfies the complementarity conditions.
    bool active_set_polish = true;
};

class LcpConvergenceError : public std::runtime_error {
public:
    LcpConvergenceError(const std::string& what, LcpResiduals residuals, double last_change)
        : std::runtime_error(what), residuals_(residuals), last_change_(last_change) {}

    const LcpResiduals& residuals() const { return residuals_; }
    double last_change() const { return last_change_; }

private:
    LcpResiduals residuals_;
    double last_change_;
};

LcpResiduals lcp_residuals(const GridField& barrier, const GridField& z, const GridField& eta);

/**
 * Projected SOR on the standard form in w = Z + V:
 *   w >= 0,  B w - B V >= 0,  <w, B w - B V> = 0.
 * B is a symmetric positive-definite M-matrix, so the sweeps converge to the
 * unique solution from any start. `initial_z` warm-starts the iteration.
 */
LcpSolution solve_lcp(const LcpProblem& problem, const LcpOptions& options = {},
                      const std::optional<GridField>& initial_z = std::nullopt);

class PenaltyConvergenceError : public std::runtime_error {
public:
    PenaltyConvergenceError(const std::string& what, std::vector<double> trace)
        : std::runtime_error(what), trace_(std::move(trace)) {}
    const std::vector<double>& trace() const { return trace_; }

private:
    std::vector<double> trace_;
};

/// Solves B z = (1/epsilon) (z + V)^- by semismooth Newton.
GridField solve_penalized(const LcpProblem& problem, double epsilon, double tol = 1e-12, int max_iters = 200);

/// Samples a function at the interior lattice points.
GridField sample_on_lattice(const ScalarFunction& v, const GridSpec& spec);

struct DeterministicSolution {
    ContinuousField z;    ///< z^n
    ContinuousField eta;  ///< eta^n
    LcpSolution lattice;
};

/// Samples v on D_n, solves the lattice obstacle problem, and extends Z and eta multilinearly.
DeterministicSolution deterministic_scheme(const ScalarFunction& v, const GridSpec& spec,
                                           const LcpOptions& options = {});

struct EtaBoundReport {
    double max_eta = 0.0;
    double second_derivative_norm = 0.0;  ///< max_j sup |d^2 v / dx_j^2|
    double bound = 0.0;                   ///< 2 d ||v||_2 (1 + tol_factor)
    bool satisfied = false;
};

/// max_j sup_x |d^2 v / dx_j^2| by central differences on a fine net.
double second_derivative_norm(const ScalarFunction& v, int dim);

EtaBoundReport eta_smooth_bound_check(const ScalarFunction& v, const GridSpec& spec, double tol_factor = 0.05,
                                      const LcpOptions& options = {});

}  // namespace rspde
