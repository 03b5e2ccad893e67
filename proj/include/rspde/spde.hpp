#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rspde/lattice.hpp"
#include "rspde/noise.hpp"
#include "rspde/obstacle.hpp"

namespace rspde {

/// f(x, u) or sigma(x, u).
using Coefficient = std::function<double(const Point&, double)>;

/**
 * Drift f and diffusion sigma of the reflected equation, with the metadata
 * the smallness condition reads. L1 and L2 are declared, not derived; see
 * probe_coefficients for a spot check.
 */
struct CoefficientPair {
    Coefficient f;
    Coefficient sigma;
    double lipschitz = 0.0;         ///< L1
    double bound_at_origin = 0.0;   ///< L2 >= |f(0,0)| + |sigma(0,0)|
    bool monotone_f = false;        ///< f non-decreasing in u
    std::string f_name = "custom";
    std::string sigma_name = "custom";
};

struct CoefficientProbe {
    double max_ratio = 0.0;  ///< max observed (|df| + |dsigma|) / (|dx| + |du|)
    bool lipschitz_ok = true;
    bool monotone_observed = true;
};

/// Random-pair spot check of the declared Lipschitz constant and of monotonicity of f.
CoefficientProbe probe_coefficients(const CoefficientPair& coeffs, int dim, int samples = 1000,
                                    std::uint64_t seed = 7);

/// Coefficient evaluated at the lattice nodes: (c(x_k, u_k))_k.
GridField evaluate_at_nodes(const Coefficient& c, const GridField& u);

struct PicardOptions {
    double tol = 1e-8;  ///< sup change between successive iterates
    int max_iters = 200;
    LcpOptions lcp;
};

struct SpdeSolution {
    GridField u;
    GridField eta;
    GridField v;  ///< linear part V^m of the last stage
    GridField z;  ///< obstacle part Z^m of the last stage
    std::shared_ptr<const NoiseSample> noise;
    int picard_iterations = 0;
    double final_change = 0.0;
    std::vector<double> change_history;
};

class PicardConvergenceError : public std::runtime_error {
public:
    PicardConvergenceError(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), history_(std::move(history)) {}
    const std::vector<double>& change_history() const { return history_; }

private:
    std::vector<double> history_;
};

/**
 * Picard construction of the lattice solution: from u^0 = 0, stage m solves
 *   B V^m = f(u^{m-1}) + n^d sigma(u^{m-1}) Delta W,
 *   B Z^m = eta^m,  Z^m >= -V^m,  <Z^m + V^m, eta^m> = 0,
 * and sets u^m = V^m + Z^m, until sup |u^m - u^{m-1}| <= tol.
 */
SpdeSolution picard_solve(const CoefficientPair& coeffs, std::shared_ptr<const NoiseSample> noise,
                          const PicardOptions& options = {});

/// B u - f(u) - n^d sigma(u) Delta W - eta, at the lattice nodes.
GridField equation_residual(const CoefficientPair& coeffs, const NoiseSample& noise, const GridField& u,
                            const GridField& eta);

/// Multilinear extension of u^n.
ContinuousField assemble_continuous(const SpdeSolution& sol);

/**
 * Kernel form of the continuous field:
 *   sum_j K^n(x, x_j) [ (f_j + eta_j) h^d + sigma_j Delta W_j ],
 * the cell sums of the integrals against K^n(x, .).
 */
double kernel_representation(const SpdeSolution& sol, const CoefficientPair& coeffs, const Point& x);

/// True when the last `window` ratios of successive changes are all <= max_ratio.
bool geometric_tail(const std::vector<double>& history, double max_ratio = 0.95, int window = 5,
                    double floor = 1e-13);

struct SmallnessInputs {
    double p = 2.0;
    double c_p = 1.0;
    double a = 1.0;
    double b_holder = 1.0;
    double epsilon = 0.01;
    int x_samples = 32;
    std::uint64_t seed = 11;
};

struct SmallnessReport {
    double p = 0.0;
    double epsilon = 0.0;
    double gamma = 0.0;
    double c_p = 0.0;
    double a = 0.0;
    double b_holder = 0.0;
    double lipschitz = 0.0;
    double c_d = 0.0;        ///< sup_x int |K_n(x,y)|^2 dy over the sampled x
    double c_d_tilde = 0.0;  ///< sup_x int |K^n(x,y)|^2 dy over the sampled x
    double lhs_lattice = 0.0;  ///< 2^{2p-1} L1^p C_D^{p/2} + 2^{3p-2} c_p L1^p (a B^{p/2} + C_D^{p/2})
    double lhs = 0.0;          ///< 2^{3p-2} L1^p C~_D^{p/2} + 2^{4p-3} c_p L1^p (a B^{p/2} + C~_D^{p/2})
    bool satisfied_lattice = false;
    bool satisfied = false;
};

/// Evaluates the contraction conditions with measured kernel constants. Advisory only.
SmallnessReport check_smallness(const CoefficientPair& coeffs, const GridSpec& spec, const SmallnessInputs& inputs);

}  // namespace rspde
