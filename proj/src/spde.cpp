#include "rspde/spde.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "rspde/greens.hpp"

namespace rspde {

CoefficientProbe probe_coefficients(const CoefficientPair& coeffs, int dim, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> value(-10.0, 10.0);
    CoefficientProbe probe;
    for (int s = 0; s < samples; ++s) {
        Point x{0.0, 0.0, 0.0};
        Point y{0.0, 0.0, 0.0};
        double dx2 = 0.0;
        for (int j = 0; j < dim; ++j) {
            x[j] = unit(rng);
            y[j] = unit(rng);
            dx2 += (x[j] - y[j]) * (x[j] - y[j]);
        }
        const double u = value(rng);
        const double v = value(rng);
        const double denom = std::sqrt(dx2) + std::abs(u - v);
        if (denom > 0.0) {
            const double num = std::abs(coeffs.f(x, u) - coeffs.f(y, v)) + std::abs(coeffs.sigma(x, u) - coeffs.sigma(y, v));
            probe.max_ratio = std::max(probe.max_ratio, num / denom);
        }
        const double lo = std::min(u, v);
        const double hi = std::max(u, v);
        if (coeffs.f(x, lo) > coeffs.f(x, hi) + 1e-12) probe.monotone_observed = false;
    }
    probe.lipschitz_ok = probe.max_ratio <= coeffs.lipschitz * (1.0 + 1e-9) + 1e-12;
    return probe;
}

GridField evaluate_at_nodes(const Coefficient& c, const GridField& u) {
    const GridSpec& spec = u.spec();
    GridField out(spec);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = c(spec.point(k), u[k]);
    return out;
}

SpdeSolution picard_solve(const CoefficientPair& coeffs, std::shared_ptr<const NoiseSample> noise,
                          const PicardOptions& options) {
    if (!noise) throw std::invalid_argument("picard_solve needs a noise sample");
    if (!(options.tol > 0.0)) throw std::invalid_argument("Picard tolerance must be positive");
    const GridSpec spec = noise->spec();
    const EigenBasis basis(spec);

    GridField u(spec);
    std::optional<GridField> warm;
    std::vector<double> history;
    for (int m = 1; m <= options.max_iters; ++m) {
        const GridField rhs =
            evaluate_at_nodes(coeffs.f, u) + discrete_noise_term(*noise, evaluate_at_nodes(coeffs.sigma, u));
        GridField v = solve_poisson(rhs, basis);
        LcpSolution lcp = solve_lcp(LcpProblem{v}, options.lcp, warm);
        GridField next = v + lcp.z;
        const double change = sup_distance(next, u);
        history.push_back(change);
        u = std::move(next);
        if (change <= options.tol) {
            return SpdeSolution{std::move(u), std::move(lcp.eta), std::move(v), std::move(lcp.z), std::move(noise),
                                m,          change,             std::move(history)};
        }
        warm = std::move(lcp.z);
    }
    throw PicardConvergenceError("Picard iteration did not converge within " + std::to_string(options.max_iters) +
                                     " iterations; the contraction condition is probably violated",
                                 std::move(history));
}

GridField equation_residual(const CoefficientPair& coeffs, const NoiseSample& noise, const GridField& u,
                            const GridField& eta) {
    return apply_b(u) - evaluate_at_nodes(coeffs.f, u) -
           discrete_noise_term(noise, evaluate_at_nodes(coeffs.sigma, u)) - eta;
}

ContinuousField assemble_continuous(const SpdeSolution& sol) { return ContinuousField(sol.u); }

double kernel_representation(const SpdeSolution& sol, const CoefficientPair& coeffs, const Point& x) {
    const GridSpec& spec = sol.u.spec();
    const double cell_volume = std::pow(spec.h(), spec.dim());
    const GridField fv = evaluate_at_nodes(coeffs.f, sol.u);
    const GridField sv = evaluate_at_nodes(coeffs.sigma, sol.u);
    const KernelKind kind{KernelTag::InterpolatedDiscrete, std::nullopt};
    double total = 0.0;
    for (std::size_t k = 0; k < sol.u.size(); ++k) {
        const MultiIndex i = unrank(k + 1, spec);
        const double g = (fv[k] + sol.eta[k]) * cell_volume + sv[k] * sol.noise->increment(i);
        total += eval_kernel(kind, spec, x, spec.point(k)) * g;
    }
    return total;
}

bool geometric_tail(const std::vector<double>& history, double max_ratio, int window, double floor) {
    // Only changes above the floating-point floor carry information.
    std::vector<double> informative;
    for (double c : history) {
        if (c > floor) informative.push_back(c);
    }
    if (informative.size() < 2) return true;
    const std::size_t ratios = std::min<std::size_t>(static_cast<std::size_t>(window), informative.size() - 1);
    for (std::size_t r = 0; r < ratios; ++r) {
        const std::size_t i = informative.size() - 1 - r;
        if (informative[i] > max_ratio * informative[i - 1]) return false;
    }
    return true;
}

SmallnessReport check_smallness(const CoefficientPair& coeffs, const GridSpec& spec, const SmallnessInputs& in) {
    const HolderEstimate est = holder_estimate(spec.dim(), in.epsilon);
    const double p_min = spec.dim() / (2.0 * est.gamma);
    if (!(in.p > p_min)) {
        throw std::domain_error("moment order p must exceed d / (2 gamma(d, eps)) = " + std::to_string(p_min));
    }

    // Sample points: the lattice point nearest the centre plus seeded uniform points.
    std::vector<Point> xs;
    Point centre{0.0, 0.0, 0.0};
    for (int j = 0; j < spec.dim(); ++j) centre[j] = spec.coord(spec.n() / 2);
    xs.push_back(centre);
    std::mt19937_64 rng(in.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 1; s < in.x_samples; ++s) {
        Point x{0.0, 0.0, 0.0};
        for (int j = 0; j < spec.dim(); ++j) x[j] = unit(rng);
        xs.push_back(x);
    }

    const KernelKind discrete{KernelTag::Discrete, std::nullopt};
    const KernelKind interpolated{KernelTag::InterpolatedDiscrete, std::nullopt};
    SmallnessReport r;
    r.p = in.p;
    r.epsilon = in.epsilon;
    r.gamma = est.gamma;
    r.c_p = in.c_p;
    r.a = in.a;
    r.b_holder = in.b_holder;
    r.lipschitz = coeffs.lipschitz;
    for (const Point& x : xs) {
        // quadrature at resolution n is exact for kernels piecewise constant in y
        r.c_d = std::max(r.c_d, kernel_l2_norm_sq(discrete, spec, x, spec.n()));
        r.c_d_tilde = std::max(r.c_d_tilde, kernel_l2_norm_sq(interpolated, spec, x, spec.n()));
    }

    const double p = in.p;
    const double lp = std::pow(coeffs.lipschitz, p);
    const double bp = std::pow(in.b_holder, p / 2.0);
    r.lhs_lattice = std::pow(2.0, 2 * p - 1) * lp * std::pow(r.c_d, p / 2.0) +
                    std::pow(2.0, 3 * p - 2) * in.c_p * lp * (in.a * bp + std::pow(r.c_d, p / 2.0));
    r.lhs = std::pow(2.0, 3 * p - 2) * lp * std::pow(r.c_d_tilde, p / 2.0) +
            std::pow(2.0, 4 * p - 3) * in.c_p * lp * (in.a * bp + std::pow(r.c_d_tilde, p / 2.0));
    r.satisfied_lattice = r.lhs_lattice < 1.0;
    r.satisfied = r.lhs < 1.0;
    return r;
}

}  // namespace rspde
