#include "rspde/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rspde {

namespace {

// Neighbour table of the (2d+1)-point stencil; -1 marks the Dirichlet boundary.
class Stencil {
public:
    explicit Stencil(const GridSpec& spec)
        : dim_(spec.dim()),
          size_(spec.interior_count()),
          n2_(static_cast<double>(spec.n()) * spec.n()),
          diag_(2.0 * spec.dim() * n2_),
          neighbours_(size_ * 2 * static_cast<std::size_t>(dim_)) {
        const auto m = static_cast<std::size_t>(spec.n() - 1);
        std::size_t stride = 1;
        for (int axis = 0; axis < dim_; ++axis) {
            for (std::size_t k = 0; k < size_; ++k) {
                const std::size_t pos = (k / stride) % m;
                auto* nb = &neighbours_[(k * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(axis)) * 2];
                nb[0] = pos > 0 ? static_cast<long>(k - stride) : -1;
                nb[1] = pos + 1 < m ? static_cast<long>(k + stride) : -1;
            }
            stride *= m;
        }
    }

    double diag() const { return diag_; }

    // n^2 * (sum of neighbour values)
    double off_sum(std::span<const double> x, std::size_t k) const {
        const long* nb = &neighbours_[k * 2 * static_cast<std::size_t>(dim_)];
        double s = 0.0;
        for (int t = 0; t < 2 * dim_; ++t) {
            if (nb[t] >= 0) s += x[static_cast<std::size_t>(nb[t])];
        }
        return n2_ * s;
    }

    double apply_row(std::span<const double> x, std::size_t k) const { return diag_ * x[k] - off_sum(x, k); }

private:
    int dim_;
    std::size_t size_;
    double n2_;
    double diag_;
    std::vector<long> neighbours_;
};

// Jacobi-preconditioned CG on the rows where `free` is set; other entries of x stay fixed.
// Solves (B + diag(shift)) x = b restricted to the free rows.
void masked_pcg(const Stencil& stencil, std::span<const double> shift, const std::vector<char>& free,
                std::span<const double> b, std::span<double> x, double rel_tol, std::size_t max_iters) {
    const std::size_t size = x.size();
    std::vector<double> r(size, 0.0);
    std::vector<double> z(size, 0.0);
    std::vector<double> p(size, 0.0);
    std::vector<double> ap(size, 0.0);
    const auto precond = [&](std::size_t k) { return 1.0 / (stencil.diag() + shift[k]); };

    double bnorm = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
        if (!free[k]) continue;
        r[k] = b[k] - stencil.apply_row(x, k) - shift[k] * x[k];
        bnorm = std::max(bnorm, std::abs(b[k]));
    }
    if (bnorm == 0.0) bnorm = 1.0;

    double rz = 0.0;
    for (std::size_t k = 0; k < size; ++k) {
        if (!free[k]) continue;
        z[k] = precond(k) * r[k];
        p[k] = z[k];
        rz += r[k] * z[k];
    }
    for (std::size_t it = 0; it < max_iters; ++it) {
        double rmax = 0.0;
        for (std::size_t k = 0; k < size; ++k) {
            if (free[k]) rmax = std::max(rmax, std::abs(r[k]));
        }
        if (rmax <= rel_tol * bnorm) return;

        double pap = 0.0;
        for (std::size_t k = 0; k < size; ++k) {
            if (!free[k]) continue;
            ap[k] = stencil.apply_row(p, k) + shift[k] * p[k];
            pap += p[k] * ap[k];
        }
        if (!(pap > 0.0)) return;
        const double alpha = rz / pap;
        double rz_next = 0.0;
        for (std::size_t k = 0; k < size; ++k) {
            if (!free[k]) continue;
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
            z[k] = precond(k) * r[k];
            rz_next += r[k] * z[k];
        }
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t k = 0; k < size; ++k) {
            if (free[k]) p[k] = z[k] + beta * p[k];
        }
    }
}

// One projected SOR sweep in natural order on Z >= lower; returns the sup change.
// In w = Z + V this is the standard projected SOR for (B w + q) >= 0, w >= 0 with q = -B V;
// carrying Z keeps untouched entries exact (Z = 0 stays 0, active Z = -V exactly).
double psor_sweep(const Stencil& stencil, std::span<const double> lower, std::span<double> z, double omega) {
    double change = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double residual = stencil.apply_row(z, k);
        const double next = std::max(lower[k], z[k] - omega * residual / stencil.diag());
        change = std::max(change, std::abs(next - z[k]));
        z[k] = next;
    }
    return change;
}

// Exact solve of (B Z)_k = 0 on the free set {Z > lower}; accepted only when the result is complementary.
bool polish_active_set(const Stencil& stencil, std::span<const double> lower, std::vector<double>& z) {
    const std::size_t size = z.size();
    std::vector<char> free(size, 0);
    bool any_active = false;
    for (std::size_t k = 0; k < size; ++k) {
        free[k] = z[k] > lower[k] ? 1 : 0;
        any_active = any_active || !free[k];
    }
    std::vector<double> candidate = z;
    if (!any_active) {
        // nothing pins the solution: B Z = 0 forces Z = 0
        std::fill(candidate.begin(), candidate.end(), 0.0);
    } else {
        const std::vector<double> zero(size, 0.0);
        masked_pcg(stencil, zero, free, zero, candidate, 1e-14, 20 * size + 100);
    }

    double scale = 0.0;
    for (std::size_t k = 0; k < size; ++k) scale = std::max({scale, std::abs(candidate[k]), std::abs(lower[k])});
    const double w_tol = 1e-12 * std::max(1.0, scale);
    const double eta_tol = 1e-10 * std::max(1.0, stencil.diag() * scale);
    for (std::size_t k = 0; k < size; ++k) {
        if (free[k]) {
            if (candidate[k] - lower[k] < -w_tol) return false;
        } else if (stencil.apply_row(candidate, k) < -eta_tol) {
            return false;
        }
    }
    for (std::size_t k = 0; k < size; ++k) candidate[k] = std::max(lower[k], candidate[k]);
    z = std::move(candidate);
    return true;
}

}  // namespace

LcpResiduals lcp_residuals(const GridField& barrier, const GridField& z, const GridField& eta) {
    LcpResiduals r;
    double gap = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        const double w = z[k] + barrier[k];
        r.max_violation = std::max(r.max_violation, -w);
        r.max_negative_eta = std::max(r.max_negative_eta, -eta[k]);
        gap += w * eta[k];
    }
    r.complementarity_gap = std::abs(gap);
    return r;
}

LcpSolution solve_lcp(const LcpProblem& problem, const LcpOptions& options, const std::optional<GridField>& initial_z) {
    if (!(options.tol > 0.0)) throw std::invalid_argument("LCP tolerance must be positive");
    if (!(options.omega > 0.0 && options.omega < 2.0)) throw std::invalid_argument("SOR relaxation must lie in (0,2)");
    const GridField& v = problem.barrier;
    const GridSpec& spec = v.spec();
    for (double x : v.values()) {
        if (!std::isfinite(x)) throw std::invalid_argument("barrier must be finite");
    }
    const Stencil stencil(spec);

    std::vector<double> lower(v.size());
    for (std::size_t k = 0; k < lower.size(); ++k) lower[k] = -v[k];

    std::vector<double> zv(v.size(), 0.0);
    if (initial_z) {
        if (!(initial_z->spec() == spec)) throw std::invalid_argument("warm start lives on a different lattice");
        for (std::size_t k = 0; k < zv.size(); ++k) zv[k] = std::max(lower[k], (*initial_z)[k]);
    } else {
        for (std::size_t k = 0; k < zv.size(); ++k) zv[k] = std::max(lower[k], 0.0);
    }

    int sweeps = 0;
    bool polished = false;
    double tol = options.tol;
    double change = std::numeric_limits<double>::infinity();
    for (;;) {
        while (change > tol && sweeps < options.max_sweeps) {
            change = psor_sweep(stencil, lower, zv, options.omega);
            ++sweeps;
        }
        if (change > tol) break;
        if (!options.active_set_polish) break;
        if (polish_active_set(stencil, lower, zv)) {
            polished = true;
            break;
        }
        // Free set not settled yet; keep sweeping with a tighter tolerance.
        if (tol < 1e-15) break;
        tol *= 0.01;
        change = std::numeric_limits<double>::infinity();
    }

    GridField z(spec, std::move(zv));
    GridField eta = apply_b(z);
    const LcpResiduals residuals = lcp_residuals(v, z, eta);
    if (change > options.tol && !polished) {
        throw LcpConvergenceError("projected SOR did not reach tolerance within " +
                                      std::to_string(options.max_sweeps) + " sweeps",
                                  residuals, change);
    }
    return LcpSolution{std::move(z), std::move(eta), residuals, sweeps, polished};
}

GridField solve_penalized(const LcpProblem& problem, double epsilon, double tol, int max_iters) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("penalty parameter must be positive");
    const GridField& v = problem.barrier;
    const GridSpec& spec = v.spec();
    const Stencil stencil(spec);
    const std::size_t size = v.size();
    const std::vector<char> all(size, 1);

    std::vector<double> z(size, 0.0);
    std::vector<char> active(size, 0);
    std::vector<double> trace;
    for (int it = 0; it < max_iters; ++it) {
        // Newton step: (B + D_A / eps) z = -D_A V / eps, A = {z + V < 0}.
        std::vector<char> next_active(size, 0);
        std::vector<double> shift(size, 0.0);
        std::vector<double> rhs(size, 0.0);
        for (std::size_t k = 0; k < size; ++k) {
            if (z[k] + v[k] < 0.0) {
                next_active[k] = 1;
                shift[k] = 1.0 / epsilon;
                rhs[k] = -v[k] / epsilon;
            }
        }
        std::vector<double> next = z;
        masked_pcg(stencil, shift, all, rhs, next, 1e-14, 20 * size + 100);

        double change = 0.0;
        for (std::size_t k = 0; k < size; ++k) change = std::max(change, std::abs(next[k] - z[k]));
        trace.push_back(change);
        // The same active set twice means the step solved the final piecewise-linear system.
        const bool settled = it > 0 && next_active == active;
        double zmax = 1.0;
        for (double x : next) zmax = std::max(zmax, std::abs(x));
        z = std::move(next);
        active = std::move(next_active);
        if (settled || change <= tol * zmax) {
            return GridField(spec, std::move(z));
        }
    }
    throw PenaltyConvergenceError("penalized problem did not converge in " + std::to_string(max_iters) + " iterations",
                                  std::move(trace));
}

GridField sample_on_lattice(const ScalarFunction& v, const GridSpec& spec) {
    GridField out(spec);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = v(spec.point(k));
    return out;
}

DeterministicSolution deterministic_scheme(const ScalarFunction& v, const GridSpec& spec, const LcpOptions& options) {
    // v must vanish on the boundary; probe each face on an 11-point net.
    const int d = spec.dim();
    constexpr int kProbe = 11;
    int probes = 1;
    for (int j = 1; j < d; ++j) probes *= kProbe;
    for (int axis = 0; axis < d; ++axis) {
        for (double side : {0.0, 1.0}) {
            for (int p = 0; p < probes; ++p) {
                Point x{0.0, 0.0, 0.0};
                int r = p;
                for (int j = 0; j < d; ++j) {
                    if (j == axis) {
                        x[j] = side;
                    } else {
                        x[j] = static_cast<double>(r % kProbe) / (kProbe - 1);
                        r /= kProbe;
                    }
                }
                if (std::abs(v(x)) > 1e-6) throw std::invalid_argument("barrier does not vanish on the boundary");
            }
        }
    }

    LcpSolution sol = solve_lcp(LcpProblem{sample_on_lattice(v, spec)}, options);
    ContinuousField z(sol.z);
    ContinuousField eta(sol.eta);
    return DeterministicSolution{std::move(z), std::move(eta), std::move(sol)};
}

double second_derivative_norm(const ScalarFunction& v, int dim) {
    const int net = dim == 1 ? 4096 : (dim == 2 ? 256 : 48);
    constexpr double step = 1e-4;
    int total = 1;
    for (int j = 0; j < dim; ++j) total *= net;
    double norm = 0.0;
    for (int p = 0; p < total; ++p) {
        Point x{0.0, 0.0, 0.0};
        int r = p;
        for (int j = 0; j < dim; ++j) {
            // keep the stencil inside [0,1]
            x[j] = step + (1.0 - 2.0 * step) * (static_cast<double>(r % net) + 0.5) / net;
            r /= net;
        }
        const double centre = v(x);
        for (int j = 0; j < dim; ++j) {
            Point lo = x;
            Point hi = x;
            lo[j] -= step;
            hi[j] += step;
            norm = std::max(norm, std::abs(v(hi) - 2.0 * centre + v(lo)) / (step * step));
        }
    }
    return norm;
}

EtaBoundReport eta_smooth_bound_check(const ScalarFunction& v, const GridSpec& spec, double tol_factor,
                                      const LcpOptions& options) {
    const DeterministicSolution sol = deterministic_scheme(v, spec, options);
    EtaBoundReport report;
    for (double e : sol.lattice.eta.values()) report.max_eta = std::max(report.max_eta, e);
    report.second_derivative_norm = second_derivative_norm(v, spec.dim());
    report.bound = 2.0 * spec.dim() * report.second_derivative_norm * (1.0 + tol_factor);
    report.satisfied = report.max_eta <= report.bound;
    return report;
}

}  // namespace rspde
