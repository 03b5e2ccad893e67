#include "rspde/reference.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <cmath>
#include <stdexcept>

namespace rspde::reference {

namespace {

Eigen::SparseMatrix<double> sparse_b(const GridSpec& spec) {
    const auto size = static_cast<Eigen::Index>(spec.interior_count());
    const double n2 = static_cast<double>(spec.n()) * spec.n();
    std::vector<Eigen::Triplet<double>> entries;
    for (Eigen::Index k = 0; k < size; ++k) {
        const MultiIndex i = unrank(static_cast<std::size_t>(k) + 1, spec);
        entries.emplace_back(k, k, 2.0 * spec.dim() * n2);
        for (int j = 0; j < spec.dim(); ++j) {
            for (int step : {-1, 1}) {
                MultiIndex nb = i;
                nb[j] += step;
                if (nb[j] < 1 || nb[j] > spec.n() - 1) continue;
                entries.emplace_back(k, static_cast<Eigen::Index>(storage_index(nb, spec)), -n2);
            }
        }
    }
    Eigen::SparseMatrix<double> b(size, size);
    b.setFromTriplets(entries.begin(), entries.end());
    return b;
}

}  // namespace

std::vector<double> dense_b(const GridSpec& spec) {
    const Eigen::MatrixXd b(sparse_b(spec));
    std::vector<double> out(static_cast<std::size_t>(b.size()));
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
        for (Eigen::Index c = 0; c < b.cols(); ++c) out[static_cast<std::size_t>(r * b.cols() + c)] = b(r, c);
    }
    return out;
}

GridField sparse_poisson(const GridField& rhs) {
    const Eigen::SparseMatrix<double> b = sparse_b(rhs.spec());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(b);
    if (solver.info() != Eigen::Success) throw std::runtime_error("sparse factorisation failed");
    const Eigen::Map<const Eigen::VectorXd> r(rhs.values().data(), static_cast<Eigen::Index>(rhs.size()));
    const Eigen::VectorXd u = solver.solve(r);
    return GridField(rhs.spec(), std::vector<double>(u.data(), u.data() + u.size()));
}

std::optional<LcpSolution> enumerate_active_sets(const LcpProblem& problem, double tol) {
    const GridField& v = problem.barrier;
    const GridSpec& spec = v.spec();
    const auto size = static_cast<Eigen::Index>(v.size());
    if (size > 20) throw std::invalid_argument("active-set enumeration is limited to 20 unknowns");
    const Eigen::MatrixXd b(sparse_b(spec));
    const Eigen::Map<const Eigen::VectorXd> vv(v.values().data(), size);
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff() * vv.cwiseAbs().maxCoeff());

    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << size); ++mask) {
        // Active rows pin Z_k = -V_k; free rows satisfy (B Z)_k = 0.
        Eigen::VectorXd z = Eigen::VectorXd::Zero(size);
        std::vector<Eigen::Index> free;
        for (Eigen::Index k = 0; k < size; ++k) {
            if (mask >> k & 1U) {
                z(k) = -vv(k);
            } else {
                free.push_back(k);
            }
        }
        if (!free.empty()) {
            const auto nf = static_cast<Eigen::Index>(free.size());
            Eigen::MatrixXd bff(nf, nf);
            Eigen::VectorXd rhs(nf);
            for (Eigen::Index r = 0; r < nf; ++r) {
                double s = 0.0;
                for (Eigen::Index c = 0; c < size; ++c) {
                    if (mask >> c & 1U) s -= b(free[static_cast<std::size_t>(r)], c) * z(c);
                }
                rhs(r) = s;
                for (Eigen::Index c = 0; c < nf; ++c) {
                    bff(r, c) = b(free[static_cast<std::size_t>(r)], free[static_cast<std::size_t>(c)]);
                }
            }
            const Eigen::VectorXd zf = bff.ldlt().solve(rhs);
            for (Eigen::Index r = 0; r < nf; ++r) z(free[static_cast<std::size_t>(r)]) = zf(r);
        }
        const Eigen::VectorXd eta = b * z;
        bool ok = true;
        for (Eigen::Index k = 0; k < size && ok; ++k) {
            if (z(k) + vv(k) < -tol * std::max(1.0, vv.cwiseAbs().maxCoeff())) ok = false;
            if (eta(k) < -tol * scale) ok = false;
        }
        if (!ok) continue;

        GridField zf(spec, std::vector<double>(z.data(), z.data() + size));
        GridField ef(spec, std::vector<double>(eta.data(), eta.data() + size));
        const LcpResiduals res = lcp_residuals(v, zf, ef);
        return LcpSolution{std::move(zf), std::move(ef), res, 0, false};
    }
    return std::nullopt;
}

double trilinear_successive(const GridField& f, const Point& x) {
    const GridSpec& spec = f.spec();
    if (spec.dim() != 3) throw std::invalid_argument("trilinear_successive needs d = 3");
    const int n = spec.n();
    int k[3];
    for (int j = 0; j < 3; ++j) {
        k[j] = static_cast<int>(std::floor(x[j] * n));
        if (k[j] >= n) k[j] = n - 1;
    }
    const auto z = [&](int a, int b, int c) { return f.at_closed({a, b, c}); };
    const double x1 = x[0] - static_cast<double>(k[0]) / n;
    const double x2 = x[1] - static_cast<double>(k[1]) / n;
    const double x3 = x[2] - static_cast<double>(k[2]) / n;

    // z(x1, k2/n, k3/n) and its three companions at the other (x2, x3) corners
    const auto along1 = [&](int b, int c) { return z(k[0], b, c) + n * x1 * (z(k[0] + 1, b, c) - z(k[0], b, c)); };
    // z(x1, x2, c/n)
    const auto along2 = [&](int c) {
        const double lo = along1(k[1], c);
        return lo + n * x2 * (along1(k[1] + 1, c) - lo);
    };
    const double lo = along2(k[2]);
    return lo + n * x3 * (along2(k[2] + 1) - lo);
}

}  // namespace rspde::reference
