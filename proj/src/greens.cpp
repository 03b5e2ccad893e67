#include "rspde/greens.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rspde {

namespace {

constexpr double kPi = std::numbers::pi;

double phi(int a, double t) { return std::numbers::sqrt2 * std::sin(a * kPi * t); }

// Linear interpolant of phi_a between k_n(t) and k_n^+(t).
double phi_interp(int a, double t, int n) {
    const int j = floor_index(t, n);
    const double lo = static_cast<double>(j) / n;
    const double hi = static_cast<double>(j + 1) / n;
    const double p0 = phi(a, lo);
    return p0 + n * (phi(a, hi) - p0) * (t - lo);
}

bool is_lattice_kind(KernelTag tag) { return tag == KernelTag::Discrete || tag == KernelTag::InterpolatedDiscrete; }

bool uses_closed_form(const KernelKind& kind, const GridSpec& spec) {
    return spec.dim() == 1 && !kind.truncation &&
           (kind.tag == KernelTag::Continuous || kind.tag == KernelTag::InterpolatedContinuous);
}

// Factor of the kernel in its first argument, per axis.
double x_factor(KernelTag tag, int a, double t, int n) {
    switch (tag) {
        case KernelTag::Continuous: return phi(a, t);
        case KernelTag::Discrete: return phi(a, floor_coord(t, n));
        case KernelTag::InterpolatedContinuous:
        case KernelTag::InterpolatedDiscrete: return phi_interp(a, t, n);
    }
    return 0.0;
}

double y_factor(KernelTag tag, int a, double t, int n) {
    return is_lattice_kind(tag) ? phi(a, floor_coord(t, n)) : phi(a, t);
}

// Weight 1/lambda of the mode alpha (alpha components 1-based).
class ModeWeights {
public:
    ModeWeights(KernelTag tag, const GridSpec& spec, int modes) : lattice_(is_lattice_kind(tag)) {
        if (lattice_) {
            factors_.resize(static_cast<std::size_t>(modes));
            for (int j = 1; j <= modes; ++j) factors_[static_cast<std::size_t>(j - 1)] = eigen_factor(j, spec.n());
        }
    }

    double axis_term(int a) const {
        const double aa = static_cast<double>(a) * a;
        return lattice_ ? aa * factors_[static_cast<std::size_t>(a - 1)] : aa;
    }

private:
    bool lattice_;
    std::vector<double> factors_;
};

void check_point(const Point& x, int dim) {
    for (int j = 0; j < dim; ++j) {
        if (!(x[j] >= 0.0 && x[j] <= 1.0)) throw std::domain_error("kernel argument outside [0,1]^d");
    }
}

// Replaces the extent of `axis` (size `from`) by `to` through table[a * to + q].
std::vector<double> contract_axis(const std::vector<double>& in, std::array<std::size_t, kMaxDim>& dims, int axis,
                                  const std::vector<double>& table, std::size_t to) {
    std::size_t inner = 1;
    for (int j = 0; j < axis; ++j) inner *= dims[static_cast<std::size_t>(j)];
    const std::size_t from = dims[static_cast<std::size_t>(axis)];
    std::size_t outer = 1;
    for (int j = axis + 1; j < kMaxDim; ++j) outer *= dims[static_cast<std::size_t>(j)];

    std::vector<double> out(inner * to * outer, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t a = 0; a < from; ++a) {
            const double* src = &in[(o * from + a) * inner];
            const double* row = &table[a * to];
            for (std::size_t q = 0; q < to; ++q) {
                const double w = row[q];
                if (w == 0.0) continue;
                double* dst = &out[(o * to + q) * inner];
                for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
            }
        }
    }
    dims[static_cast<std::size_t>(axis)] = to;
    return out;
}

double closed_form_value(const KernelKind& kind, const GridSpec& spec, double x, double y) {
    if (kind.tag == KernelTag::Continuous) return green_1d_closed_form(x, y);
    // K' is the linear interpolant in x of K on the n-lattice.
    const int n = spec.n();
    const int j = floor_index(x, n);
    const double lo = static_cast<double>(j) / n;
    const double hi = static_cast<double>(j + 1) / n;
    const double g0 = green_1d_closed_form(lo, y);
    const double g1 = hi <= 1.0 ? green_1d_closed_form(hi, y) : 0.0;
    return g0 + n * (g1 - g0) * (x - lo);
}

}  // namespace

std::string to_string(KernelTag tag) {
    switch (tag) {
        case KernelTag::Continuous: return "K";
        case KernelTag::InterpolatedContinuous: return "Kprime";
        case KernelTag::Discrete: return "Kn";
        case KernelTag::InterpolatedDiscrete: return "Kcaret_n";
    }
    return "?";
}

KernelTag kernel_tag_from_string(const std::string& name) {
    if (name == "K") return KernelTag::Continuous;
    if (name == "Kprime") return KernelTag::InterpolatedContinuous;
    if (name == "Kn") return KernelTag::Discrete;
    if (name == "Kcaret_n") return KernelTag::InterpolatedDiscrete;
    throw std::invalid_argument("unknown kernel '" + name + "'");
}

int default_truncation(const GridSpec& spec) {
    return spec.dim() == 3 ? std::max(32, 2 * spec.n()) : std::max(64, 4 * spec.n());
}

int mode_count(const KernelKind& kind, const GridSpec& spec) {
    if (is_lattice_kind(kind.tag)) return spec.n() - 1;
    const int m = kind.truncation.value_or(default_truncation(spec));
    if (m < 1) throw std::invalid_argument("kernel truncation must be positive");
    return m;
}

double green_1d_closed_form(double x, double y) { return std::min(x, y) * (1.0 - std::max(x, y)); }

double eval_kernel(const KernelKind& kind, const GridSpec& spec, const Point& x, const Point& y) {
    const int d = spec.dim();
    check_point(x, d);
    check_point(y, d);
    if (uses_closed_form(kind, spec)) return closed_form_value(kind, spec, x[0], y[0]);

    const int modes = mode_count(kind, spec);
    const int n = spec.n();
    std::array<std::vector<double>, kMaxDim> axis;
    for (int j = 0; j < d; ++j) {
        auto& t = axis[static_cast<std::size_t>(j)];
        t.resize(static_cast<std::size_t>(modes));
        for (int a = 1; a <= modes; ++a) {
            t[static_cast<std::size_t>(a - 1)] = x_factor(kind.tag, a, x[j], n) * y_factor(kind.tag, a, y[j], n);
        }
    }
    const ModeWeights weights(kind.tag, spec, modes);
    const double pi2 = kPi * kPi;

    double sum = 0.0;
    const int m2 = d >= 2 ? modes : 1;
    const int m3 = d >= 3 ? modes : 1;
    for (int a3 = 1; a3 <= m3; ++a3) {
        const double f3 = d >= 3 ? axis[2][static_cast<std::size_t>(a3 - 1)] : 1.0;
        const double w3 = d >= 3 ? weights.axis_term(a3) : 0.0;
        for (int a2 = 1; a2 <= m2; ++a2) {
            const double f2 = d >= 2 ? axis[1][static_cast<std::size_t>(a2 - 1)] * f3 : f3;
            const double w2 = d >= 2 ? weights.axis_term(a2) + w3 : w3;
            for (int a1 = 1; a1 <= modes; ++a1) {
                sum += axis[0][static_cast<std::size_t>(a1 - 1)] * f2 / (pi2 * (weights.axis_term(a1) + w2));
            }
        }
    }
    return sum;
}

std::vector<double> kernel_slice(const KernelKind& kind, const GridSpec& spec, const Point& x, int quadrature_n) {
    const int d = spec.dim();
    check_point(x, d);
    if (quadrature_n < spec.n()) throw std::invalid_argument("quadrature resolution must be at least n");
    const auto q = static_cast<std::size_t>(quadrature_n);
    std::vector<double> mid(q);
    for (std::size_t i = 0; i < q; ++i) mid[i] = (static_cast<double>(i) + 0.5) / quadrature_n;

    if (uses_closed_form(kind, spec)) {
        std::vector<double> out(q);
        for (std::size_t i = 0; i < q; ++i) out[i] = closed_form_value(kind, spec, x[0], mid[i]);
        return out;
    }

    const int modes = mode_count(kind, spec);
    const auto m = static_cast<std::size_t>(modes);
    const int n = spec.n();
    const ModeWeights weights(kind.tag, spec, modes);
    const double pi2 = kPi * kPi;

    std::array<std::vector<double>, kMaxDim> xf;
    for (int j = 0; j < d; ++j) {
        auto& t = xf[static_cast<std::size_t>(j)];
        t.resize(m);
        for (int a = 1; a <= modes; ++a) t[static_cast<std::size_t>(a - 1)] = x_factor(kind.tag, a, x[j], n);
    }

    // Coefficient tensor c_alpha = w_alpha prod_j psi_{alpha_j}(x_j), first axis fastest.
    std::array<std::size_t, kMaxDim> dims{1, 1, 1};
    for (int j = 0; j < d; ++j) dims[static_cast<std::size_t>(j)] = m;
    std::vector<double> coef(dims[0] * dims[1] * dims[2]);
    for (std::size_t idx = 0; idx < coef.size(); ++idx) {
        std::size_t r = idx;
        double w = 0.0;
        double f = 1.0;
        for (int j = 0; j < d; ++j) {
            const auto a = static_cast<int>(r % m) + 1;
            r /= m;
            w += weights.axis_term(a);
            f *= xf[static_cast<std::size_t>(j)][static_cast<std::size_t>(a - 1)];
        }
        coef[idx] = f / (pi2 * w);
    }

    std::vector<double> table(m * q);
    for (int a = 1; a <= modes; ++a) {
        for (std::size_t i = 0; i < q; ++i) {
            table[static_cast<std::size_t>(a - 1) * q + i] = y_factor(kind.tag, a, mid[i], n);
        }
    }
    for (int j = 0; j < d; ++j) coef = contract_axis(coef, dims, j, table, q);
    return coef;
}

double kernel_l2_norm_sq(const KernelKind& kind, const GridSpec& spec, const Point& x, int quadrature_n) {
    const auto g = kernel_slice(kind, spec, x, quadrature_n);
    double s = 0.0;
    for (double v : g) s += v * v;
    return s / static_cast<double>(g.size());
}

double kernel_l2_difference(const KernelKind& a, const KernelKind& b, const GridSpec& spec, const Point& x,
                            int quadrature_n) {
    const auto ga = kernel_slice(a, spec, x, quadrature_n);
    const auto gb = kernel_slice(b, spec, x, quadrature_n);
    double s = 0.0;
    for (std::size_t i = 0; i < ga.size(); ++i) s += (ga[i] - gb[i]) * (ga[i] - gb[i]);
    return s / static_cast<double>(ga.size());
}

double kernel_l2_increment(const KernelKind& kind, const GridSpec& spec, const Point& x, const Point& z,
                           int quadrature_n) {
    const auto gx = kernel_slice(kind, spec, x, quadrature_n);
    const auto gz = kernel_slice(kind, spec, z, quadrature_n);
    double s = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) s += (gx[i] - gz[i]) * (gx[i] - gz[i]);
    return s / static_cast<double>(gx.size());
}

HolderEstimate holder_estimate(int dim, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    switch (dim) {
        case 1: return {1, epsilon, 0.5, 1.0 - epsilon};
        case 2:
            if (epsilon >= 0.5) throw std::invalid_argument("epsilon must be below 1/2 in d = 2");
            return {2, epsilon, 0.5 - epsilon, 0.5 - epsilon};
        case 3:
            if (epsilon >= 0.2) throw std::invalid_argument("epsilon must be below 1/5 in d = 3");
            return {3, epsilon, 0.25 - epsilon, 0.2 - epsilon};
        default: throw std::invalid_argument("dimension must be 1, 2 or 3");
    }
}

}  // namespace rspde
