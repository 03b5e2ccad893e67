#include "rspde/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace rspde {

namespace {

std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int e = 0; e < exp; ++e) r *= base;
    return r;
}

void require_same_spec(const GridField& a, const GridField& b) {
    if (!(a.spec() == b.spec())) throw std::invalid_argument("grid fields live on different lattices");
}

}  // namespace

GridSpec::GridSpec(int dim, int n) : dim_(dim), n_(n) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must be 1, 2 or 3");
    if (n < 2) throw std::invalid_argument("resolution n must be at least 2");
    interior_count_ = ipow(static_cast<std::size_t>(n - 1), dim);
    cell_count_ = ipow(static_cast<std::size_t>(n), dim);
}

Point GridSpec::point(std::size_t storage_index) const {
    const MultiIndex i = unrank(storage_index + 1, *this);
    Point x{0.0, 0.0, 0.0};
    for (int j = 0; j < dim_; ++j) x[j] = coord(i[j]);
    return x;
}

std::size_t natural_rank(const MultiIndex& i, const GridSpec& spec) {
    const std::size_t m = static_cast<std::size_t>(spec.n() - 1);
    std::size_t k = 0;
    std::size_t stride = 1;
    for (int j = 0; j < spec.dim(); ++j) {
        if (i[j] < 1 || i[j] > spec.n() - 1) {
            throw std::domain_error("multi-index component " + std::to_string(i[j]) + " outside {1,...," +
                                    std::to_string(spec.n() - 1) + "}");
        }
        k += stride * static_cast<std::size_t>(i[j] - 1);
        stride *= m;
    }
    return k + 1;
}

MultiIndex unrank(std::size_t k, const GridSpec& spec) {
    if (k < 1 || k > spec.interior_count()) throw std::domain_error("rank outside {1,...,(n-1)^d}");
    const std::size_t m = static_cast<std::size_t>(spec.n() - 1);
    MultiIndex i{1, 1, 1};
    std::size_t r = k - 1;
    for (int j = 0; j < spec.dim(); ++j) {
        i[j] = static_cast<int>(r % m) + 1;
        r /= m;
    }
    return i;
}

GridField::GridField(GridSpec spec) : spec_(spec), values_(spec.interior_count(), 0.0) {}

GridField::GridField(GridSpec spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
    if (values_.size() != spec_.interior_count()) {
        throw std::invalid_argument("grid field needs " + std::to_string(spec_.interior_count()) + " values, got " +
                                    std::to_string(values_.size()));
    }
}

double GridField::at_closed(const MultiIndex& i) const {
    for (int j = 0; j < spec_.dim(); ++j) {
        if (i[j] <= 0 || i[j] >= spec_.n()) return 0.0;
    }
    return at(i);
}

double GridField::sup_norm() const {
    double s = 0.0;
    for (double v : values_) s = std::max(s, std::abs(v));
    return s;
}

GridField operator+(const GridField& a, const GridField& b) {
    require_same_spec(a, b);
    GridField r(a.spec());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] + b[k];
    return r;
}

GridField operator-(const GridField& a, const GridField& b) {
    require_same_spec(a, b);
    GridField r(a.spec());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] - b[k];
    return r;
}

GridField operator*(double s, const GridField& a) {
    GridField r(a.spec());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = s * a[k];
    return r;
}

double dot(const GridField& a, const GridField& b) {
    require_same_spec(a, b);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

double sup_distance(const GridField& a, const GridField& b) {
    require_same_spec(a, b);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a[k] - b[k]));
    return s;
}

GridField apply_discrete_laplacian(const GridField& f) {
    const GridSpec& spec = f.spec();
    const int m = spec.n() - 1;
    const double n2 = static_cast<double>(spec.n()) * spec.n();
    GridField out(spec);
    const auto in = f.values();
    auto res = out.values();

    std::size_t stride = 1;
    for (int axis = 0; axis < spec.dim(); ++axis) {
        for (std::size_t k = 0; k < in.size(); ++k) {
            const int pos = static_cast<int>((k / stride) % static_cast<std::size_t>(m));
            const double left = pos > 0 ? in[k - stride] : 0.0;
            const double right = pos < m - 1 ? in[k + stride] : 0.0;
            res[k] += n2 * (left - 2.0 * in[k] + right);
        }
        stride *= static_cast<std::size_t>(m);
    }
    return out;
}

GridField apply_b(const GridField& f) {
    GridField out = apply_discrete_laplacian(f);
    for (double& v : out.values()) v = -v;
    return out;
}

double eigen_factor(int j, int n) {
    const double t = j * std::numbers::pi / (2.0 * n);
    const double s = std::sin(t);
    return s * s / (t * t);
}

EigenBasis::EigenBasis(GridSpec spec) : spec_(spec) {
    const int n = spec.n();
    const int m = n - 1;
    factors_.resize(static_cast<std::size_t>(m));
    for (int j = 1; j <= m; ++j) factors_[static_cast<std::size_t>(j - 1)] = eigen_factor(j, n);

    eigenvalues_.resize(spec.interior_count());
    for (std::size_t k = 0; k < eigenvalues_.size(); ++k) eigenvalues_[k] = eigenvalue(unrank(k + 1, spec));

    const double scale = std::sqrt(2.0 / n);
    sine_table_.resize(static_cast<std::size_t>(m) * m);
    for (int a = 1; a <= m; ++a) {
        for (int i = 1; i <= m; ++i) {
            sine_table_[static_cast<std::size_t>((a - 1) * m + (i - 1))] =
                scale * std::sin(static_cast<double>(a) * i * std::numbers::pi / n);
        }
    }
}

double EigenBasis::eigenvalue(const MultiIndex& alpha) const {
    double s = 0.0;
    for (int j = 0; j < spec_.dim(); ++j) {
        const double a = alpha[j];
        s += a * a * factor(alpha[j]);
    }
    return std::numbers::pi * std::numbers::pi * s;
}

GridField EigenBasis::mode(const MultiIndex& alpha) const {
    const int m = spec_.n() - 1;
    natural_rank(alpha, spec_);  // range check
    GridField b(spec_);
    for (std::size_t k = 0; k < b.size(); ++k) {
        const MultiIndex i = unrank(k + 1, spec_);
        double v = 1.0;
        for (int j = 0; j < spec_.dim(); ++j) {
            v *= sine_table_[static_cast<std::size_t>((alpha[j] - 1) * m + (i[j] - 1))];
        }
        b[k] = v;
    }
    return b;
}

// Separable orthonormal sine transform; S is symmetric and S*S = I.
void EigenBasis::transform(std::span<double> data) const {
    const std::size_t m = static_cast<std::size_t>(spec_.n() - 1);
    std::vector<double> line(m);
    std::vector<double> out(m);
    std::size_t stride = 1;
    for (int axis = 0; axis < spec_.dim(); ++axis) {
        const std::size_t block = stride * m;
        for (std::size_t base = 0; base < data.size(); base += block) {
            for (std::size_t off = 0; off < stride; ++off) {
                for (std::size_t i = 0; i < m; ++i) line[i] = data[base + off + i * stride];
                for (std::size_t a = 0; a < m; ++a) {
                    const double* row = &sine_table_[a * m];
                    double s = 0.0;
                    for (std::size_t i = 0; i < m; ++i) s += row[i] * line[i];
                    out[a] = s;
                }
                for (std::size_t a = 0; a < m; ++a) data[base + off + a * stride] = out[a];
            }
        }
        stride *= m;
    }
}

GridField EigenBasis::coefficients(const GridField& x) const {
    if (!(x.spec() == spec_)) throw std::invalid_argument("field and eigenbasis live on different lattices");
    GridField c = x;
    transform(c.values());
    return c;
}

GridField EigenBasis::synthesize(const GridField& coefficients) const {
    if (!(coefficients.spec() == spec_)) throw std::invalid_argument("coefficients live on a different lattice");
    GridField x = coefficients;
    transform(x.values());
    return x;
}

GridField solve_poisson(const GridField& rhs) { return solve_poisson(rhs, EigenBasis(rhs.spec())); }

GridField solve_poisson(const GridField& rhs, const EigenBasis& basis) {
    GridField c = basis.coefficients(rhs);
    const auto lambda = basis.eigenvalues();
    for (std::size_t k = 0; k < c.size(); ++k) c[k] /= lambda[k];
    return basis.synthesize(c);
}

int floor_index(double t, int n) {
    auto j = static_cast<int>(std::floor(t * n));
    const auto node = [n](int i) { return static_cast<double>(i) / static_cast<double>(n); };
    while (node(j + 1) <= t) ++j;
    while (node(j) > t) --j;
    return j;
}

double floor_coord(double t, int n) { return static_cast<double>(floor_index(t, n)) / static_cast<double>(n); }

Point floor_map(const Point& x, const GridSpec& spec) {
    Point r{0.0, 0.0, 0.0};
    for (int j = 0; j < spec.dim(); ++j) r[j] = floor_coord(x[j], spec.n());
    return r;
}

double multilinear_extend(const GridField& f, const Point& x) {
    const GridSpec& spec = f.spec();
    const int d = spec.dim();
    const int n = spec.n();
    MultiIndex cell{0, 0, 0};
    std::array<double, kMaxDim> t{0.0, 0.0, 0.0};
    for (int j = 0; j < d; ++j) {
        if (!(x[j] >= 0.0 && x[j] <= 1.0)) throw std::domain_error("interpolation point outside [0,1]^d");
        cell[j] = std::min(floor_index(x[j], n), n - 1);
        t[j] = (x[j] - spec.coord(cell[j])) * n;
    }

    // Corner values, bit j of c selects the upper corner along axis j.
    const int corners = 1 << d;
    std::array<double, 1 << kMaxDim> v{};
    for (int c = 0; c < corners; ++c) {
        MultiIndex i{0, 0, 0};
        for (int j = 0; j < d; ++j) i[j] = cell[j] + ((c >> j) & 1);
        v[static_cast<std::size_t>(c)] = f.at_closed(i);
    }
    // Interpolate along x_1 first, then x_2, then x_3.
    int width = corners;
    for (int j = 0; j < d; ++j) {
        width /= 2;
        for (int c = 0; c < width; ++c) {
            const double lo = v[static_cast<std::size_t>(2 * c)];
            const double hi = v[static_cast<std::size_t>(2 * c + 1)];
            v[static_cast<std::size_t>(c)] = lo + t[j] * (hi - lo);
        }
    }
    return v[0];
}

}  // namespace rspde
