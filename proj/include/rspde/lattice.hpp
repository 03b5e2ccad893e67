#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace rspde {

inline constexpr int kMaxDim = 3;

/// Lattice multi-index (i_1, ..., i_d); unused trailing components are ignored.
using MultiIndex = std::array<int, kMaxDim>;

/// Point of [0,1]^d; unused trailing components are ignored.
using Point = std::array<double, kMaxDim>;

/**
 * Uniform lattice on the unit cube (0,1)^d with mesh width h = 1/n.
 *
 * Interior points are i/n with every i_j in {1,...,n-1}. Coordinates are
 * always formed as double(i)/n so that lattice points compare exactly.
 */
class GridSpec {
public:
    GridSpec(int dim, int n);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double h() const { return 1.0 / static_cast<double>(n_); }

    /// (n-1)^d
    std::size_t interior_count() const { return interior_count_; }
    /// n^d, the number of cells [i h, (i+1) h)^d
    std::size_t cell_count() const { return cell_count_; }

    double coord(int i) const { return static_cast<double>(i) / static_cast<double>(n_); }

    /// Lattice point x_k of the natural ordering (storage index k-1).
    Point point(std::size_t storage_index) const;

    bool operator==(const GridSpec& other) const = default;

private:
    int dim_;
    int n_;
    std::size_t interior_count_;
    std::size_t cell_count_;
};

/// k = i_1 + (n-1)(i_2-1) + ... + (n-1)^{d-1}(i_d-1), 1-based.
std::size_t natural_rank(const MultiIndex& i, const GridSpec& spec);

/// Inverse of natural_rank; k is 1-based.
MultiIndex unrank(std::size_t k, const GridSpec& spec);

/// Zero-based position of the multi-index in a GridField.
inline std::size_t storage_index(const MultiIndex& i, const GridSpec& spec) {
    return natural_rank(i, spec) - 1;
}

/**
 * Values on the interior lattice in natural-ordering layout.
 *
 * Dirichlet boundary values are implicitly zero and never stored.
 */
class GridField {
public:
    explicit GridField(GridSpec spec);
    GridField(GridSpec spec, std::vector<double> values);

    const GridSpec& spec() const { return spec_; }
    std::size_t size() const { return values_.size(); }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    double operator[](std::size_t k) const { return values_[k]; }
    double& operator[](std::size_t k) { return values_[k]; }

    double at(const MultiIndex& i) const { return values_[storage_index(i, spec_)]; }

    /// Value at a closed-lattice index with components in {0,...,n}; zero on the boundary.
    double at_closed(const MultiIndex& i) const;

    double sup_norm() const;

private:
    GridSpec spec_;
    std::vector<double> values_;
};

GridField operator+(const GridField& a, const GridField& b);
GridField operator-(const GridField& a, const GridField& b);
GridField operator*(double s, const GridField& a);

double dot(const GridField& a, const GridField& b);
double sup_distance(const GridField& a, const GridField& b);

/// Delta_n f with zero extension outside D_n, i.e. n^2 A^n f.
GridField apply_discrete_laplacian(const GridField& f);

/// B f = -n^2 A^n f.
GridField apply_b(const GridField& f);

/// c_j^n = sin^2(j pi / 2n) (j pi / 2n)^{-2}
double eigen_factor(int j, int n);

/**
 * Exact eigen-decomposition of B = -n^2 A^n.
 *
 * The modes are b_alpha = n^{-d/2} (phi_alpha(x))_{x in D_n} with
 * phi_alpha(x) = prod_j sqrt(2) sin(alpha_j pi x_j), alpha in I_n^d, and
 * B b_alpha = lambda_alpha b_alpha. The frequency multi-index alpha reuses
 * the natural ordering.
 */
class EigenBasis {
public:
    explicit EigenBasis(GridSpec spec);

    const GridSpec& spec() const { return spec_; }

    double factor(int j) const { return factors_.at(static_cast<std::size_t>(j - 1)); }
    double eigenvalue(const MultiIndex& alpha) const;
    /// Eigenvalues indexed by the natural rank of alpha (minus one).
    std::span<const double> eigenvalues() const { return eigenvalues_; }

    GridField mode(const MultiIndex& alpha) const;

    /// <x, b_alpha> for every alpha, in natural ordering.
    GridField coefficients(const GridField& x) const;
    /// sum_alpha c_alpha b_alpha
    GridField synthesize(const GridField& coefficients) const;

private:
    GridSpec spec_;
    std::vector<double> factors_;
    std::vector<double> eigenvalues_;
    std::vector<double> sine_table_;  // sqrt(2/n) sin(j k pi / n), (n-1)x(n-1)

    void transform(std::span<double> data) const;
};

/// Solves B u = rhs spectrally.
GridField solve_poisson(const GridField& rhs);
GridField solve_poisson(const GridField& rhs, const EigenBasis& basis);

/// k_n(t) = j/n for t in [j/n, (j+1)/n).
double floor_coord(double t, int n);
/// Integer j with t in [j/n, (j+1)/n).
int floor_index(double t, int n);

/// Componentwise floor to the lattice: x -> (k_n(x_1), ..., k_n(x_d)).
Point floor_map(const Point& x, const GridSpec& spec);

/**
 * Successive linear interpolation in x_1, ..., x_d of the lattice values,
 * with zero corner values on the boundary.
 */
double multilinear_extend(const GridField& f, const Point& x);

/// Continuous field obtained by multilinear extension of a GridField.
class ContinuousField {
public:
    explicit ContinuousField(GridField values) : values_(std::move(values)) {}
    double operator()(const Point& x) const { return multilinear_extend(values_, x); }
    const GridField& lattice_values() const { return values_; }

private:
    GridField values_;
};

}  // namespace rspde
