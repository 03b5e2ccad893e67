#pragma once

#include <map>
#include <string>
#include <vector>

#include "rspde/obstacle.hpp"
#include "rspde/spde.hpp"

namespace rspde {

/// "NAME" or "NAME:key=value,key=value".
struct NamedSpec {
    std::string name;
    std::map<std::string, double> params;

    double param(const std::string& key, double fallback) const;
};

NamedSpec parse_named_spec(const std::string& text);

/**
 * Analytic barriers v on [0,1]^d, all vanishing on the boundary:
 *   zero                    v = 0
 *   sine:amp=1              v = -amp prod_j sin(pi x_j)
 *   positive-sine:amp=1     v =  amp prod_j sin(pi x_j)
 *   double-sine:amp=1       v = -amp prod_j sin(2 pi x_j)
 *   mixed:a=1,b=0.5         v = -a prod_j sin(pi x_j) + b prod_j sin(3 pi x_j)
 *   tent:amp=1              v = -amp prod_j (1 - |2 x_j - 1|)      (continuous, not C^2)
 */
ScalarFunction make_barrier(const std::string& text, int dim);
std::vector<std::string> barrier_names();

struct NamedCoefficient {
    Coefficient fn;
    double lipschitz = 0.0;
    double at_origin = 0.0;
    bool monotone = true;
};

/**
 * Coefficients c(x, u):
 *   zero                 0
 *   const:c=1            c
 *   linear:a=0,b=0       a u + b
 *   sine:a=1,b=0         a sin(u) + b
 *   spatial:c=1,a=0      c prod_j sin(pi x_j) + a u
 */
NamedCoefficient make_coefficient(const std::string& text, int dim);
std::vector<std::string> coefficient_names();

/// Pair with L1 = L1(f) + L1(sigma) and L2 = |f(0,0)| + |sigma(0,0)|.
CoefficientPair make_coefficients(const std::string& f, const std::string& sigma, int dim);

}  // namespace rspde
