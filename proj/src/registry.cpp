#include "rspde/registry.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rspde {

namespace {

constexpr double kPi = std::numbers::pi;

double sine_product(const Point& x, int dim, double freq) {
    double p = 1.0;
    for (int j = 0; j < dim; ++j) p *= std::sin(freq * kPi * x[j]);
    return p;
}

}  // namespace

double NamedSpec::param(const std::string& key, double fallback) const {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

NamedSpec parse_named_spec(const std::string& text) {
    NamedSpec spec;
    const auto colon = text.find(':');
    spec.name = text.substr(0, colon);
    if (spec.name.empty()) throw std::invalid_argument("empty function name in '" + text + "'");
    if (colon == std::string::npos) return spec;

    std::stringstream rest(text.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw std::invalid_argument("malformed parameter '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        std::size_t used = 0;
        double parsed = 0.0;
        try {
            parsed = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value.size() || value.empty()) {
            throw std::invalid_argument("parameter '" + key + "' is not a number: '" + value + "'");
        }
        spec.params[key] = parsed;
    }
    return spec;
}

ScalarFunction make_barrier(const std::string& text, int dim) {
    const NamedSpec s = parse_named_spec(text);
    if (s.name == "zero") return [](const Point&) { return 0.0; };
    if (s.name == "sine") {
        const double amp = s.param("amp", 1.0);
        return [amp, dim](const Point& x) { return -amp * sine_product(x, dim, 1.0); };
    }
    if (s.name == "positive-sine") {
        const double amp = s.param("amp", 1.0);
        return [amp, dim](const Point& x) { return amp * sine_product(x, dim, 1.0); };
    }
    if (s.name == "double-sine") {
        const double amp = s.param("amp", 1.0);
        return [amp, dim](const Point& x) { return -amp * sine_product(x, dim, 2.0); };
    }
    if (s.name == "mixed") {
        const double a = s.param("a", 1.0);
        const double b = s.param("b", 0.5);
        return [a, b, dim](const Point& x) { return -a * sine_product(x, dim, 1.0) + b * sine_product(x, dim, 3.0); };
    }
    if (s.name == "tent") {
        const double amp = s.param("amp", 1.0);
        return [amp, dim](const Point& x) {
            double p = 1.0;
            for (int j = 0; j < dim; ++j) p *= 1.0 - std::abs(2.0 * x[j] - 1.0);
            return -amp * p;
        };
    }
    throw std::invalid_argument("unknown barrier '" + s.name + "'");
}

std::vector<std::string> barrier_names() { return {"zero", "sine", "positive-sine", "double-sine", "mixed", "tent"}; }

NamedCoefficient make_coefficient(const std::string& text, int dim) {
    const NamedSpec s = parse_named_spec(text);
    if (s.name == "zero") return {[](const Point&, double) { return 0.0; }, 0.0, 0.0, true};
    if (s.name == "const") {
        const double c = s.param("c", 1.0);
        return {[c](const Point&, double) { return c; }, 0.0, std::abs(c), true};
    }
    if (s.name == "linear") {
        const double a = s.param("a", 0.0);
        const double b = s.param("b", 0.0);
        return {[a, b](const Point&, double u) { return a * u + b; }, std::abs(a), std::abs(b), a >= 0.0};
    }
    if (s.name == "sine") {
        const double a = s.param("a", 1.0);
        const double b = s.param("b", 0.0);
        return {[a, b](const Point&, double u) { return a * std::sin(u) + b; }, std::abs(a), std::abs(b), a == 0.0};
    }
    if (s.name == "spatial") {
        const double c = s.param("c", 1.0);
        const double a = s.param("a", 0.0);
        // |grad_x| <= |c| pi sqrt(d)
        const double lx = std::abs(c) * kPi * std::sqrt(static_cast<double>(dim));
        return {[c, a, dim](const Point& x, double u) { return c * sine_product(x, dim, 1.0) + a * u; },
                std::max(lx, std::abs(a)), 0.0, a >= 0.0};
    }
    throw std::invalid_argument("unknown coefficient '" + s.name + "'");
}

std::vector<std::string> coefficient_names() { return {"zero", "const", "linear", "sine", "spatial"}; }

CoefficientPair make_coefficients(const std::string& f, const std::string& sigma, int dim) {
    NamedCoefficient nf = make_coefficient(f, dim);
    NamedCoefficient ns = make_coefficient(sigma, dim);
    CoefficientPair pair;
    pair.f = std::move(nf.fn);
    pair.sigma = std::move(ns.fn);
    pair.lipschitz = nf.lipschitz + ns.lipschitz;
    pair.bound_at_origin = nf.at_origin + ns.at_origin;
    pair.monotone_f = nf.monotone;
    pair.f_name = f;
    pair.sigma_name = sigma;
    return pair;
}

}  // namespace rspde
