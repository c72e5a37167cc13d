#include "treebo/blackbox.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace treebo {

namespace {

double sphere(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double rosenbrock(std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = x[i] - 1.0;
        s += 100.0 * a * a + b * b;
    }
    return s;
}

double rastrigin(std::span<const double> x) {
    double s = 10.0 * static_cast<double>(x.size());
    for (double v : x) s += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
    return s;
}

double styblinski_tang(std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v * v * v - 16.0 * v * v + 5.0 * v;
    return 0.5 * s;
}

double ackley(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    double sq = 0.0;
    double cs = 0.0;
    for (double v : x) {
        sq += v * v;
        cs += std::cos(2.0 * std::numbers::pi * v);
    }
    return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 +
           std::numbers::e;
}

// Per-dimension Styblinski-Tang minimizer; the root of 2 t^3 - 16 t + 2.5.
constexpr double kStyblinskiArg = -2.903534018185960;

}  // namespace

std::vector<std::string> benchmark_names() {
    return {"rosenbrock", "rastrigin", "sphere", "styblinski_tang", "ackley"};
}

Benchmark make_benchmark(const std::string& name, int dim) {
    if (dim < 1) throw std::invalid_argument("benchmark dimension must be >= 1");
    Benchmark b;
    b.name = name;
    b.dimension = dim;
    if (name == "sphere") {
        b.lower.assign(dim, -5.12);
        b.upper.assign(dim, 5.12);
        b.evaluate = sphere;
        b.known_optimum = 0.0;
        b.known_minimizer.assign(dim, 0.0);
    } else if (name == "rosenbrock") {
        if (dim < 2) throw std::invalid_argument("rosenbrock needs dim >= 2");
        b.lower.assign(dim, -2.048);
        b.upper.assign(dim, 2.048);
        b.evaluate = rosenbrock;
        b.known_optimum = 0.0;
        b.known_minimizer.assign(dim, 1.0);
    } else if (name == "rastrigin") {
        b.lower.assign(dim, -5.12);
        b.upper.assign(dim, 5.12);
        b.evaluate = rastrigin;
        b.known_optimum = 0.0;
        b.known_minimizer.assign(dim, 0.0);
    } else if (name == "styblinski_tang") {
        b.lower.assign(dim, -5.0);
        b.upper.assign(dim, 5.0);
        b.evaluate = styblinski_tang;
        b.known_minimizer.assign(dim, kStyblinskiArg);
        b.known_optimum = styblinski_tang(b.known_minimizer);
    } else if (name == "ackley") {
        b.lower.assign(dim, -5.0);
        b.upper.assign(dim, 10.0);
        b.evaluate = ackley;
        b.known_optimum = 0.0;
        b.known_minimizer.assign(dim, 0.0);
    } else {
        throw std::invalid_argument("unknown benchmark '" + name + "'");
    }
    return b;
}

}  // namespace treebo
