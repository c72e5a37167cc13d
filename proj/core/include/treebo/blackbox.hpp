#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace treebo {

/// A synthetic black-box objective with its standard box domain.
struct Benchmark {
    std::string name;
    int dimension = 0;
    std::vector<double> lower;
    std::vector<double> upper;
    std::function<double(std::span<const double>)> evaluate;
    std::optional<double> known_optimum;           // for reporting only
    std::vector<double> known_minimizer;           // empty when not applicable
};

/// Registered names: rosenbrock, rastrigin, sphere, styblinski_tang, ackley.
std::vector<std::string> benchmark_names();

/// Standard textbook form of the named function on its usual domain
/// (rosenbrock [-2.048, 2.048], rastrigin/sphere [-5.12, 5.12],
/// styblinski_tang [-5, 5], ackley [-5, 10]). rosenbrock needs dim >= 2.
Benchmark make_benchmark(const std::string& name, int dim);

}  // namespace treebo
