#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace hypofp {

struct Rule1D {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Hermite rule for the standard normal density (weights sum to 1).
Rule1D gauss_hermite_normal(int order);

// Gauss-Legendre rule on [a, b].
Rule1D gauss_legendre(int order, double a = -1.0, double b = 1.0);

// Randomly shifted Halton points in (0,1)^dim, `count` points per replica.
std::vector<std::vector<double>> shifted_halton(int dim, int count, std::uint64_t seed);

// Sum with pairwise (cascade) summation.
double pairwise_sum(const double* data, std::size_t n);
inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

}  // namespace hypofp
