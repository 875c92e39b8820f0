#include "hypofp/quadrature.hpp"

#include "hypofp/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iterator>
#include <random>

namespace hypofp {

namespace {

// Orthonormal Hermite recurrence (normal weight): returns p_n(x), p_{n-1}(x).
std::pair<double, double> hermite_pair(int n, double x) {
    double p_prev = 0.0;
    double p = 1.0;
    for (int k = 1; k <= n; ++k) {
        const double next = (x * p - std::sqrt(k - 1.0) * p_prev) / std::sqrt(static_cast<double>(k));
        p_prev = p;
        p = next;
    }
    return {p, p_prev};
}

std::pair<double, double> legendre_pair(int n, double x) {
    double p_prev = 0.0;
    double p = 1.0;
    for (int k = 1; k <= n; ++k) {
        const double next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        p_prev = p;
        p = next;
    }
    return {p, p_prev};
}

Eigen::VectorXd jacobi_nodes(const Eigen::VectorXd& diag, const Eigen::VectorXd& off) {
    const Eigen::Index n = diag.size();
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    j.diagonal() = diag;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        j(i, i + 1) = off(i);
        j(i + 1, i) = off(i);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

}  // namespace

Rule1D gauss_hermite_normal(int order) {
    if (order < 1) throw DomainError("gauss_hermite_normal: order must be positive");
    Eigen::VectorXd off(std::max(order - 1, 0));
    for (int i = 0; i + 1 < order; ++i) off(i) = std::sqrt(i + 1.0);
    Eigen::VectorXd x = jacobi_nodes(Eigen::VectorXd::Zero(order), off);
    Rule1D rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        double xi = x(i);
        for (int it = 0; it < 3; ++it) {
            // p_n' = sqrt(n) p_{n-1} for the orthonormal family
            auto [p, pm] = hermite_pair(order, xi);
            const double dp = std::sqrt(static_cast<double>(order)) * pm;
            if (dp == 0.0) break;
            xi -= p / dp;
        }
        // Christoffel weight 1 / sum_{k<n} p_k(x)^2
        double s = 0.0;
        double p_prev = 0.0;
        double p = 1.0;
        for (int k = 0; k < order; ++k) {
            s += p * p;
            const double next = (xi * p - std::sqrt(static_cast<double>(k)) * p_prev) / std::sqrt(k + 1.0);
            p_prev = p;
            p = next;
        }
        rule.nodes[i] = xi;
        rule.weights[i] = 1.0 / s;
    }
    // enforce exact symmetry
    for (int i = 0; i < order / 2; ++i) {
        const int j = order - 1 - i;
        const double xn = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        const double wn = 0.5 * (rule.weights[i] + rule.weights[j]);
        rule.nodes[i] = -xn;
        rule.nodes[j] = xn;
        rule.weights[i] = wn;
        rule.weights[j] = wn;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

Rule1D gauss_legendre(int order, double a, double b) {
    if (order < 1) throw DomainError("gauss_legendre: order must be positive");
    Eigen::VectorXd off(std::max(order - 1, 0));
    for (int i = 0; i + 1 < order; ++i) {
        const double k = i + 1.0;
        off(i) = k / std::sqrt(4.0 * k * k - 1.0);
    }
    Eigen::VectorXd x = jacobi_nodes(Eigen::VectorXd::Zero(order), off);
    Rule1D rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (int i = 0; i < order; ++i) {
        double xi = x(i);
        double dp = 1.0;
        for (int it = 0; it < 4; ++it) {
            auto [p, pm] = legendre_pair(order, xi);
            dp = order * (xi * p - pm) / (xi * xi - 1.0);
            xi -= p / dp;
        }
        auto [p, pm] = legendre_pair(order, xi);
        dp = order * (xi * p - pm) / (xi * xi - 1.0);
        rule.nodes[i] = mid + half * xi;
        rule.weights[i] = half * 2.0 / ((1.0 - xi * xi) * dp * dp);
    }
    return rule;
}

std::vector<std::vector<double>> shifted_halton(int dim, int count, std::uint64_t seed) {
    static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                                 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};
    if (dim < 1 || dim > static_cast<int>(std::size(primes))) {
        throw DomainError("shifted_halton: unsupported dimension");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> shift(dim);
    for (auto& s : shift) s = unif(rng);
    std::vector<std::vector<double>> pts(count, std::vector<double>(dim));
    for (int i = 0; i < count; ++i) {
        for (int k = 0; k < dim; ++k) {
            const int base = primes[k];
            double f = 1.0;
            double r = 0.0;
            long idx = i + 1;
            while (idx > 0) {
                f /= base;
                r += f * static_cast<double>(idx % base);
                idx /= base;
            }
            double u = r + shift[k];
            u -= std::floor(u);
            pts[i][k] = std::clamp(u, 1e-300, 1.0 - 1e-16);
        }
    }
    return pts;
}

double pairwise_sum(const double* data, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

}  // namespace hypofp
