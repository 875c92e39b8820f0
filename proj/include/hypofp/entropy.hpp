#pragma once

#include "hypofp/linalg.hpp"
#include "hypofp/system.hpp"

#include <cstdint>
#include <vector>

namespace hypofp {

enum class EntropyKind { Logarithmic, Quadratic, Power };

// Admissible generator psi with psi(1) = psi'(1) = 0.
struct EntropyGenerator {
    EntropyKind kind = EntropyKind::Logarithmic;
    double alpha = 1.0;
    double beta = 0.0;
    double p = 1.5;

    static EntropyGenerator logarithmic(double alpha = 1.0, double beta = 0.0);
    static EntropyGenerator quadratic(double alpha = 1.0);
    static EntropyGenerator power(double p, double alpha = 1.0, double beta = 0.0);

    // Lower end of the domain (-beta), -inf for the quadratic generator.
    double domain_min() const;
    bool allows_signed() const { return kind == EntropyKind::Quadratic; }
    void validate() const;
};

// psi^{(order)}(s) for order 0..4.
double psi_derivative(const EntropyGenerator& g, double s, int order);
inline double psi(const EntropyGenerator& g, double s) { return psi_derivative(g, s, 0); }

// w(r) = int_1^r sqrt(psi''(s)) ds.
double w_transform(const EntropyGenerator& g, double r);

// (psi''')^2 <= psi'' psi'''' / 2 at s.
bool admissible_at(const EntropyGenerator& g, double s);

// Gaussian component, optionally carrying a factor 1 + a^T (x - mean).
struct GaussianComponent {
    double weight = 1.0;
    Vec mean;
    Mat cov;
    Vec affine;  // empty: no factor
};

struct GaussianMixture {
    std::vector<GaussianComponent> components;

    int dim() const;
    bool is_signed() const;
    // Throws DomainError on shape, SPD or mass violations.
    void validate() const;
    double density(const Vec& x) const;

    static GaussianMixture gaussian(const Vec& mean, const Mat& cov);
    // (1 + x^T K^{-1} v) f_inf
    static GaussianMixture linear_perturbation(const Mat& K, const Vec& v);
};

struct QuadratureRule {
    std::vector<Vec> nodes;        // physical coordinates
    std::vector<double> weights;   // with respect to f_inf, sum to 1 per replica
    int replicas = 1;              // QMC: nodes split into equal replicas
    bool tensor = true;

    std::size_t size() const { return nodes.size(); }
};

inline constexpr int kDefaultQuadratureOrder = 64;
inline constexpr int kQmcPoints = 16384;
inline constexpr int kQmcReplicas = 8;
inline constexpr std::uint64_t kQmcSeed = 0x5eed5eedULL;

// Tensor Gauss-Hermite in x = sqrt(K) y for d <= 3, randomized QMC otherwise.
QuadratureRule make_quadrature(const Mat& K, int order = kDefaultQuadratureOrder);

struct Functionals {
    double e = 0.0;
    double I = 0.0;
    double S = 0.0;
    // standard errors (zero for tensor rules)
    double e_se = 0.0;
    double I_se = 0.0;
    double S_se = 0.0;
};

// e, I and S in one pass over the rule. Pass an empty P to skip S.
Functionals evaluate_functionals(const GaussianMixture& f, const SteadyState& ss, const EntropyGenerator& g,
                                 const QuadratureRule& q, const Mat& D, const Mat& P);

double relative_entropy(const GaussianMixture& f, const SteadyState& ss, const EntropyGenerator& g,
                        const QuadratureRule& q);
double fisher_information(const GaussianMixture& f, const SteadyState& ss, const EntropyGenerator& g,
                          const QuadratureRule& q, const Mat& D);
double modified_fisher(const GaussianMixture& f, const SteadyState& ss, const EntropyGenerator& g,
                       const QuadratureRule& q, const Mat& P);

}  // namespace hypofp
