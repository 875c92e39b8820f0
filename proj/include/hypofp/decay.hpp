#pragma once

#include "hypofp/linalg.hpp"
#include "hypofp/system.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace hypofp {

enum class PConstruction { EigenSum, Jordan, Supplied };

struct TransportMatrix {
    Mat P;
    double mu = 0.0;
    double kappa = 0.0;     // mu, or mu - epsilon in the defective case
    double epsilon = 0.0;
    std::vector<double> weights;  // one per Jordan chain of Q
    PConstruction construction = PConstruction::EigenSum;
};

struct Envelope {
    double amplitude = 0.0;
    double rate = 0.0;
    double operator()(double t) const;
};

struct DecayCertificate {
    double mu = 0.0;
    double epsilon = 0.0;
    double lambda_P = 0.0;
    double margin = 0.0;
    std::optional<double> lambda_K;
    std::optional<double> cond_sq_bound;
    std::optional<Envelope> envelope;
};

struct RegularisedConstant {
    double c_delta = 0.0;
    double delta = 0.0;
};

inline constexpr double kDefaultEpsilonFraction = 1e-2;
inline constexpr double kMarginTolerance = 1e-8;

// Chain weights default to 1; conjugate chains must carry equal weights.
TransportMatrix build_P(const SteadyState& ss, const EigenStructure& eig_q, double epsilon,
                        const std::vector<double>& weights = {});

// Picks epsilon = 1e-2 mu when the minimal eigenvalues of Q are defective.
TransportMatrix build_P(const SteadyState& ss, double cluster_tol = kDefectTolerance);

// min eigenvalue of Q P + P Q^T - 2 kappa P.
double verify_P(const SteadyState& ss, const Mat& P, double kappa);
bool margin_ok(double margin, const Mat& P);

double lambda_P(const Mat& K, const Mat& P);
double lambda_K(const Mat& D, const Mat& K);

// lambda_K <= mu <= cond(A)^2 lambda_K, A the eigenvector matrix of
// D^{-1/2} C D^{1/2}. Throws CertificateError if either side fails.
DecayCertificate compare_rates(const SystemSpec& s, const SteadyState& ss, double cluster_tol = kDefectTolerance);

Envelope entropy_envelope(double mu, double epsilon, double lambda_p, double S0);

// Full certificate for a built P; S0 adds the envelope.
DecayCertificate certify(const SystemSpec& s, const SteadyState& ss, const TransportMatrix& tm,
                         std::optional<double> S0 = std::nullopt);

// Coordinate search over log-spaced weight ratios minimising amplitude(P).
TransportMatrix optimize_weights(const SteadyState& ss, const EigenStructure& eig_q, double epsilon,
                                 const std::function<double(const TransportMatrix&)>& amplitude,
                                 int grid_points = 9, double log10_span = 2.0);

// min over delta in (0,1] of exp(2 kappa delta) max(1, c_hat / delta^{2 tau + 1}).
RegularisedConstant regularised_constant(double kappa, int tau, double c_hat);

}  // namespace hypofp
