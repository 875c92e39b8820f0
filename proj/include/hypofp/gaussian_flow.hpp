#pragma once

#include "hypofp/decay.hpp"
#include "hypofp/entropy.hpp"
#include "hypofp/linalg.hpp"
#include "hypofp/system.hpp"

#include <functional>
#include <vector>

namespace hypofp {

Vec evolve_shift(const Vec& v0, double t, const Mat& C);
Mat evolve_cov(const Mat& A0, double t, const Mat& C, const Mat& K);
GaussianMixture evolve_mixture(const GaussianMixture& m0, double t, const Mat& C, const Mat& K);

double entropy_log_shift(const Vec& v, const Mat& K);
double entropy_quad_affine(const Vec& v, const Mat& K);
double entropy_log_cov(const Mat& A, const Mat& K);
double entropy_rate_shift(const Vec& v, const Mat& K, const Mat& D);

// Log-entropy functionals of a single Gaussian N(m, A) in closed form.
Functionals log_functionals_gaussian(const Vec& m, const Mat& A, const Mat& K, const Mat& D, const Mat& P);

enum class ScenarioKind { RealEigenvalue, ComplexPair, Defective };

struct SharpnessScenario {
    ScenarioKind kind = ScenarioKind::RealEigenvalue;
    double mu = 0.0;
    double omega = 0.0;   // complex pair only
    Vec v0;               // initial shift
    Vec v1;               // complex pair: second phase vector
    Vec w;                // defective: eigenvector
    Vec h;                // defective: generalized eigenvector, (C - mu) h = w
    double e0 = 0.0;      // e_1(f_0)
    double c1 = 0.0;      // defective: e e^{2 mu t} = e0 + c1 t / 2 + c2 t^2 / 2
    double c2 = 0.0;
    double peak = 0.0;    // complex pair: sup of e e^{2 mu t}
    double t0 = 0.0;      // complex pair: first tangency time
    Mat K;

    // Predicted log entropy e_1(t) of f_inf(. - v(t)).
    double predicted(double t) const;
};

// Throws DomainError when C has no minimal eigenvalue of the requested kind.
SharpnessScenario sharpness_scenario(ScenarioKind kind, const SystemSpec& s, const SteadyState& ss,
                                     const EigenStructure& eig_c);
// Defective case from an explicit chain C w = mu w, C h = mu h + w.
SharpnessScenario defective_scenario(const Vec& w, const Vec& h, double mu, const Mat& K);

// v0 = exp(C t*) K w, so that K^{-1} v(t*) = w lies in ker D.
Vec zero_tangent_initial(double t_star, const Vec& w, const SystemSpec& s, const SteadyState& ss);

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<GaussianMixture> states;
    std::vector<double> entropy;
    std::vector<double> dissipation;
    std::vector<double> modified;
    std::vector<double> envelope;
    Envelope env;
    double lambda_P = 0.0;
    double S0 = 0.0;

    bool entropy_monotone(double slack = 1e-9) const;
    bool dominated(double rel_slack = 1e-6) const;
};

TrajectoryRecord run_trajectory(const SystemSpec& s, const SteadyState& ss, const TransportMatrix& tm,
                                const GaussianMixture& f0, const EntropyGenerator& g, const std::vector<double>& times,
                                const QuadratureRule& q);

std::vector<double> linspace(double a, double b, int n);

struct Tangency {
    double t = 0.0;
    double gap = 1.0;  // 1 - e(t) / envelope(t) at the local maximum
};

// Local maxima of e(t)/envelope(t), refined by golden-section search when
// `exact` is given. Returns those with gap <= gap_tol.
std::vector<Tangency> find_tangencies(const std::vector<double>& times, const std::vector<double>& values,
                                      const Envelope& env, const std::function<double(double)>& exact = {},
                                      double gap_tol = 1e-2);

}  // namespace hypofp
