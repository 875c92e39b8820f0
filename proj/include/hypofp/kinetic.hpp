#pragma once

#include "hypofp/entropy.hpp"
#include "hypofp/linalg.hpp"
#include "hypofp/system.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hypofp {

enum class PotentialKind { Quadratic, Cosine, Polynomial };

// Perturbation V~ on top of omega0^2 x^2 / 2.
struct Potential {
    PotentialKind kind = PotentialKind::Quadratic;
    double epsilon = 0.0;               // Cosine: V~ = epsilon cos(x)
    std::vector<double> coefficients;   // Polynomial: V~ = sum c_k x^k

    double value(double x) const;
    double d1(double x) const;
    double d2(double x) const;
    bool trivial() const;
};

struct KineticSpec {
    double nu = 1.0;
    double sigma = 1.0;
    double omega0 = 1.0;
    double vtilde_dd_bound = 0.0;
    Potential potential;

    void validate() const;
    double V(double x) const { return 0.5 * omega0 * omega0 * x * x + potential.value(x); }
    double dV(double x) const { return omega0 * omega0 * x + potential.d1(x); }
};

enum class DampingRegime { Underdamped, Overdamped };

struct KineticCertificate {
    double kappa0 = 0.0;
    Mat P;
    double lambda = 0.0;
    double rate = 0.0;
    DampingRegime regime = DampingRegime::Underdamped;
    double min_margin = 0.0;  // min over sampled x of eig(Q(x) P + P Q(x)^T - rate P)
};

SystemSpec assemble_linear(const KineticSpec& ks);
double kappa0(double nu, double omega0);
DampingRegime damping_regime(double nu, double omega0);
Mat build_P_kinetic(double nu, double omega0);
double perturbation_bound(const Mat& P, double lambda);
// [[0,0],[tau,0]] P + P [[0,tau],[0,0]] + lambda P
Mat perturbed_form(const Mat& P, double tau, double lambda);

// Throws CertificateError when the perturbation is too large.
KineticCertificate kinetic_rate(const KineticSpec& ks, double x_min = -8.0, double x_max = 8.0);

struct PhaseGrid {
    double x_min = -6.0;
    double x_max = 6.0;
    double v_min = -6.0;
    double v_max = 6.0;
    int nx = 128;
    int nv = 128;

    double dx() const { return (x_max - x_min) / nx; }
    double dv() const { return (v_max - v_min) / nv; }
    double x(int i) const { return x_min + (i + 0.5) * dx(); }
    double v(int j) const { return v_min + (j + 0.5) * dv(); }
};

struct FdOptions {
    double t_end = 1.0;
    double dt = 1e-2;
    int record_every = 1;
    double theta = 0.5;  // 0.5: Crank-Nicolson, 1: backward Euler in v
};

struct FdSeries {
    std::vector<double> t;
    std::vector<double> mass;
    std::vector<double> entropy;
    std::vector<double> dissipation;
    std::vector<double> modified;
    PhaseGrid grid;
    std::vector<double> density;  // final state, index i * nv + j
};

// Strang splitting: x transport, v transport, v diffusion+friction.
FdSeries fd_simulate(const KineticSpec& ks, const PhaseGrid& grid, const std::function<double(double, double)>& f0,
                     const FdOptions& opt, const EntropyGenerator& g, const Mat& P);

// Discrete L2 distance between a grid density and a function on cell centres.
double grid_l2_distance(const PhaseGrid& grid, const std::vector<double>& density,
                        const std::function<double(double, double)>& f);

// Least-squares slope of -log(y) over t in [t_from, t_to].
double fit_exponential_rate(const std::vector<double>& t, const std::vector<double>& y, double t_from, double t_to);

}  // namespace hypofp
