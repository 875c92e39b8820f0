#pragma once

#include "hypofp/linalg.hpp"

#include <optional>
#include <string>

namespace hypofp {

inline constexpr double kStabilityTolerance = 1e-10;
inline constexpr double kRankTolerance = 1e-10;
// Merge radius used when defectiveness matters (a perturbed 2x2 Jordan
// block splits by roughly sqrt(machine epsilon)).
inline constexpr double kDefectTolerance = 1e-6;

// Drift-diffusion pair for  df/dt = div(D grad f + C x f).
struct SystemSpec {
    Mat D;
    Mat C;

    // Validates shapes, finiteness and D = D^T >= 0; symmetrizes D.
    SystemSpec(Mat d, Mat c);
    int dim() const { return static_cast<int>(C.rows()); }
};

struct HoermanderIndex {
    int tau = 0;
    double kappa = 0.0;  // min eigenvalue of sum_{j<=tau} C^j D C^{Tj}
};

struct ConditionAReport {
    bool hypoelliptic = false;
    int rank_d = 0;
    std::optional<HoermanderIndex> hoermander;
    bool positively_stable = false;
    double mu = 0.0;
    bool minimal_defective = false;
    EigenStructure eig_c;

    bool holds() const { return hypoelliptic && positively_stable; }
    // Empty when condition A holds, else the failing clause in words.
    std::string failure() const;
};

struct SteadyState {
    Mat K;
    double cK = 0.0;
    Mat R;
    Mat Q;
    Mat K_inv;
    // Steady density f_inf(x).
    double density(const Vec& x) const;
};

struct NormalizedSystem {
    SystemSpec system;
    Mat T;  // x = T y maps the normalized system back
};

int numerical_rank(const Mat& m, double rel_tol = kRankTolerance);

// D := T^{-1} D T^{-T} becomes an orthogonal projection, C := T^{-1} C T.
NormalizedSystem normalize_diffusion(const SystemSpec& s);

std::optional<HoermanderIndex> hoermander_tau(const SystemSpec& s);

ConditionAReport check_condition_A(const SystemSpec& s, double cluster_tol = kDefectTolerance);

// Throws ConditionAError when K is singular.
SteadyState steady_state(const SystemSpec& s);

// int_0^t exp(-C u) D exp(-C^T u) du; the Green function is Gaussian with
// covariance 2 W(t), so 2 W(t) -> K.
Mat green_covariance(const SystemSpec& s, double t);

}  // namespace hypofp
