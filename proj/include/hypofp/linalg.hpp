#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace hypofp {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr double kDefaultClusterTolerance = 1e-8;

// Jordan chain of a cluster: vectors[0] is an eigenvector and
// (M - lambda) vectors[k+1] = vectors[k].
struct JordanChain {
    std::vector<CVec> vectors;
    int length() const { return static_cast<int>(vectors.size()); }
};

struct EigenCluster {
    Complex value;       // cluster representative
    int algebraic = 0;
    int geometric = 0;
    std::vector<JordanChain> chains;   // lengths sum to `algebraic`

    bool defective() const { return geometric < algebraic; }
    int max_block() const;
};

struct EigenStructure {
    std::vector<EigenCluster> clusters;
    double tolerance = 0.0;  // absolute merge radius actually used

    int dimension() const;
    // Eigenvalues repeated by algebraic multiplicity, cluster by cluster.
    std::vector<Complex> eigenvalues() const;
    double min_real_part() const;
};

// Spectral norm.
double norm2(const Mat& m);

// Eigenvalues closer than rel_tol * ||M|| are merged into one cluster.
// Throws NumericalError if two clusters sit within twice that radius.
EigenStructure eigen_structure(const Mat& m, double rel_tol = kDefaultClusterTolerance);

// exp(t M) by scaling and squaring of a truncated Taylor series.
Mat matrix_exponential(const Mat& m, double t = 1.0);

// Solves C K + K C^T = 2 D.
Mat solve_lyapunov(const Mat& c, const Mat& d);

double min_sym_eigenvalue(const Mat& m);
double max_sym_eigenvalue(const Mat& m);
Mat sqrt_spd(const Mat& m);
Mat inv_sqrt_spd(const Mat& m);
Mat spd_inverse(const Mat& m);

inline Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

bool all_finite(const Mat& m);

}  // namespace hypofp
