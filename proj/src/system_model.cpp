#include "hypofp/system.hpp"

#include "hypofp/errors.hpp"
#include "hypofp/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace hypofp {

SystemSpec::SystemSpec(Mat d, Mat c) : D(std::move(d)), C(std::move(c)) {
    if (C.rows() != C.cols() || D.rows() != D.cols()) throw DomainError("system: D and C must be square");
    if (C.rows() != D.rows()) throw DomainError("system: D and C must have the same dimension");
    if (C.rows() == 0) throw DomainError("system: empty matrices");
    if (!C.allFinite() || !D.allFinite()) throw DomainError("system: non-finite entries");
    const double scale = std::max(D.cwiseAbs().maxCoeff(), 1e-300);
    if ((D - D.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw DomainError("system: D must be symmetric");
    }
    D = symmetrize(D);
    if (min_sym_eigenvalue(D) < -1e-12 * scale) throw DomainError("system: D must be positive semi-definite");
}

std::string ConditionAReport::failure() const {
    if (!hypoelliptic) {
        return "condition A fails: a non-trivial subspace of ker D is invariant under C^T "
               "(the operator is not hypoelliptic)";
    }
    if (!positively_stable) {
        return "condition A fails: C is not positively stable (min Re eigenvalue " + std::to_string(mu) + ")";
    }
    return {};
}

double SteadyState::density(const Vec& x) const { return cK * std::exp(-0.5 * x.dot(K_inv * x)); }

int numerical_rank(const Mat& m, double rel_tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(m);
    const auto& s = svd.singularValues();
    const double thr = rel_tol * s(0);
    int r = 0;
    while (r < s.size() && s(r) > thr) ++r;
    return r;
}

NormalizedSystem normalize_diffusion(const SystemSpec& s) {
    const int n = s.dim();
    const double scale = std::max(s.D.cwiseAbs().maxCoeff(), 1e-300);
    if ((s.D * s.D - s.D).cwiseAbs().maxCoeff() <= 1e-12 * std::max(scale, 1.0)) {
        return {s, Mat::Identity(n, n)};
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(s.D);
    const int k = numerical_rank(s.D);
    Mat u(n, n);
    Vec gains(n);
    // descending eigenvalues, each eigenvector with a positive dominant entry
    for (int j = 0; j < n; ++j) {
        Vec v = es.eigenvectors().col(n - 1 - j);
        Eigen::Index at = 0;
        v.cwiseAbs().maxCoeff(&at);
        if (v(at) < 0.0) v = -v;
        u.col(j) = v;
        gains(j) = j < k ? std::sqrt(es.eigenvalues()(n - 1 - j)) : 1.0;
    }
    Mat t = u * gains.asDiagonal();
    Mat t_inv = gains.cwiseInverse().asDiagonal() * u.transpose();
    Mat dn = Mat::Zero(n, n);
    for (int j = 0; j < k; ++j) dn(j, j) = 1.0;
    return {SystemSpec(dn, t_inv * s.C * t), t};
}

std::optional<HoermanderIndex> hoermander_tau(const SystemSpec& s) {
    const int n = s.dim();
    if (numerical_rank(s.D) == 0) return std::nullopt;
    Mat sum = s.D;
    Mat term = s.D;
    for (int j = 0; j < n; ++j) {
        if (j > 0) {
            term = s.C * term * s.C.transpose();
            sum += term;
        }
        const double kappa = min_sym_eigenvalue(sum);
        if (kappa > kRankTolerance * norm2(sum)) return HoermanderIndex{j, kappa};
    }
    return std::nullopt;
}

ConditionAReport check_condition_A(const SystemSpec& s, double cluster_tol) {
    ConditionAReport r;
    r.rank_d = numerical_rank(s.D);
    r.hoermander = hoermander_tau(s);
    r.hypoelliptic = r.hoermander.has_value();
    r.eig_c = eigen_structure(s.C, cluster_tol);
    r.mu = r.eig_c.min_real_part();
    const double cn = norm2(s.C);
    r.positively_stable = r.mu > kStabilityTolerance * cn;
    const double band = std::max(r.eig_c.tolerance, 1e-12 * cn);
    for (const auto& c : r.eig_c.clusters) {
        if (c.value.real() - r.mu <= band && c.defective()) r.minimal_defective = true;
    }
    return r;
}

SteadyState steady_state(const SystemSpec& s) {
    const int n = s.dim();
    SteadyState ss;
    ss.K = solve_lyapunov(s.C, s.D);
    const double kn = norm2(ss.K);
    const double kmin = min_sym_eigenvalue(ss.K);
    if (kmin < -kStabilityTolerance * kn) {
        throw ConditionAError("steady state: K is indefinite (C is not positively stable)");
    }
    if (!(kmin > kStabilityTolerance * kn)) {
        throw ConditionAError(
            "steady state: K is singular; an eigenvector of C^T lies in ker D, so a non-trivial "
            "subspace of ker D is invariant under C^T");
    }
    Eigen::LLT<Mat> llt(ss.K);
    if (llt.info() != Eigen::Success) throw ConditionAError("steady state: K is not positive definite");
    double logdet = 0.0;
    for (int i = 0; i < n; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    ss.cK = std::exp(-0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * logdet);
    ss.K_inv = symmetrize(llt.solve(Mat::Identity(n, n)));
    Mat r = 0.5 * (s.C * ss.K - ss.K * s.C.transpose());
    ss.R = 0.5 * (r - r.transpose());
    ss.Q = ss.K * s.C.transpose() * ss.K_inv;
    return ss;
}

Mat green_covariance(const SystemSpec& s, double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("green_covariance: t must be finite and >= 0");
    const int n = s.dim();
    if (t == 0.0) return Mat::Zero(n, n);
    const int panels = std::max(16, static_cast<int>(std::ceil(4.0 * t * norm2(s.C))));
    const double h = t / panels;
    const Rule1D rule = gauss_legendre(8, 0.0, h);
    std::vector<Mat> offsets;
    for (double x : rule.nodes) offsets.push_back(matrix_exponential(-s.C, x));
    Mat w = Mat::Zero(n, n);
    for (int p = 0; p < panels; ++p) {
        const Mat start = matrix_exponential(-s.C, p * h);
        Mat panel = Mat::Zero(n, n);
        for (std::size_t i = 0; i < offsets.size(); ++i) {
            const Mat e = start * offsets[i];
            panel += rule.weights[i] * (e * s.D * e.transpose());
        }
        w += panel;
    }
    return symmetrize(w);
}

}  // namespace hypofp
