#include "hypofp/decay.hpp"

#include "hypofp/errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <limits>

namespace hypofp {

double Envelope::operator()(double t) const { return amplitude * std::exp(-rate * t); }

namespace {

int chain_count(const EigenStructure& eig) {
    int n = 0;
    for (const auto& c : eig.clusters) n += static_cast<int>(c.chains.size());
    return n;
}

double minimal_band(const EigenStructure& eig) {
    double scale = 0.0;
    for (const auto& c : eig.clusters) scale = std::max(scale, std::abs(c.value));
    return std::max(eig.tolerance, 1e-12 * scale);
}

bool has_minimal_defective(const EigenStructure& eig) {
    const double mu = eig.min_real_part();
    const double band = minimal_band(eig);
    for (const auto& c : eig.clusters) {
        if (c.value.real() - mu <= band && c.defective()) return true;
    }
    return false;
}

// Chain index groups that must share a weight (conjugate partners).
std::vector<std::vector<int>> weight_groups(const EigenStructure& eig) {
    std::vector<std::vector<int>> groups;
    int offset = 0;
    for (std::size_t ci = 0; ci < eig.clusters.size(); ++ci) {
        const auto& c = eig.clusters[ci];
        const int nc = static_cast<int>(c.chains.size());
        if (c.value.imag() > 0.0 && ci + 1 < eig.clusters.size()) {
            for (int j = 0; j < nc; ++j) groups.push_back({offset + j, offset + nc + j});
            offset += 2 * nc;
            ++ci;
            continue;
        }
        for (int j = 0; j < nc; ++j) groups.push_back({offset + j});
        offset += nc;
    }
    return groups;
}

}  // namespace

TransportMatrix build_P(const SteadyState& ss, const EigenStructure& eig_q, double epsilon,
                        const std::vector<double>& weights) {
    const int d = static_cast<int>(ss.Q.rows());
    if (eig_q.dimension() != d) throw DomainError("build_P: eigen structure does not match Q");
    const int nchains = chain_count(eig_q);
    std::vector<double> w = weights.empty() ? std::vector<double>(nchains, 1.0) : weights;
    if (static_cast<int>(w.size()) != nchains) throw DomainError("build_P: one weight per eigenvector required");
    for (double b : w) {
        if (!(b > 0.0) || !std::isfinite(b)) throw DomainError("build_P: weights must be positive");
    }
    for (const auto& g : weight_groups(eig_q)) {
        for (int i : g) {
            if (std::abs(w[i] - w[g.front()]) > 1e-14 * std::abs(w[g.front()])) {
                throw DomainError("build_P: conjugate eigenvectors need equal weights");
            }
        }
    }

    TransportMatrix tm;
    tm.mu = eig_q.min_real_part();
    tm.weights = w;
    const bool defective = has_minimal_defective(eig_q);
    if (defective) {
        if (!(epsilon > 0.0 && epsilon < tm.mu)) {
            throw CertificateError("build_P: minimal eigenvalue is defective; need 0 < epsilon < mu");
        }
        tm.epsilon = epsilon;
    }
    tm.kappa = tm.mu - tm.epsilon;
    const double band = minimal_band(eig_q);

    CMat acc = CMat::Zero(d, d);
    int idx = 0;
    bool jordan = false;
    for (const auto& c : eig_q.clusters) {
        const double gap = c.value.real() - tm.mu;
        for (const auto& ch : c.chains) {
            const int len = ch.length();
            double tau = 0.0;
            if (len > 1) {
                jordan = true;
                tau = gap <= band ? 2.0 * (gap + tm.epsilon) : 2.0 * gap;
                if (!(tau > 0.0)) throw CertificateError("build_P: defective block without spectral gap");
            }
            double cj = 1.0;
            for (int j = 1; j <= len; ++j) {
                if (j > 1) cj = 1.0 + cj * cj;
                const double b = j == 1 ? 1.0 : cj * std::pow(tau, 2.0 * (1 - j));
                // top of the chain gets b^1, the eigenvector b^len
                const CVec& a = ch.vectors[len - j];
                acc += (w[idx] * b) * (a * a.adjoint());
            }
            ++idx;
        }
    }
    tm.P = symmetrize(acc.real());
    tm.construction = jordan ? PConstruction::Jordan : PConstruction::EigenSum;
    if (!tm.P.allFinite() || !(min_sym_eigenvalue(tm.P) > 0.0)) {
        throw NumericalError("build_P: P is not positive definite");
    }
    return tm;
}

TransportMatrix build_P(const SteadyState& ss, double cluster_tol) {
    const EigenStructure eig = eigen_structure(ss.Q, cluster_tol);
    const double eps = has_minimal_defective(eig) ? kDefaultEpsilonFraction * eig.min_real_part() : 0.0;
    return build_P(ss, eig, eps);
}

double verify_P(const SteadyState& ss, const Mat& P, double kappa) {
    if (P.rows() != ss.Q.rows() || P.cols() != ss.Q.cols()) throw DomainError("verify_P: size mismatch");
    return min_sym_eigenvalue(ss.Q * P + P * ss.Q.transpose() - 2.0 * kappa * P);
}

bool margin_ok(double margin, const Mat& P) { return margin >= -kMarginTolerance * norm2(P); }

double lambda_P(const Mat& K, const Mat& P) {
    const Mat root = sqrt_spd(P);
    return min_sym_eigenvalue(root * spd_inverse(K) * root);
}

double lambda_K(const Mat& D, const Mat& K) {
    if (!(min_sym_eigenvalue(D) > kRankTolerance * norm2(D))) {
        throw DomainError("lambda_K: D must be positive definite");
    }
    const Mat root = sqrt_spd(D);
    return min_sym_eigenvalue(root * spd_inverse(K) * root);
}

DecayCertificate compare_rates(const SystemSpec& s, const SteadyState& ss, double cluster_tol) {
    DecayCertificate out;
    const double lk = lambda_K(s.D, ss.K);
    out.lambda_K = lk;
    const EigenStructure eig = eigen_structure(s.C, cluster_tol);
    out.mu = eig.min_real_part();
    if (lk > out.mu * (1.0 + 1e-10) + 1e-10) {
        throw CertificateError("compare_rates: lambda_K exceeds mu");
    }
    bool diagonalizable = true;
    for (const auto& c : eig.clusters) diagonalizable = diagonalizable && !c.defective();
    if (diagonalizable) {
        const Mat root = sqrt_spd(s.D);
        const Mat ct = inv_sqrt_spd(s.D) * s.C * root;
        Eigen::EigenSolver<Mat> es(ct, true);
        Eigen::JacobiSVD<CMat> svd(es.eigenvectors());
        const auto& sv = svd.singularValues();
        const double cond = sv(0) / sv(sv.size() - 1);
        out.cond_sq_bound = cond * cond;
        if (out.mu > cond * cond * lk * (1.0 + 1e-10) + 1e-10) {
            throw CertificateError("compare_rates: mu exceeds cond(A)^2 lambda_K");
        }
    }
    return out;
}

Envelope entropy_envelope(double mu, double epsilon, double lambda_p, double S0) {
    if (!std::isfinite(S0) || S0 < 0.0) throw DomainError("entropy_envelope: initial state is not psi-compatible");
    if (!(lambda_p > 0.0)) throw DomainError("entropy_envelope: lambda_P must be positive");
    return {S0 / (2.0 * lambda_p), 2.0 * (mu - epsilon)};
}

DecayCertificate certify(const SystemSpec& s, const SteadyState& ss, const TransportMatrix& tm,
                         std::optional<double> S0) {
    DecayCertificate out;
    out.mu = tm.mu;
    out.epsilon = tm.epsilon;
    out.margin = verify_P(ss, tm.P, tm.kappa);
    if (!margin_ok(out.margin, tm.P)) {
        throw CertificateError("certificate failure: Q P + P Q^T - 2 kappa P has negative eigenvalue " +
                               std::to_string(out.margin));
    }
    out.lambda_P = lambda_P(ss.K, tm.P);
    if (min_sym_eigenvalue(s.D) > kRankTolerance * norm2(s.D)) {
        const DecayCertificate cmp = compare_rates(s, ss);
        out.lambda_K = cmp.lambda_K;
        out.cond_sq_bound = cmp.cond_sq_bound;
    }
    if (S0) out.envelope = entropy_envelope(tm.mu, tm.epsilon, out.lambda_P, *S0);
    return out;
}

TransportMatrix optimize_weights(const SteadyState& ss, const EigenStructure& eig_q, double epsilon,
                                 const std::function<double(const TransportMatrix&)>& amplitude, int grid_points,
                                 double log10_span) {
    if (grid_points < 1) throw DomainError("optimize_weights: empty grid");
    const auto groups = weight_groups(eig_q);
    std::vector<double> w(chain_count(eig_q), 1.0);
    TransportMatrix best = build_P(ss, eig_q, epsilon, w);
    double best_amp = amplitude(best);
    std::vector<double> grid;
    for (int i = 0; i < grid_points; ++i) {
        const double e = grid_points == 1 ? 0.0 : -log10_span + 2.0 * log10_span * i / (grid_points - 1);
        grid.push_back(std::pow(10.0, e));
    }
    for (int sweep = 0; sweep < 4; ++sweep) {
        bool improved = false;
        for (std::size_t g = 1; g < groups.size(); ++g) {
            for (double value : grid) {
                std::vector<double> trial = best.weights;
                for (int i : groups[g]) trial[i] = value;
                TransportMatrix tm = build_P(ss, eig_q, epsilon, trial);
                const double amp = amplitude(tm);
                if (amp < best_amp * (1.0 - 1e-12)) {
                    best_amp = amp;
                    best = std::move(tm);
                    improved = true;
                }
            }
        }
        if (!improved) break;
    }
    return best;
}

RegularisedConstant regularised_constant(double kappa, int tau, double c_hat) {
    if (!(c_hat > 0.0) || !std::isfinite(c_hat)) throw DomainError("regularised_constant: c_hat must be positive");
    if (tau < 0) throw DomainError("regularised_constant: tau must be >= 0");
    const double power = 2.0 * tau + 1.0;
    auto log_c = [&](double x) {
        const double delta = std::exp(x);
        return 2.0 * kappa * delta + std::max(0.0, std::log(c_hat) - power * x);
    };
    const auto r = boost::math::tools::brent_find_minima(log_c, std::log(1e-12), 0.0, 52);
    return {std::exp(r.second), std::exp(r.first)};
}

}  // namespace hypofp
