#include "hypofp/gaussian_flow.hpp"

#include "hypofp/errors.hpp"
#include "hypofp/parallel.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <numbers>

namespace hypofp {

namespace {

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("evolution time must be finite and >= 0");
}

// Eigenvalues of K^{-1/2} A K^{-1/2}.
Vec relative_spectrum(const Mat& A, const Mat& K) {
    const Mat r = inv_sqrt_spd(K);
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(r * A * r), Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues()(0) > 0.0)) throw DomainError("covariance is not positive definite");
    return es.eigenvalues();
}

double half_trace_log_gap(const Vec& lambda) {
    double e = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        const double x = lambda(i) - 1.0;
        e += x - std::log1p(x);
    }
    return 0.5 * e;
}

Vec real_direction(const CVec& v) {
    Eigen::Index at = 0;
    v.cwiseAbs().maxCoeff(&at);
    const Complex phase = v(at) / std::abs(v(at));
    Vec r = (std::conj(phase) * v).real();
    return r;
}

}  // namespace

Vec evolve_shift(const Vec& v0, double t, const Mat& C) {
    require_time(t);
    return matrix_exponential(-C, t) * v0;
}

Mat evolve_cov(const Mat& A0, double t, const Mat& C, const Mat& K) {
    require_time(t);
    const Mat e = matrix_exponential(-C, t);
    Mat a = symmetrize(K + e * (A0 - K) * e.transpose());
    Eigen::LLT<Mat> llt(a);
    if (llt.info() != Eigen::Success) throw NumericalError("evolve_cov: covariance lost positive definiteness");
    return a;
}

GaussianMixture evolve_mixture(const GaussianMixture& m0, double t, const Mat& C, const Mat& K) {
    require_time(t);
    const Mat e = matrix_exponential(-C, t);
    GaussianMixture out;
    for (const auto& c : m0.components) {
        GaussianComponent n;
        n.weight = c.weight;
        n.mean = e * c.mean;
        n.cov = symmetrize(K + e * (c.cov - K) * e.transpose());
        Eigen::LLT<Mat> llt(n.cov);
        if (llt.info() != Eigen::Success) throw NumericalError("evolve_mixture: covariance lost positive definiteness");
        if (c.affine.size() > 0) n.affine = llt.solve(e * (c.cov * c.affine));
        out.components.push_back(std::move(n));
    }
    return out;
}

double entropy_log_shift(const Vec& v, const Mat& K) { return 0.5 * v.dot(K.llt().solve(v)); }

double entropy_quad_affine(const Vec& v, const Mat& K) { return v.dot(K.llt().solve(v)); }

double entropy_log_cov(const Mat& A, const Mat& K) { return half_trace_log_gap(relative_spectrum(A, K)); }

double entropy_rate_shift(const Vec& v, const Mat& K, const Mat& D) {
    const Vec u = K.llt().solve(v);
    return -2.0 * u.dot(D * u);
}

Functionals log_functionals_gaussian(const Vec& m, const Mat& A, const Mat& K, const Mat& D, const Mat& P) {
    const Mat k_inv = spd_inverse(K);
    const Mat g = k_inv - spd_inverse(A);
    const Vec u = k_inv * m;
    Functionals f;
    f.e = half_trace_log_gap(relative_spectrum(A, K)) + 0.5 * m.dot(u);
    const Mat gag = g * A * g;
    if (D.size() > 0) f.I = (D * gag).trace() + u.dot(D * u);
    if (P.size() > 0) f.S = (P * gag).trace() + u.dot(P * u);
    return f;
}

double SharpnessScenario::predicted(double t) const {
    const double decay = std::exp(-2.0 * mu * t);
    switch (kind) {
        case ScenarioKind::RealEigenvalue: return e0 * decay;
        case ScenarioKind::ComplexPair: {
            const Vec v = std::cos(omega * t) * v0 + std::sin(omega * t) * v1;
            return decay * entropy_log_shift(v, K);
        }
        case ScenarioKind::Defective: return decay * (e0 + 0.5 * c1 * t + 0.5 * c2 * t * t);
    }
    return 0.0;
}

SharpnessScenario defective_scenario(const Vec& w, const Vec& h, double mu, const Mat& K) {
    SharpnessScenario sc;
    sc.kind = ScenarioKind::Defective;
    sc.mu = mu;
    sc.K = K;
    sc.w = w;
    sc.h = h;
    sc.v0 = h;
    const Vec kw = K.llt().solve(w);
    sc.e0 = entropy_log_shift(h, K);
    sc.c1 = -2.0 * kw.dot(h);
    sc.c2 = kw.dot(w);
    return sc;
}

SharpnessScenario sharpness_scenario(ScenarioKind kind, const SystemSpec& s, const SteadyState& ss,
                                     const EigenStructure& eig_c) {
    (void)s;
    const double mu = eig_c.min_real_part();
    double scale = 0.0;
    for (const auto& c : eig_c.clusters) scale = std::max(scale, std::abs(c.value));
    const double band = std::max(eig_c.tolerance, 1e-12 * scale);
    for (const auto& c : eig_c.clusters) {
        if (c.value.real() - mu > band) continue;
        const bool real = c.value.imag() == 0.0;
        if (kind == ScenarioKind::RealEigenvalue && real) {
            SharpnessScenario sc;
            sc.kind = kind;
            sc.mu = c.value.real();
            sc.K = ss.K;
            sc.v0 = real_direction(c.chains.front().vectors.front()).normalized();
            sc.e0 = entropy_log_shift(sc.v0, ss.K);
            return sc;
        }
        if (kind == ScenarioKind::ComplexPair && c.value.imag() > 0.0) {
            SharpnessScenario sc;
            sc.kind = kind;
            sc.mu = c.value.real();
            sc.omega = c.value.imag();
            sc.K = ss.K;
            const CVec w = c.chains.front().vectors.front().normalized();
            sc.v0 = 2.0 * w.real();
            sc.v1 = 2.0 * w.imag();
            sc.e0 = entropy_log_shift(sc.v0, ss.K);
            Mat basis(sc.v0.size(), 2);
            basis << sc.v0, sc.v1;
            const Mat gram = 0.5 * basis.transpose() * ss.K_inv * basis;
            Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(gram));
            sc.peak = es.eigenvalues()(1);
            const Vec top = es.eigenvectors().col(1);
            double theta = std::atan2(top(1), top(0));
            theta = std::fmod(theta + 2.0 * std::numbers::pi, std::numbers::pi);
            sc.t0 = theta / sc.omega;
            return sc;
        }
        if (kind == ScenarioKind::Defective && real) {
            for (const auto& ch : c.chains) {
                if (ch.length() < 2) continue;
                Eigen::Index at = 0;
                ch.vectors[0].cwiseAbs().maxCoeff(&at);
                const Complex phase = std::conj(ch.vectors[0](at) / std::abs(ch.vectors[0](at)));
                return defective_scenario((phase * ch.vectors[0]).real(), (phase * ch.vectors[1]).real(),
                                          c.value.real(), ss.K);
            }
        }
    }
    throw DomainError("sharpness_scenario: C has no minimal eigenvalue of the requested kind");
}

Vec zero_tangent_initial(double t_star, const Vec& w, const SystemSpec& s, const SteadyState& ss) {
    require_time(t_star);
    if (w.size() != s.dim()) throw DomainError("zero_tangent_initial: size mismatch");
    if ((s.D * w).norm() > 1e-10 * std::max(norm2(s.D), 1.0) * w.norm()) {
        throw DomainError("zero_tangent_initial: w is not in ker D");
    }
    return matrix_exponential(s.C, t_star) * (ss.K * w);
}

bool TrajectoryRecord::entropy_monotone(double slack) const {
    for (std::size_t i = 1; i < entropy.size(); ++i) {
        if (entropy[i] > entropy[i - 1] + slack) return false;
    }
    return true;
}

bool TrajectoryRecord::dominated(double rel_slack) const {
    for (std::size_t i = 0; i < entropy.size(); ++i) {
        if (entropy[i] > envelope[i] * (1.0 + rel_slack)) return false;
    }
    return true;
}

TrajectoryRecord run_trajectory(const SystemSpec& s, const SteadyState& ss, const TransportMatrix& tm,
                                const GaussianMixture& f0, const EntropyGenerator& g, const std::vector<double>& times,
                                const QuadratureRule& q) {
    for (std::size_t i = 0; i < times.size(); ++i) {
        require_time(times[i]);
        if (i > 0 && !(times[i] > times[i - 1])) throw DomainError("run_trajectory: times must increase");
    }
    TrajectoryRecord rec;
    rec.times = times;
    rec.S0 = evaluate_functionals(f0, ss, g, q, Mat(), tm.P).S;
    rec.lambda_P = lambda_P(ss.K, tm.P);
    rec.env = entropy_envelope(tm.mu, tm.epsilon, rec.lambda_P, rec.S0);
    const std::size_t n = times.size();
    rec.states.resize(n);
    rec.entropy.resize(n);
    rec.dissipation.resize(n);
    rec.modified.resize(n);
    rec.envelope.resize(n);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            rec.states[i] = evolve_mixture(f0, times[i], s.C, ss.K);
            const Functionals f = evaluate_functionals(rec.states[i], ss, g, q, s.D, tm.P);
            rec.entropy[i] = f.e;
            rec.dissipation[i] = f.I;
            rec.modified[i] = f.S;
            rec.envelope[i] = rec.env(times[i]);
        }
    });
    return rec;
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw DomainError("linspace: need at least one point");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return out;
}

std::vector<Tangency> find_tangencies(const std::vector<double>& times, const std::vector<double>& values,
                                      const Envelope& env, const std::function<double(double)>& exact,
                                      double gap_tol) {
    if (times.size() != values.size()) throw DomainError("find_tangencies: size mismatch");
    const std::size_t n = times.size();
    std::vector<double> ratio(n);
    for (std::size_t i = 0; i < n; ++i) ratio[i] = values[i] / env(times[i]);
    std::vector<Tangency> out;
    for (std::size_t i = 0; i < n; ++i) {
        const bool left = i == 0 || ratio[i] >= ratio[i - 1];
        const bool right = i + 1 == n || ratio[i] > ratio[i + 1];
        if (!left || !right || n < 2) continue;
        Tangency tg{times[i], 1.0 - ratio[i]};
        if (exact) {
            const double a = times[i == 0 ? 0 : i - 1];
            const double b = times[i + 1 == n ? i : i + 1];
            auto neg = [&](double t) { return -exact(t) / env(t); };
            const auto r = boost::math::tools::brent_find_minima(neg, a, b, 50);
            if (1.0 + r.second < tg.gap) tg = {r.first, 1.0 + r.second};
        }
        if (tg.gap <= gap_tol) out.push_back(tg);
    }
    return out;
}

}  // namespace hypofp
