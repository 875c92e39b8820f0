#include "hypofp/entropy.hpp"

#include "hypofp/errors.hpp"
#include "hypofp/parallel.hpp"
#include "hypofp/quadrature.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace hypofp {

EntropyGenerator EntropyGenerator::logarithmic(double alpha, double beta) {
    EntropyGenerator g{EntropyKind::Logarithmic, alpha, beta, 1.5};
    g.validate();
    return g;
}

EntropyGenerator EntropyGenerator::quadratic(double alpha) {
    EntropyGenerator g{EntropyKind::Quadratic, alpha, 0.0, 2.0};
    g.validate();
    return g;
}

EntropyGenerator EntropyGenerator::power(double p, double alpha, double beta) {
    EntropyGenerator g{EntropyKind::Power, alpha, beta, p};
    g.validate();
    return g;
}

double EntropyGenerator::domain_min() const {
    return kind == EntropyKind::Quadratic ? -std::numeric_limits<double>::infinity() : -beta;
}

void EntropyGenerator::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("entropy generator: alpha must be > 0");
    if (kind != EntropyKind::Quadratic && (!(beta >= 0.0) || !std::isfinite(beta))) {
        throw DomainError("entropy generator: beta must be >= 0");
    }
    if (kind == EntropyKind::Power && !(p > 1.0 && p < 2.0)) {
        throw DomainError("entropy generator: p must lie in (1, 2)");
    }
}

double psi_derivative(const EntropyGenerator& g, double s, int order) {
    if (order < 0 || order > 4) throw DomainError("psi_derivative: order must be in 0..4");
    const double a = g.alpha;
    if (g.kind == EntropyKind::Quadratic) {
        switch (order) {
            case 0: return a * (s - 1.0) * (s - 1.0);
            case 1: return 2.0 * a * (s - 1.0);
            case 2: return 2.0 * a;
            default: return 0.0;
        }
    }
    const double u = s + g.beta;
    const double u0 = 1.0 + g.beta;
    if (!(u >= 0.0) || (u == 0.0 && order > (g.kind == EntropyKind::Power ? 1 : 0))) {
        throw DomainError("psi_derivative: argument outside the domain s > -beta");
    }
    if (g.kind == EntropyKind::Logarithmic) {
        // log(u / u0), via log1p only near s = 1 where s - 1 is exact
        const double t = s - 1.0;
        const double lg = std::abs(t) < 0.5 * u0 ? std::log1p(t / u0) : std::log(u / u0);
        switch (order) {
            case 0: return u == 0.0 ? a * u0 : a * (u * lg - t);
            case 1: return a * lg;
            case 2: return a / u;
            case 3: return -a / (u * u);
            default: return 2.0 * a / (u * u * u);
        }
    }
    const double p = g.p;
    switch (order) {
        case 0: return a * (std::pow(u, p) - std::pow(u0, p) - p * std::pow(u0, p - 1.0) * (s - 1.0));
        case 1: return a * p * (std::pow(u, p - 1.0) - std::pow(u0, p - 1.0));
        case 2: return a * p * (p - 1.0) * std::pow(u, p - 2.0);
        case 3: return a * p * (p - 1.0) * (p - 2.0) * std::pow(u, p - 3.0);
        default: return a * p * (p - 1.0) * (p - 2.0) * (p - 3.0) * std::pow(u, p - 4.0);
    }
}

double w_transform(const EntropyGenerator& g, double r) {
    const double a = g.alpha;
    switch (g.kind) {
        case EntropyKind::Quadratic: return std::sqrt(2.0 * a) * (r - 1.0);
        case EntropyKind::Logarithmic:
            if (r + g.beta < 0.0) throw DomainError("w_transform: ratio outside the domain");
            return 2.0 * std::sqrt(a) * (std::sqrt(r + g.beta) - std::sqrt(1.0 + g.beta));
        case EntropyKind::Power: {
            if (r + g.beta < 0.0) throw DomainError("w_transform: ratio outside the domain");
            const double h = 0.5 * g.p;
            return 2.0 * std::sqrt(a * (g.p - 1.0) / g.p) * (std::pow(r + g.beta, h) - std::pow(1.0 + g.beta, h));
        }
    }
    return 0.0;
}

bool admissible_at(const EntropyGenerator& g, double s) {
    const double d2 = psi_derivative(g, s, 2);
    const double d3 = psi_derivative(g, s, 3);
    const double d4 = psi_derivative(g, s, 4);
    const double rhs = 0.5 * d2 * d4;
    return d2 >= 0.0 && d3 * d3 <= rhs + 1e-12 * std::abs(rhs);
}

int GaussianMixture::dim() const {
    return components.empty() ? 0 : static_cast<int>(components.front().mean.size());
}

bool GaussianMixture::is_signed() const {
    for (const auto& c : components) {
        if (c.weight < 0.0 || (c.affine.size() > 0 && c.affine.cwiseAbs().maxCoeff() > 0.0)) return true;
    }
    return false;
}

void GaussianMixture::validate() const {
    if (components.empty()) throw DomainError("mixture: no components");
    const int d = dim();
    double total = 0.0;
    double scale = 0.0;
    for (const auto& c : components) {
        if (c.mean.size() != d || c.cov.rows() != d || c.cov.cols() != d) {
            throw DomainError("mixture: inconsistent component dimensions");
        }
        if (c.affine.size() != 0 && c.affine.size() != d) throw DomainError("mixture: affine factor has wrong size");
        if (!std::isfinite(c.weight) || !c.mean.allFinite() || !c.cov.allFinite()) {
            throw DomainError("mixture: non-finite component data");
        }
        Eigen::LLT<Mat> llt(symmetrize(c.cov));
        if (llt.info() != Eigen::Success) throw DomainError("mixture: component covariance is not SPD");
        total += c.weight;
        scale += std::abs(c.weight);
    }
    if (std::abs(total - 1.0) > 1e-12 * std::max(1.0, scale)) throw DomainError("mixture: weights must sum to 1");
}

double GaussianMixture::density(const Vec& x) const {
    double f = 0.0;
    for (const auto& c : components) {
        Eigen::LLT<Mat> llt(c.cov);
        const Vec y = x - c.mean;
        double logdet = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
        const double q = y.dot(llt.solve(y));
        double phi = std::exp(-0.5 * q - 0.5 * logdet - 0.5 * y.size() * std::log(2.0 * std::numbers::pi));
        if (c.affine.size() > 0) phi *= 1.0 + c.affine.dot(y);
        f += c.weight * phi;
    }
    return f;
}

GaussianMixture GaussianMixture::gaussian(const Vec& mean, const Mat& cov) {
    GaussianMixture m;
    m.components.push_back({1.0, mean, cov, Vec()});
    return m;
}

GaussianMixture GaussianMixture::linear_perturbation(const Mat& K, const Vec& v) {
    GaussianMixture m;
    const Vec a = spd_inverse(K) * v;
    m.components.push_back({1.0, Vec::Zero(v.size()), K, a});
    return m;
}

QuadratureRule make_quadrature(const Mat& K, int order) {
    const int d = static_cast<int>(K.rows());
    if (d < 1) throw DomainError("make_quadrature: empty covariance");
    const Mat root = sqrt_spd(K);
    QuadratureRule q;
    if (d <= 3) {
        if (order < 2) throw DomainError("make_quadrature: order must be >= 2");
        const Rule1D r = gauss_hermite_normal(order);
        std::size_t total = 1;
        for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(order);
        q.nodes.reserve(total);
        q.weights.reserve(total);
        std::vector<int> idx(d, 0);
        Vec y(d);
        for (std::size_t n = 0; n < total; ++n) {
            double w = 1.0;
            for (int i = 0; i < d; ++i) {
                y(i) = r.nodes[idx[i]];
                w *= r.weights[idx[i]];
            }
            q.nodes.push_back(root * y);
            q.weights.push_back(w);
            for (int i = d - 1; i >= 0; --i) {
                if (++idx[i] < order) break;
                idx[i] = 0;
            }
        }
        return q;
    }
    q.tensor = false;
    q.replicas = kQmcReplicas;
    const double w = 1.0 / kQmcPoints;
    for (int rep = 0; rep < kQmcReplicas; ++rep) {
        const auto pts = shifted_halton(d, kQmcPoints, kQmcSeed + static_cast<std::uint64_t>(rep));
        for (const auto& u : pts) {
            Vec y(d);
            for (int i = 0; i < d; ++i) y(i) = -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u[i]);
            q.nodes.push_back(root * y);
            q.weights.push_back(w);
        }
    }
    return q;
}

namespace {

struct Prepared {
    double weight;
    Vec mean;
    Mat prec;
    Vec affine;
    double log_norm;  // log(phi / f_inf) constant part
};

std::vector<Prepared> prepare(const GaussianMixture& f, const SteadyState& ss) {
    const int d = f.dim();
    Eigen::LLT<Mat> kl(ss.K);
    double logdet_k = 0.0;
    for (int i = 0; i < d; ++i) logdet_k += 2.0 * std::log(kl.matrixL()(i, i));
    std::vector<Prepared> out;
    for (const auto& c : f.components) {
        Eigen::LLT<Mat> llt(symmetrize(c.cov));
        double logdet = 0.0;
        for (int i = 0; i < d; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
        Prepared p;
        p.weight = c.weight;
        p.mean = c.mean;
        p.prec = symmetrize(llt.solve(Mat::Identity(d, d)));
        p.affine = c.affine;
        p.log_norm = 0.5 * (logdet_k - logdet);
        out.push_back(std::move(p));
    }
    return out;
}

double mean_of_replicas(const std::vector<double>& terms, const QuadratureRule& q, double& se) {
    if (q.replicas <= 1) {
        se = 0.0;
        return pairwise_sum(terms);
    }
    const std::size_t per = terms.size() / static_cast<std::size_t>(q.replicas);
    std::vector<double> means(q.replicas);
    for (int r = 0; r < q.replicas; ++r) means[r] = pairwise_sum(terms.data() + r * per, per);
    double m = 0.0;
    for (double v : means) m += v;
    m /= q.replicas;
    double var = 0.0;
    for (double v : means) var += (v - m) * (v - m);
    var /= (q.replicas - 1);
    se = std::sqrt(var / q.replicas);
    return m;
}

}  // namespace

Functionals evaluate_functionals(const GaussianMixture& f, const SteadyState& ss, const EntropyGenerator& g,
                                 const QuadratureRule& q, const Mat& D, const Mat& P) {
    f.validate();
    g.validate();
    if (f.is_signed() && !g.allows_signed()) {
        throw DomainError("entropy: signed mixtures are only admissible for the quadratic generator");
    }
    const int d = f.dim();
    if (ss.K.rows() != d) throw DomainError("entropy: state and steady state dimensions differ");
    const bool want_i = D.size() > 0;
    const bool want_s = P.size() > 0;
    if ((want_i && D.rows() != d) || (want_s && P.rows() != d)) throw DomainError("entropy: matrix size mismatch");
    const auto comps = prepare(f, ss);
    const std::size_t n = q.size();
    std::vector<double> te(n), ti(n), ts(n);
    const double lo = g.domain_min();
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        Vec grad(d);
        for (std::size_t k = begin; k < end; ++k) {
            const Vec& x = q.nodes[k];
            const Vec kx = ss.K_inv * x;
            const double base = 0.5 * x.dot(kx);
            double r = 0.0;
            grad.setZero();
            for (const auto& c : comps) {
                const Vec y = x - c.mean;
                const Vec py = c.prec * y;
                const double ratio = std::exp(c.log_norm - 0.5 * y.dot(py) + base);
                const double factor = c.affine.size() > 0 ? 1.0 + c.affine.dot(y) : 1.0;
                r += c.weight * ratio * factor;
                grad += c.weight * ratio * (factor * (kx - py));
                if (c.affine.size() > 0) grad += c.weight * ratio * c.affine;
            }
            if (!std::isfinite(r) || !grad.allFinite()) {
                throw NumericalError("entropy: density ratio overflow at a quadrature node");
            }
            if (r < lo) throw DomainError("entropy: density ratio below -beta at a quadrature node");
            const double w = q.weights[k];
            te[k] = w * psi_derivative(g, r, 0);
            if (r == lo) {
                ti[k] = 0.0;
                ts[k] = 0.0;
                continue;
            }
            const double h = psi_derivative(g, r, 2);
            ti[k] = want_i ? w * h * grad.dot(D * grad) : 0.0;
            ts[k] = want_s ? w * h * grad.dot(P * grad) : 0.0;
        }
    });
    Functionals out;
    out.e = mean_of_replicas(te, q, out.e_se);
    out.I = mean_of_replicas(ti, q, out.I_se);
    out.S = mean_of_replicas(ts, q, out.S_se);
    return out;
}

double relative_entropy(const GaussianMixture& f, const SteadyState& ss, const EntropyGenerator& g,
                        const QuadratureRule& q) {
    return evaluate_functionals(f, ss, g, q, Mat(), Mat()).e;
}

double fisher_information(const GaussianMixture& f, const SteadyState& ss, const EntropyGenerator& g,
                          const QuadratureRule& q, const Mat& D) {
    return evaluate_functionals(f, ss, g, q, D, Mat()).I;
}

double modified_fisher(const GaussianMixture& f, const SteadyState& ss, const EntropyGenerator& g,
                       const QuadratureRule& q, const Mat& P) {
    return evaluate_functionals(f, ss, g, q, Mat(), P).S;
}

}  // namespace hypofp
