#include "hypofp/kinetic.hpp"

#include "hypofp/errors.hpp"
#include "hypofp/parallel.hpp"
#include "hypofp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hypofp {

double Potential::value(double x) const {
    switch (kind) {
        case PotentialKind::Quadratic: return 0.0;
        case PotentialKind::Cosine: return epsilon * std::cos(x);
        case PotentialKind::Polynomial: {
            double s = 0.0;
            for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) s = s * x + *it;
            return s;
        }
    }
    return 0.0;
}

double Potential::d1(double x) const {
    switch (kind) {
        case PotentialKind::Quadratic: return 0.0;
        case PotentialKind::Cosine: return -epsilon * std::sin(x);
        case PotentialKind::Polynomial: {
            double s = 0.0;
            for (std::size_t k = coefficients.size(); k-- > 1;) s = s * x + k * coefficients[k];
            return s;
        }
    }
    return 0.0;
}

double Potential::d2(double x) const {
    switch (kind) {
        case PotentialKind::Quadratic: return 0.0;
        case PotentialKind::Cosine: return -epsilon * std::cos(x);
        case PotentialKind::Polynomial: {
            double s = 0.0;
            for (std::size_t k = coefficients.size(); k-- > 2;) s = s * x + k * (k - 1.0) * coefficients[k];
            return s;
        }
    }
    return 0.0;
}

bool Potential::trivial() const {
    switch (kind) {
        case PotentialKind::Quadratic: return true;
        case PotentialKind::Cosine: return epsilon == 0.0;
        case PotentialKind::Polynomial:
            return std::all_of(coefficients.begin(), coefficients.end(), [](double c) { return c == 0.0; });
    }
    return true;
}

void KineticSpec::validate() const {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw DomainError("kinetic: nu must be > 0");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("kinetic: sigma must be > 0");
    if (omega0 == 0.0 || !std::isfinite(omega0)) throw DomainError("kinetic: omega0 must be non-zero");
    if (!(vtilde_dd_bound >= 0.0) || !std::isfinite(vtilde_dd_bound)) {
        throw DomainError("kinetic: sup|V~''| must be finite and >= 0");
    }
}

SystemSpec assemble_linear(const KineticSpec& ks) {
    ks.validate();
    if (!ks.potential.trivial()) throw DomainError("assemble_linear: requires a purely quadratic potential");
    Mat d{{0.0, 0.0}, {0.0, ks.sigma}};
    Mat c{{0.0, -1.0}, {ks.omega0 * ks.omega0, ks.nu}};
    return SystemSpec(d, c);
}

namespace {

double discriminant(double nu, double omega0) {
    const double disc = nu * nu - 4.0 * omega0 * omega0;
    if (!std::isfinite(disc) || !(nu > 0.0) || omega0 == 0.0) throw DomainError("kinetic: invalid nu or omega0");
    if (std::abs(disc) <= 1e-12 * nu * nu) {
        throw DomainError("kinetic: 4 omega0^2 = nu^2 is the excluded defective case");
    }
    return disc;
}

}  // namespace

DampingRegime damping_regime(double nu, double omega0) {
    return discriminant(nu, omega0) > 0.0 ? DampingRegime::Overdamped : DampingRegime::Underdamped;
}

double kappa0(double nu, double omega0) {
    const double disc = discriminant(nu, omega0);
    if (disc > 0.0) return 0.5 * (nu - std::sqrt(disc));
    return 0.5 * nu;
}

Mat build_P_kinetic(double nu, double omega0) {
    const double w2 = omega0 * omega0;
    Mat p(2, 2);
    if (damping_regime(nu, omega0) == DampingRegime::Overdamped) {
        p << 2.0, nu, nu, nu * nu - 2.0 * w2;
    } else {
        p << 2.0, nu, nu, 2.0 * w2;
    }
    if (!(p.determinant() > 0.0)) throw NumericalError("build_P_kinetic: P is not positive definite");
    return p;
}

double perturbation_bound(const Mat& P, double lambda) {
    if (P.rows() != 2 || P.cols() != 2) throw DomainError("perturbation_bound: P must be 2x2");
    const double det = P.determinant();
    if (!(P(0, 0) > 0.0) || !(det > 0.0)) throw DomainError("perturbation_bound: P must be SPD");
    return std::sqrt(det) / P(0, 0) * lambda;
}

Mat perturbed_form(const Mat& P, double tau, double lambda) {
    Mat e{{0.0, 0.0}, {tau, 0.0}};
    return e * P + P * e.transpose() + lambda * P;
}

KineticCertificate kinetic_rate(const KineticSpec& ks, double x_min, double x_max) {
    ks.validate();
    KineticCertificate cert;
    cert.kappa0 = kappa0(ks.nu, ks.omega0);
    cert.regime = damping_regime(ks.nu, ks.omega0);
    cert.P = build_P_kinetic(ks.nu, ks.omega0);
    const double w2 = ks.omega0 * ks.omega0;
    cert.lambda = ks.vtilde_dd_bound / std::sqrt(std::abs(w2 - 0.25 * ks.nu * ks.nu));
    if (!(cert.lambda < 2.0 * cert.kappa0)) {
        throw CertificateError("kinetic_rate: infeasible, lambda = sup|V~''| / sqrt|omega0^2 - nu^2/4| = " +
                               std::to_string(cert.lambda) + " is not below 2 kappa0 = " +
                               std::to_string(2.0 * cert.kappa0));
    }
    if (ks.vtilde_dd_bound > w2 * (1.0 + 1e-12)) {
        throw CertificateError("kinetic_rate: sup|V~''| exceeds omega0^2, V is not uniformly convex");
    }
    cert.rate = 2.0 * cert.kappa0 - cert.lambda;
    cert.min_margin = std::numeric_limits<double>::infinity();
    const int samples = ks.potential.trivial() ? 1 : 2001;
    for (int i = 0; i < samples; ++i) {
        const double x = samples == 1 ? 0.0 : x_min + (x_max - x_min) * i / (samples - 1);
        const double vdd = ks.potential.d2(x);
        if (std::abs(vdd) > ks.vtilde_dd_bound * (1.0 + 1e-12) + 1e-14) {
            throw DomainError("kinetic_rate: |V~''| exceeds the declared bound at x = " + std::to_string(x));
        }
        Mat q{{0.0, 1.0}, {-(w2 + vdd), ks.nu}};
        const double m = min_sym_eigenvalue(q * cert.P + cert.P * q.transpose() - cert.rate * cert.P);
        cert.min_margin = std::min(cert.min_margin, m);
    }
    if (cert.min_margin < -1e-10 * norm2(cert.P)) {
        throw CertificateError("kinetic_rate: Q(x) P + P Q(x)^T >= rate P fails at a sampled x");
    }
    return cert;
}

namespace {

double van_leer(double theta) { return (theta + std::abs(theta)) / (1.0 + std::abs(theta)); }

// One conservative flux-limited step of u_t + a u_x = 0 on a strided line
// with zero-flux ends; speed a is constant along the line.
void advect_line(double* u, std::size_t stride, int n, double a, double dt, double h, std::vector<double>& flux) {
    const double c = a * dt / h;
    if (c == 0.0) return;
    flux.assign(n + 1, 0.0);
    auto at = [&](int i) { return u[static_cast<std::size_t>(i) * stride]; };
    for (int f = 1; f < n; ++f) {
        // face between cells f-1 and f
        const double jump = at(f) - at(f - 1);
        double theta = 0.0;
        double upwind;
        if (a > 0.0) {
            upwind = at(f - 1);
            if (f - 2 >= 0 && jump != 0.0) theta = (at(f - 1) - at(f - 2)) / jump;
        } else {
            upwind = at(f);
            if (f + 1 < n && jump != 0.0) theta = (at(f + 1) - at(f)) / jump;
        }
        flux[f] = a * upwind + 0.5 * std::abs(a) * (1.0 - std::abs(c)) * van_leer(theta) * jump;
    }
    for (int i = 0; i < n; ++i) u[static_cast<std::size_t>(i) * stride] -= dt / h * (flux[i + 1] - flux[i]);
}

struct VelocityOperator {
    // J_{j+1/2} = -(up[j] f_{j+1} - down[j] f_j), j = 0..nv-2
    std::vector<double> up;
    std::vector<double> down;
};

VelocityOperator velocity_operator(const KineticSpec& ks, const PhaseGrid& g) {
    VelocityOperator op;
    const double dv = g.dv();
    for (int j = 0; j + 1 < g.nv; ++j) {
        const double vf = g.v_min + (j + 1) * dv;
        const double r = ks.nu * vf * dv / (2.0 * ks.sigma);
        op.up.push_back(ks.sigma / dv * std::exp(r));
        op.down.push_back(ks.sigma / dv * std::exp(-r));
    }
    return op;
}

// (I - theta dt L) f_new = (I + (1 - theta) dt L) f_old along one v line.
void diffuse_line(double* f, int nv, const VelocityOperator& op, double dt, double dv, double theta,
                  std::vector<double>& a, std::vector<double>& b, std::vector<double>& c, std::vector<double>& r) {
    a.assign(nv, 0.0);
    b.assign(nv, 0.0);
    c.assign(nv, 0.0);
    r.assign(nv, 0.0);
    // (L f)_j = (J_{j-1/2} - J_{j+1/2}) / dv
    for (int j = 0; j < nv; ++j) {
        double lm = 0.0, ld = 0.0, lp = 0.0;  // coefficients of f_{j-1}, f_j, f_{j+1}
        if (j + 1 < nv) {
            lp += op.up[j] / dv;
            ld -= op.down[j] / dv;
        }
        if (j > 0) {
            lm += op.down[j - 1] / dv;
            ld -= op.up[j - 1] / dv;
        }
        double lf = ld * f[j];
        if (j > 0) lf += lm * f[j - 1];
        if (j + 1 < nv) lf += lp * f[j + 1];
        r[j] = f[j] + (1.0 - theta) * dt * lf;
        a[j] = -theta * dt * lm;
        b[j] = 1.0 - theta * dt * ld;
        c[j] = -theta * dt * lp;
    }
    // Thomas algorithm
    for (int j = 1; j < nv; ++j) {
        const double m = a[j] / b[j - 1];
        b[j] -= m * c[j - 1];
        r[j] -= m * r[j - 1];
    }
    f[nv - 1] = r[nv - 1] / b[nv - 1];
    for (int j = nv - 2; j >= 0; --j) f[j] = (r[j] - c[j] * f[j + 1]) / b[j];
}

}  // namespace

double grid_l2_distance(const PhaseGrid& grid, const std::vector<double>& density,
                        const std::function<double(double, double)>& f) {
    std::vector<double> terms(density.size());
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < grid.nv; ++j) {
            const std::size_t k = static_cast<std::size_t>(i) * grid.nv + j;
            const double diff = density[k] - f(grid.x(i), grid.v(j));
            terms[k] = diff * diff;
        }
    }
    return std::sqrt(pairwise_sum(terms) * grid.dx() * grid.dv());
}

FdSeries fd_simulate(const KineticSpec& ks, const PhaseGrid& grid, const std::function<double(double, double)>& f0,
                     const FdOptions& opt, const EntropyGenerator& g, const Mat& P) {
    ks.validate();
    g.validate();
    if (grid.nx < 4 || grid.nv < 4 || !(grid.x_max > grid.x_min) || !(grid.v_max > grid.v_min)) {
        throw DomainError("fd_simulate: invalid grid");
    }
    if (!(opt.dt > 0.0) || !(opt.t_end >= 0.0) || opt.record_every < 1) throw DomainError("fd_simulate: invalid time stepping");
    if (!(opt.theta >= 0.5 && opt.theta <= 1.0)) throw DomainError("fd_simulate: theta must lie in [0.5, 1]");
    if (P.rows() != 2 || P.cols() != 2) throw DomainError("fd_simulate: P must be 2x2");
    const int nx = grid.nx, nv = grid.nv;
    const double dx = grid.dx(), dv = grid.dv();
    const double cell = dx * dv;
    const std::size_t total = static_cast<std::size_t>(nx) * nv;

    double max_speed_x = std::max(std::abs(grid.v_min), std::abs(grid.v_max));
    double max_speed_v = 0.0;
    std::vector<double> force(nx);
    for (int i = 0; i < nx; ++i) {
        force[i] = -ks.dV(grid.x(i));
        max_speed_v = std::max(max_speed_v, std::abs(force[i]));
    }
    // each transport substep advances by dt/2
    if (0.5 * opt.dt * max_speed_x / dx > 1.0 || 0.5 * opt.dt * max_speed_v / dv > 1.0) {
        throw DomainError("fd_simulate: CFL violation, reduce dt");
    }

    // discrete steady state
    std::vector<double> finf(total);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < nv; ++j) {
            const double v = grid.v(j);
            finf[static_cast<std::size_t>(i) * nv + j] = std::exp(-(ks.nu / ks.sigma) * (ks.V(grid.x(i)) + 0.5 * v * v));
        }
    }
    const double finf_mass = pairwise_sum(finf) * cell;
    for (auto& x : finf) x /= finf_mass;
    const double peak = *std::max_element(finf.begin(), finf.end());
    double edge = 0.0;
    for (int i = 0; i < nx; ++i) {
        edge = std::max({edge, finf[static_cast<std::size_t>(i) * nv], finf[static_cast<std::size_t>(i) * nv + nv - 1]});
    }
    for (int j = 0; j < nv; ++j) edge = std::max({edge, finf[j], finf[static_cast<std::size_t>(nx - 1) * nv + j]});
    if (edge > 1e-6 * peak) throw DomainError("fd_simulate: grid does not resolve the steady state");

    std::vector<double> f(total);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < nv; ++j) f[static_cast<std::size_t>(i) * nv + j] = f0(grid.x(i), grid.v(j));
    }
    const double mass0 = pairwise_sum(f) * cell;
    if (!(mass0 > 0.0) || !std::isfinite(mass0)) throw DomainError("fd_simulate: initial datum has no mass");
    for (auto& x : f) x /= mass0;

    const VelocityOperator vop = velocity_operator(ks, grid);
    const double s11 = P(0, 0), s12 = 0.5 * (P(0, 1) + P(1, 0)), s22 = P(1, 1);

    FdSeries out;
    out.grid = grid;
    std::vector<double> te(total), ti(total), ts(total), wv(total);
    auto record = [&](double t) {
        const double lo = g.domain_min();
        for (std::size_t k = 0; k < total; ++k) {
            double h = f[k] / finf[k];
            if (h < lo) {
                if (h > lo - 1e-9) {
                    h = lo;
                } else {
                    throw DomainError("fd_simulate: density ratio left the entropy domain");
                }
            }
            wv[k] = w_transform(g, h);
            te[k] = psi(g, h) * finf[k] * cell;
        }
        for (int i = 0; i < nx; ++i) {
            for (int j = 0; j < nv; ++j) {
                const std::size_t k = static_cast<std::size_t>(i) * nv + j;
                const int ip = std::min(i + 1, nx - 1), im = std::max(i - 1, 0);
                const int jp = std::min(j + 1, nv - 1), jm = std::max(j - 1, 0);
                const double gx = (wv[static_cast<std::size_t>(ip) * nv + j] - wv[static_cast<std::size_t>(im) * nv + j]) /
                                  ((ip - im) * dx);
                const double gv = (wv[static_cast<std::size_t>(i) * nv + jp] - wv[static_cast<std::size_t>(i) * nv + jm]) /
                                  ((jp - jm) * dv);
                ti[k] = ks.sigma * gv * gv * finf[k] * cell;
                ts[k] = (s11 * gx * gx + 2.0 * s12 * gx * gv + s22 * gv * gv) * finf[k] * cell;
            }
        }
        out.t.push_back(t);
        out.mass.push_back(pairwise_sum(f) * cell);
        out.entropy.push_back(pairwise_sum(te));
        out.dissipation.push_back(pairwise_sum(ti));
        out.modified.push_back(pairwise_sum(ts));
        if (std::abs(out.mass.back() - 1.0) > 1e-8 * std::max(1.0, t)) {
            throw NumericalError("fd_simulate: mass drift beyond tolerance");
        }
    };

    auto sweep_x = [&](double h) {
        parallel_for(static_cast<std::size_t>(nv), [&](std::size_t begin, std::size_t end) {
            std::vector<double> flux;
            for (std::size_t j = begin; j < end; ++j) advect_line(f.data() + j, nv, nx, grid.v(static_cast<int>(j)), h, dx, flux);
        });
    };
    auto sweep_v = [&](double h) {
        parallel_for(static_cast<std::size_t>(nx), [&](std::size_t begin, std::size_t end) {
            std::vector<double> flux;
            for (std::size_t i = begin; i < end; ++i) advect_line(f.data() + i * nv, 1, nv, force[i], h, dv, flux);
        });
    };
    auto diffuse = [&](double h) {
        parallel_for(static_cast<std::size_t>(nx), [&](std::size_t begin, std::size_t end) {
            std::vector<double> a, b, c, r;
            for (std::size_t i = begin; i < end; ++i) diffuse_line(f.data() + i * nv, nv, vop, h, dv, opt.theta, a, b, c, r);
        });
    };

    const int steps = static_cast<int>(std::ceil(opt.t_end / opt.dt - 1e-9));
    const double dt = steps > 0 ? opt.t_end / steps : 0.0;
    record(0.0);
    for (int n = 1; n <= steps; ++n) {
        sweep_x(0.5 * dt);
        sweep_v(0.5 * dt);
        diffuse(dt);
        sweep_v(0.5 * dt);
        sweep_x(0.5 * dt);
        if (n % opt.record_every == 0 || n == steps) record(n * dt);
    }
    out.density = f;
    return out;
}

double fit_exponential_rate(const std::vector<double>& t, const std::vector<double>& y, double t_from, double t_to) {
    if (t.size() != y.size()) throw DomainError("fit_exponential_rate: size mismatch");
    double st = 0, sy = 0, stt = 0, sty = 0;
    int n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_from || t[i] > t_to) continue;
        if (!(y[i] > 0.0)) throw DomainError("fit_exponential_rate: non-positive sample");
        const double ly = std::log(y[i]);
        st += t[i];
        sy += ly;
        stt += t[i] * t[i];
        sty += t[i] * ly;
        ++n;
    }
    if (n < 2) throw DomainError("fit_exponential_rate: fewer than two samples in the window");
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    return -slope;
}

}  // namespace hypofp
