// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include "hypofp/decay.hpp"
#include "hypofp/errors.hpp"
#include "hypofp/gaussian_flow.hpp"
#include "hypofp/kinetic.hpp"
#include "hypofp/spectrum.hpp"
#include "test_util.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

using namespace hypofp;
using namespace testutil;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream note;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (!pass) note << "; ";
            note << what;
            pass = false;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Mat diag(std::initializer_list<double> v) {
    Vec d(v.size());
    int i = 0;
    for (double x : v) d(i++) = x;
    return d.asDiagonal();
}

SystemSpec worked_example() { return SystemSpec(diag({0.25, 1.0}), Mat{{0.25, -4.0}, {4.0, 1.0}}); }
SystemSpec wavy_example() { return SystemSpec(diag({1.0, 0.0}), Mat{{1.0, -1.0}, {1.0, 0.0}}); }

double lyapunov_relative_residual(const SystemSpec& s, const Mat& K) {
    const Mat r = 2.0 * s.D - s.C * K - K * s.C.transpose();
    return r.norm() / (2.0 * s.D.norm() + 2.0 * s.C.norm() * K.norm());
}

Mat random_spd_near(std::mt19937_64& rng, const Mat& K, double spread) {
    const int d = static_cast<int>(K.rows());
    const Mat r = sqrt_spd(K);
    const Mat g = random_matrix(rng, d, d, spread);
    return symmetrize(r * matrix_exponential(0.5 * (g + g.transpose()), 1.0) * r);
}

// eigenvector of P K^{-1} for its smallest eigenvalue
Vec lambda_P_direction(const Mat& K, const Mat& P) {
    const Mat r = sqrt_spd(P);
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(r * spd_inverse(K) * r));
    return (r * es.eigenvectors().col(0)).normalized();
}

// 1
Outcome worked_example_criterion() {
    Outcome o;
    const auto t0 = Clock::now();
    const SystemSpec s = worked_example();
    const SteadyState ss = steady_state(s);
    const ConditionAReport rep = check_condition_A(s);
    const double k_err = max_abs(ss.K - Mat::Identity(2, 2));
    const double res = max_abs(2.0 * s.D - s.C * ss.K - ss.K * s.C.transpose());
    o.require(k_err <= 1e-10 && res <= 1e-10, "K differs from the identity");
    const double lk = lambda_K(s.D, ss.K);
    o.require(std::abs(lk - 0.25) <= 1e-12, "lambda_K off");
    o.require(std::abs(rep.mu - 0.625) <= 1e-12, "mu off");

    const TransportMatrix tm = build_P(ss);
    const QuadratureRule q = make_quadrature(ss.K);
    const GaussianMixture f0 = GaussianMixture::gaussian(Vec{{1.0, 0.0}}, ss.K);
    const TrajectoryRecord rec =
        run_trajectory(s, ss, tm, f0, EntropyGenerator::logarithmic(), linspace(0.0, 8.0, 400), q);
    o.require(std::abs(rec.env.rate - 1.25) <= 1e-12, "envelope rate is not 2 mu");
    o.require(std::abs(rec.env.amplitude - rec.S0 / (2.0 * rec.lambda_P)) <= 1e-12 * rec.env.amplitude,
              "envelope amplitude is not S(f0)/(2 lambda_P)");
    int violations = 0;
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        if (rec.entropy[i] > rec.envelope[i] * (1.0 + 1e-9)) ++violations;
    }
    o.require(violations == 0, std::to_string(violations) + " samples above the envelope");
    const auto tangencies = find_tangencies(rec.times, rec.entropy, rec.env);
    o.require(tangencies.size() >= 3, "fewer than 3 near-tangencies");
    const double elapsed = seconds_since(t0);
    o.require(elapsed <= 5.0, "runtime above 5 s");
    o.note << (o.pass ? "" : " | ") << "lambda_K=" << lk << " mu=" << rep.mu << " samples=" << rec.times.size()
           << " tangencies=" << tangencies.size() << " runtime=" << elapsed << "s";
    return o;
}

// 2
Outcome wavy_criterion() {
    Outcome o;
    const SystemSpec s = wavy_example();
    const ConditionAReport rep = check_condition_A(s);
    const SteadyState ss = steady_state(s);
    o.require(rep.hoermander && rep.hoermander->tau == 1, "tau is not 1");
    o.require(std::abs(rep.mu - 0.5) <= 1e-12, "mu is not 1/2");
    o.require(max_abs(ss.K - Mat::Identity(2, 2)) <= 1e-10, "K differs from the identity");

    const QuadratureRule q = make_quadrature(ss.K);
    const auto log_g = EntropyGenerator::logarithmic();
    const Vec v0{{1.0, 0.0}};
    auto state = [&](double t) { return GaussianMixture::gaussian(evolve_shift(v0, t, s.C), ss.K); };
    double worst = 0.0;
    std::vector<double> ts = linspace(0.0, 10.0, 401), es;
    for (double t : ts) {
        const Vec v = evolve_shift(v0, t, s.C);
        const double e = relative_entropy(state(t), ss, log_g, q);
        worst = std::max(worst, std::abs(e - 0.5 * v.squaredNorm()));
        es.push_back(e);
    }
    o.require(worst <= 1e-8, "closed form and quadrature differ");

    // zeros of the first component of K^{-1} v(t), refined by bisection
    auto first = [&](double t) { return (ss.K_inv * evolve_shift(v0, t, s.C))(0); };
    int zeros = 0;
    double worst_rate = 0.0;
    for (std::size_t i = 1; i < ts.size(); ++i) {
        double a = ts[i - 1], b = ts[i];
        if ((first(a) > 0.0) == (first(b) > 0.0)) continue;
        for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
            const double m = 0.5 * (a + b);
            ((first(a) > 0.0) == (first(m) > 0.0) ? a : b) = m;
        }
        const double tz = 0.5 * (a + b);
        const Functionals f = evaluate_functionals(state(tz), ss, log_g, q, s.D, Mat());
        if (f.e <= 0.01) continue;
        ++zeros;
        worst_rate = std::max(worst_rate, std::abs(f.I));
    }
    o.require(zeros >= 1, "no entropy-rate zero with e > 0.01");
    o.require(worst_rate <= 1e-8, "dissipation does not vanish at the zeros");

    // non-convex: second differences change sign
    int convex = 0, concave = 0;
    for (std::size_t i = 1; i + 1 < es.size(); ++i) {
        const double d2 = es[i + 1] - 2.0 * es[i] + es[i - 1];
        (d2 > 0.0 ? convex : concave) += 1;
    }
    o.require(concave > 0 && convex > 0, "entropy curve is convex");
    o.note << (o.pass ? "" : " | ") << "tau=" << (rep.hoermander ? rep.hoermander->tau : -1) << " mu=" << rep.mu
           << " closed-form gap=" << worst << " rate zeros=" << zeros << " max|I| there=" << worst_rate
           << " concave samples=" << concave;
    return o;
}

// 3
Outcome tau_pairs_criterion() {
    Outcome o;
    const Mat d = diag({1.0, 1.0, 0.0, 0.0});
    const Mat c1t{{1, 0, -1, 0}, {0, 1, 0, -1}, {1, 0, 0, 0}, {0, 1, 0, 0}};
    const Mat c2t{{1, 0, 0, 0}, {0, 1, -1, 0}, {0, 1, 0, -1}, {0, 0, 1, 0}};
    const auto h1 = hoermander_tau(SystemSpec(d, c1t.transpose()));
    const auto h2 = hoermander_tau(SystemSpec(d, c2t.transpose()));
    o.require(h1 && h1->tau == 1, "first pair is not tau = 1");
    o.require(h2 && h2->tau == 2, "second pair is not tau = 2");
    o.note << (o.pass ? "" : " | ") << "tau1=" << (h1 ? h1->tau : -1) << " tau2=" << (h2 ? h2->tau : -1);
    return o;
}

// 4
Outcome lyapunov_criterion() {
    Outcome o;
    std::mt19937_64 rng(20240401);
    std::uniform_int_distribution<int> dim(2, 4);
    int held = 0, spd = 0;
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const int d = dim(rng);
        std::uniform_int_distribution<int> rk(1, d);
        const SystemSpec s = random_system(rng, d, rk(rng));
        const ConditionAReport rep = check_condition_A(s);
        if (!rep.holds()) continue;
        ++held;
        const SteadyState ss = steady_state(s);
        worst = std::max(worst, lyapunov_relative_residual(s, ss.K));
        if (oracle::min_sym_eig(to_oracle(ss.K)) > 0.0) ++spd;
    }
    o.require(worst <= 1e-10, "Lyapunov residual too large");
    o.require(spd == held, "K not SPD for some condition-A system");

    // C^T has an eigenvector u in ker D
    int detected = 0;
    const int constructed = 30;
    for (int k = 0; k < constructed; ++k) {
        const int d = dim(rng);
        const Vec u = random_matrix(rng, d, 1).col(0).normalized();
        const Mat proj = Mat::Identity(d, d) - u * u.transpose();
        const Mat b = proj * random_matrix(rng, d, d);
        Mat m = random_matrix(rng, d, d);
        m -= (m * u - 0.7 * u) * u.transpose();
        m += (0.3 - std::min(0.0, eigen_structure(m).min_real_part())) * Mat::Identity(d, d);
        const SystemSpec s(symmetrize(b * b.transpose()), m.transpose());
        const ConditionAReport rep = check_condition_A(s);
        bool singular = false;
        try {
            steady_state(s);
        } catch (const ConditionAError&) {
            singular = true;
        }
        if (!rep.hypoelliptic && singular) ++detected;
    }
    o.require(detected == constructed, "singular K not detected in every constructed case");
    o.note << (o.pass ? "" : " | ") << "condition-A systems=" << held << " max rel residual=" << worst
           << " singular detected=" << detected << "/" << constructed;
    return o;
}

SystemSpec random_defective_system(std::mt19937_64& rng, int d) {
    std::uniform_real_distribution<double> u(0.2, 1.0);
    const double mu = u(rng);
    Mat j = Mat::Zero(d, d);
    j(0, 0) = j(1, 1) = mu;
    j(0, 1) = 1.0;
    for (int i = 2; i < d; ++i) j(i, i) = mu + 0.5 + u(rng);
    const Mat t = Mat::Identity(d, d) + random_matrix(rng, d, d, 0.3);
    const Mat c = t * j * t.inverse();
    const Mat b = random_matrix(rng, d, d);
    return SystemSpec(symmetrize(b * b.transpose()), c);
}

// 5
Outcome p_inequality_criterion() {
    Outcome o;
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<int> dim(2, 4);
    int total = 0, defective = 0, passed = 0, simple = 0, inflated_negative = 0;
    double worst = 0.0;
    while (total < 200) {
        const int d = dim(rng);
        const bool make_defective = defective < 25 && total % 8 == 0;
        std::uniform_int_distribution<int> rk(1, d);
        const SystemSpec s = make_defective ? random_defective_system(rng, d) : random_system(rng, d, rk(rng));
        const ConditionAReport rep = check_condition_A(s);
        if (!rep.holds()) continue;
        if (make_defective && !rep.minimal_defective) continue;
        const SteadyState ss = steady_state(s);
        const TransportMatrix tm = build_P(ss);
        const double margin = verify_P(ss, tm.P, tm.kappa);
        ++total;
        if (rep.minimal_defective) {
            ++defective;
            o.require(std::abs(tm.epsilon - 1e-2 * tm.mu) <= 1e-12 * tm.mu, "epsilon is not 1e-2 mu");
        }
        worst = std::min(worst, margin / norm2(tm.P));
        if (margin >= -kMarginTolerance * norm2(tm.P)) ++passed;
        if (!rep.minimal_defective) {
            const EigenStructure eig = eigen_structure(ss.Q, kDefectTolerance);
            bool all_simple = true;
            for (const auto& c : eig.clusters) {
                if (c.value.real() - eig.min_real_part() <= eig.tolerance && c.algebraic > 1) all_simple = false;
            }
            if (all_simple) {
                ++simple;
                if (verify_P(ss, tm.P, 1.001 * tm.mu) < 0.0) ++inflated_negative;
            }
        }
    }
    o.require(defective >= 20, "fewer than 20 defective cases");
    o.require(passed == total, std::to_string(total - passed) + " margins below tolerance");
    o.require(inflated_negative >= 0.95 * simple, "inflated kappa not rejected often enough");
    o.note << (o.pass ? "" : " | ") << "systems=" << total << " defective=" << defective << " min margin/|P|=" << worst
           << " inflated rejected=" << inflated_negative << "/" << simple;
    return o;
}

// 6
Outcome spectrum_criterion() {
    Outcome o;
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> dim(1, 3);
    int tested = 0;
    double worst = 0.0, worst_gap = 0.0;
    while (tested < 50) {
        const int d = dim(rng);
        std::uniform_int_distribution<int> rk(1, d);
        const SystemSpec s = random_system(rng, d, rk(rng));
        const ConditionAReport rep = check_condition_A(s);
        if (!rep.holds() || rep.minimal_defective) continue;
        const SteadyState ss = steady_state(s);
        const int m = 4;
        std::vector<Complex> want;
        for (const auto& e : enumerate_spectrum(rep.eig_c, m)) want.push_back(e.value);
        const std::vector<Complex> got = poly_operator_eigenvalues(poly_operator_matrix(s, ss, m));
        worst = std::max(worst, match_multisets(got, want));
        double gap = std::numeric_limits<double>::infinity();
        bool zero_seen = false;
        for (const Complex& z : got) {
            if (!zero_seen && std::abs(z) < 1e-9) {
                zero_seen = true;
                continue;
            }
            gap = std::min(gap, -z.real());
        }
        worst_gap = std::max(worst_gap, std::abs(gap - rep.mu));
        ++tested;
    }
    o.require(worst <= 1e-6, "multiset mismatch");
    o.require(worst_gap <= 1e-10, "spectral gap differs from mu");

    // Ornstein-Uhlenbeck: C = D = K = Id
    for (int d = 1; d <= 3; ++d) {
        const SystemSpec s(Mat::Identity(d, d), Mat::Identity(d, d));
        const SteadyState ss = steady_state(s);
        const auto got = poly_operator_eigenvalues(poly_operator_matrix(s, ss, 4));
        for (int k = 0; k <= 4; ++k) {
            int count = 0;
            for (const Complex& z : got) count += std::abs(z + double(k)) < 1e-12;
            const int expected = static_cast<int>(multi_indices(d, k).size());
            o.require(count == expected, "OU multiplicity of -" + std::to_string(k) + " wrong in d=" + std::to_string(d));
        }
    }
    o.note << (o.pass ? "" : " | ") << "systems=" << tested << " max distance=" << worst
           << " max gap error=" << worst_gap;
    return o;
}

// 7
Outcome convex_sobolev_criterion() {
    Outcome o;
    std::mt19937_64 rng(99);
    const auto log_g = EntropyGenerator::logarithmic();
    const auto quad_g = EntropyGenerator::quadratic();
    int systems = 0, states = 0;
    double worst_ratio = 0.0, worst_eq = 0.0;
    while (systems < 4) {
        const SystemSpec s = random_system(rng, 2, 1 + systems % 2);
        if ((s.C - s.C.transpose()).norm() < 1e-3 * s.C.norm()) continue;
        const ConditionAReport rep = check_condition_A(s);
        if (!rep.holds()) continue;
        const SteadyState ss = steady_state(s);
        const TransportMatrix tm = build_P(ss);
        const double lp = lambda_P(ss.K, tm.P);
        const QuadratureRule q = make_quadrature(ss.K);
        std::uniform_real_distribution<double> u(0.2, 0.8);
        for (int k = 0; k < 50; ++k) {
            GaussianMixture f;
            const double w = u(rng);
            const Mat kr = sqrt_spd(ss.K);
            f.components.push_back({w, kr * random_matrix(rng, 2, 1, 0.5), random_spd_near(rng, ss.K, 0.15), Vec()});
            f.components.push_back({1.0 - w, kr * random_matrix(rng, 2, 1, 0.5), random_spd_near(rng, ss.K, 0.15), Vec()});
            for (const auto* g : {&log_g, &quad_g}) {
                const Functionals fn = evaluate_functionals(f, ss, *g, q, Mat(), tm.P);
                worst_ratio = std::max(worst_ratio, fn.e / (fn.S / (2.0 * lp)));
                ++states;
            }
        }
        // equality cases
        const Vec v0 = lambda_P_direction(ss.K, tm.P);
        const Functionals fl = evaluate_functionals(GaussianMixture::gaussian(v0, ss.K), ss, log_g, q, Mat(), tm.P);
        const Functionals fq =
            evaluate_functionals(GaussianMixture::linear_perturbation(ss.K, 0.3 * v0), ss, quad_g, q, Mat(), tm.P);
        for (const Functionals& fn : {fl, fq}) worst_eq = std::max(worst_eq, std::abs(fn.e / (fn.S / (2.0 * lp)) - 1.0));
        ++systems;
    }
    o.require(worst_ratio <= 1.0 + 1e-6, "convex Sobolev inequality violated");
    o.require(worst_eq <= 1e-6, "equality case off");
    o.note << (o.pass ? "" : " | ") << "systems=" << systems << " evaluations=" << states
           << " max e/(S/2lambda_P)=" << worst_ratio << " equality error=" << worst_eq;
    return o;
}

// 8
Outcome sharpness_criterion() {
    Outcome o;
    const auto log_g = EntropyGenerator::logarithmic();
    auto entropy_along = [&](const SystemSpec& s, const SteadyState& ss, const Vec& v0, double t,
                             const QuadratureRule& q) {
        return relative_entropy(GaussianMixture::gaussian(evolve_shift(v0, t, s.C), ss.K), ss, log_g, q);
    };

    // (i) real minimal eigenvalue
    double drift = 0.0;
    {
        const SystemSpec s(diag({1.0, 1.0, 0.0}), Mat{{1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, {0.0, 1.0, 3.0}});
        const SteadyState ss = steady_state(s);
        const SharpnessScenario sc = sharpness_scenario(ScenarioKind::RealEigenvalue, s, ss, check_condition_A(s).eig_c);
        const QuadratureRule q = make_quadrature(ss.K, 32);
        const double ref = entropy_along(s, ss, sc.v0, 0.0, q);
        for (double t : linspace(0.0, 4.0, 41)) {
            drift = std::max(drift, std::abs(entropy_along(s, ss, sc.v0, t, q) * std::exp(2.0 * sc.mu * t) - ref));
        }
        o.require(drift <= 1e-10, "real case: e exp(2 mu t) not constant");
    }

    // (ii) complex pair
    double period_err = 1.0;
    {
        const SystemSpec s = worked_example();
        const SteadyState ss = steady_state(s);
        const SharpnessScenario sc = sharpness_scenario(ScenarioKind::ComplexPair, s, ss, check_condition_A(s).eig_c);
        const QuadratureRule q = make_quadrature(ss.K, 32);
        const std::vector<double> ts = linspace(0.0, 6.0, 1201);
        std::vector<double> e;
        for (double t : ts) e.push_back(entropy_along(s, ss, sc.v0, t, q));
        const Envelope env{sc.peak, 2.0 * sc.mu};
        const auto tg = find_tangencies(ts, e, env, [&](double t) { return entropy_along(s, ss, sc.v0, t, q); });
        if (tg.size() >= 2) {
            const double measured = (tg.back().t - tg.front().t) / double(tg.size() - 1);
            period_err = std::abs(measured / (std::numbers::pi / sc.omega) - 1.0);
        }
        o.require(tg.size() >= 2 && period_err <= 1e-2, "complex case: period off");
    }

    // (iii) defective minimal eigenvalue
    double resid = 1.0;
    {
        const SystemSpec s(diag({1.0, 0.0}), Mat{{1.0, 0.0}, {1.0, 1.0}});
        const SteadyState ss = steady_state(s);
        const SharpnessScenario sc = sharpness_scenario(ScenarioKind::Defective, s, ss, check_condition_A(s).eig_c);
        const QuadratureRule q = make_quadrature(ss.K, 32);
        const std::vector<double> ts = linspace(0.0, 4.0, 41);
        Mat a(ts.size(), 3);
        Vec y(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            a.row(i) << 1.0, ts[i], ts[i] * ts[i];
            y(i) = entropy_along(s, ss, sc.v0, ts[i], q) * std::exp(2.0 * sc.mu * ts[i]);
        }
        resid = (a * a.colPivHouseholderQr().solve(y) - y).cwiseAbs().maxCoeff();
        o.require(resid <= 1e-8, "defective case: not quadratic");
    }
    o.note << (o.pass ? "" : " | ") << "real drift=" << drift << " period rel error=" << period_err
           << " quadratic residual=" << resid;
    return o;
}

// 9
Outcome s_decay_criterion() {
    Outcome o;
    double worst = 0.0;
    for (const auto& [s, v0, t_end] : {std::tuple{worked_example(), Vec{{1.0, 0.0}}, 8.0},
                                       std::tuple{wavy_example(), Vec{{1.0, 0.0}}, 10.0}}) {
        const SteadyState ss = steady_state(s);
        const TransportMatrix tm = build_P(ss);
        const TrajectoryRecord rec = run_trajectory(s, ss, tm, GaussianMixture::gaussian(v0, ss.K),
                                                    EntropyGenerator::logarithmic(), linspace(0.0, t_end, 400),
                                                    make_quadrature(ss.K));
        for (std::size_t i = 0; i < rec.times.size(); ++i) {
            const double bound = rec.S0 * std::exp(-2.0 * tm.kappa * rec.times[i]);
            worst = std::max(worst, rec.modified[i] / bound);
        }
    }
    o.require(worst <= 1.0 + 1e-4, "S exceeds its exponential bound");

    const SystemSpec s = wavy_example();
    const SteadyState ss = steady_state(s);
    const TransportMatrix tm = build_P(ss);
    const int tau = hoermander_tau(s)->tau;
    std::vector<double> sups;
    for (double delta : {1e-1, 1e-2, 1e-3}) {
        const Mat a0 = delta * delta * ss.K;
        const double e0 = entropy_log_cov(a0, ss.K);
        double sup = 0.0;
        for (double lt = -4.0; lt <= 0.0; lt += 0.01) {
            const double t = std::pow(10.0, lt);
            const Functionals f = log_functionals_gaussian(Vec::Zero(2), evolve_cov(a0, t, s.C, ss.K), ss.K, Mat(), tm.P);
            sup = std::max(sup, std::pow(t, 2 * tau + 1) * f.S / e0);
        }
        sups.push_back(sup);
    }
    const double ratio = *std::max_element(sups.begin(), sups.end()) / *std::min_element(sups.begin(), sups.end());
    o.require(ratio < 10.0, "regularisation scaling ratio too large");
    o.note << (o.pass ? "" : " | ") << "max S/bound=" << worst << " scaling ratio=" << ratio;
    return o;
}

double gaussian2(double x, double v, const Vec& m, const Mat& a) {
    const double det = a.determinant();
    const double dx = x - m(0), dv = v - m(1);
    const double q = (a(1, 1) * dx * dx - 2.0 * a(0, 1) * dx * dv + a(0, 0) * dv * dv) / det;
    return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(det));
}

// 10
Outcome kinetic_criterion() {
    Outcome o;
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> u(0.2, 4.0);
    double worst_kappa = 0.0;
    for (int k = 0; k < 20;) {
        KineticSpec ks;
        ks.nu = u(rng);
        ks.sigma = u(rng);
        ks.omega0 = u(rng);
        if (std::abs(ks.nu * ks.nu - 4.0 * ks.omega0 * ks.omega0) < 1e-2) continue;
        worst_kappa = std::max(worst_kappa, std::abs(kappa0(ks.nu, ks.omega0) - check_condition_A(assemble_linear(ks)).mu));
        ++k;
    }
    o.require(worst_kappa <= 1e-10, "kappa0 differs from mu");

    double worst_margin = 0.0, worst_edge = 0.0;
    for (auto [nu, om] : {std::pair{1.0, 1.0}, std::pair{5.0, 2.0}}) {
        KineticSpec ks;
        ks.nu = nu;
        ks.omega0 = om;
        const SteadyState ss = steady_state(assemble_linear(ks));
        const Mat P = build_P_kinetic(nu, om);
        worst_margin = std::min(worst_margin, verify_P(ss, P, kappa0(nu, om)) / norm2(P));
        const double b = perturbation_bound(P, 1.0);
        worst_edge = std::max(worst_edge, std::abs(min_sym_eigenvalue(perturbed_form(P, b, 1.0))));
    }
    o.require(worst_margin >= -kMarginTolerance, "kinetic P fails at kappa0");
    o.require(worst_edge <= 1e-10, "perturbation bound is not sharp");

    const auto t0 = Clock::now();
    KineticSpec ks;
    const SystemSpec lin = assemble_linear(ks);
    const SteadyState ss = steady_state(lin);
    PhaseGrid grid;
    grid.nx = grid.nv = 256;
    const Vec m0{{1.0, -0.5}};
    const Mat a0{{0.5, 0.1}, {0.1, 0.4}};
    FdOptions opt;
    opt.t_end = 5.0;
    opt.dt = 0.01;
    opt.record_every = 50;
    const FdSeries fs = fd_simulate(ks, grid, [&](double x, double v) { return gaussian2(x, v, m0, a0); }, opt,
                                    EntropyGenerator::logarithmic(), build_P_kinetic(1.0, 1.0));
    const Vec mt = evolve_shift(m0, opt.t_end, lin.C);
    const Mat at = evolve_cov(a0, opt.t_end, lin.C, ss.K);
    const double l2 = grid_l2_distance(grid, fs.density, [&](double x, double v) { return gaussian2(x, v, mt, at); });
    const double fd_time = seconds_since(t0);
    o.require(l2 <= 5e-3, "FD solution too far from the exact one");
    o.require(fd_time <= 60.0, "FD runtime above 60 s");

    KineticSpec pert;
    pert.potential.kind = PotentialKind::Cosine;
    pert.potential.epsilon = 0.2;
    pert.vtilde_dd_bound = 0.2;
    const KineticCertificate cert = kinetic_rate(pert);
    PhaseGrid g2;
    g2.x_min = g2.v_min = -7.0;
    g2.x_max = g2.v_max = 7.0;
    g2.nx = g2.nv = 160;
    FdOptions o2;
    o2.t_end = 8.0;
    o2.dt = 0.02;
    o2.record_every = 5;
    const Vec p0{{1.5, 0.0}};
    const Mat pa{{0.5, 0.0}, {0.0, 0.5}};
    const FdSeries ps = fd_simulate(pert, g2, [&](double x, double v) { return gaussian2(x, v, p0, pa); }, o2,
                                    EntropyGenerator::logarithmic(), cert.P);
    const double fitted = fit_exponential_rate(ps.t, ps.modified, o2.t_end / 2, o2.t_end);
    o.require(fitted >= 0.9 * cert.rate, "fitted S decay rate below 0.9 of the certified rate");
    o.note << (o.pass ? "" : " | ") << "max |kappa0-mu|=" << worst_kappa << " min margin/|P|=" << worst_margin
           << " edge eig=" << worst_edge << " L2=" << l2 << " FD runtime=" << fd_time << "s fitted rate=" << fitted
           << " certified=" << cert.rate;
    return o;
}

// 11
Outcome counterexample_criterion() {
    Outcome o;
    const SystemSpec s(diag({1.0, 1.0, 0.0}), Mat{{1.0, 0.0, 0.0}, {0.0, 2.0, 0.0}, {0.0, 1.0, 3.0}});
    const Mat k_printed{{1.0, 0.0, 0.0}, {0.0, 0.5, -0.1}, {0.0, -0.1, 1.0 / 30.0}};
    const Mat p_printed{{2.0, 0.0, 0.0}, {0.0, 61.0, -11.0}, {0.0, -11.0, 2.0}};
    const ConditionAReport rep = check_condition_A(s);
    const SteadyState ss = steady_state(s);
    o.require(std::abs(rep.mu - 1.0) <= 1e-12, "mu is not 1");
    o.require(max_abs(ss.K - k_printed) <= 1e-10, "K differs from the printed matrix");
    const double margin = verify_P(ss, p_printed, 1.0);
    o.require(margin >= -1e-8, "printed P fails at kappa = 1");

    const Vec v0 = lambda_P_direction(ss.K, p_printed);
    const QuadratureRule q = make_quadrature(ss.K, 32);
    std::vector<double> ts = linspace(0.0, 4.0, 81), es;
    for (double t : ts) {
        es.push_back(relative_entropy(GaussianMixture::gaussian(evolve_shift(v0, t, s.C), ss.K), ss,
                                      EntropyGenerator::logarithmic(), q));
    }
    const double fitted = fit_exponential_rate(ts, es, 2.0, 4.0);
    o.require(fitted >= 2.0 * 2.0 * 0.99, "lambda_P direction does not decay at rate 2 mu_2");
    o.note << (o.pass ? "" : " | ") << "mu=" << rep.mu << " margin=" << margin << " fitted rate=" << fitted;
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<int, std::function<Outcome()>>> criteria = {
        {1, worked_example_criterion}, {2, wavy_criterion},         {3, tau_pairs_criterion},
        {4, lyapunov_criterion},       {5, p_inequality_criterion}, {6, spectrum_criterion},
        {7, convex_sobolev_criterion}, {8, sharpness_criterion},    {9, s_decay_criterion},
        {10, kinetic_criterion},       {11, counterexample_criterion},
    };
    int failures = 0;
    for (const auto& [id, fn] : criteria) {
        bool pass = false;
        std::string note;
        try {
            Outcome o = fn();
            pass = o.pass;
            note = o.note.str();
        } catch (const std::exception& e) {
            note = std::string("exception: ") + e.what();
        }
        failures += !pass;
        std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", note.c_str());
        std::fflush(stdout);
    }
    return failures;
}
