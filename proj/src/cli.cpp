#include "hypofp/cli.hpp"

#include "hypofp/decay.hpp"
#include "hypofp/errors.hpp"
#include "hypofp/gaussian_flow.hpp"
#include "hypofp/io.hpp"
#include "hypofp/spectrum.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace hypofp {

using nlohmann::json;

namespace {

Mat to_matrix(const json& j, const char* what) {
    if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + ": expected a non-empty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j.at(0).size();
    Mat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols) throw ConfigError(std::string(what) + ": ragged matrix");
        for (std::size_t k = 0; k < cols; ++k) {
            if (!j[i][k].is_number()) throw ConfigError(std::string(what) + ": entries must be numbers");
            m(i, k) = j[i][k].get<double>();
        }
    }
    return m;
}

Vec to_vector(const json& j, const char* what) {
    if (!j.is_array()) throw ConfigError(std::string(what) + ": expected an array");
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError(std::string(what) + ": entries must be numbers");
        v(i) = j[i].get<double>();
    }
    return v;
}

json from_matrix(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
        rows.push_back(r);
    }
    return rows;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    return j.at(key).get<T>();
}

EntropyGenerator parse_entropy(const json& j) {
    const std::string kind = get_or<std::string>(j, "kind", "logarithmic");
    const double alpha = get_or<double>(j, "alpha", 1.0);
    try {
        if (kind == "logarithmic" || kind == "log") return EntropyGenerator::logarithmic(alpha, get_or<double>(j, "beta", 0.0));
        if (kind == "quadratic") return EntropyGenerator::quadratic(alpha);
        if (kind == "power") {
            return EntropyGenerator::power(get_or<double>(j, "p", 1.5), alpha, get_or<double>(j, "beta", 0.0));
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("entropy: ") + e.what());
    }
    throw ConfigError("entropy: unknown kind '" + kind + "'");
}

std::vector<ComponentConfig> parse_initial(const json& j) {
    std::vector<ComponentConfig> out;
    if (j.contains("shift")) {
        ComponentConfig c;
        c.mean = to_vector(j.at("shift"), "initial.shift");
        out.push_back(c);
        return out;
    }
    if (!j.contains("components")) throw ConfigError("initial: expected 'shift' or 'components'");
    for (const auto& cj : j.at("components")) {
        ComponentConfig c;
        c.weight = get_or<double>(cj, "weight", 1.0);
        if (!cj.contains("mean")) throw ConfigError("initial: component without mean");
        c.mean = to_vector(cj.at("mean"), "initial.mean");
        if (cj.contains("cov")) c.cov = to_matrix(cj.at("cov"), "initial.cov");
        if (cj.contains("affine")) c.affine = to_vector(cj.at("affine"), "initial.affine");
        out.push_back(std::move(c));
    }
    if (out.empty()) throw ConfigError("initial: no components");
    return out;
}

Potential parse_potential(const json& j) {
    Potential p;
    const std::string kind = get_or<std::string>(j, "kind", "quadratic");
    if (kind == "quadratic") {
        p.kind = PotentialKind::Quadratic;
    } else if (kind == "cosine") {
        p.kind = PotentialKind::Cosine;
        p.epsilon = get_or<double>(j, "epsilon", 0.0);
    } else if (kind == "polynomial") {
        p.kind = PotentialKind::Polynomial;
        for (const auto& c : j.at("coefficients")) p.coefficients.push_back(c.get<double>());
    } else {
        throw ConfigError("kinetic.potential: unknown kind '" + kind + "'");
    }
    return p;
}

KineticConfig parse_kinetic(const json& j) {
    KineticConfig k;
    k.spec.nu = get_or<double>(j, "nu", 1.0);
    k.spec.sigma = get_or<double>(j, "sigma", 1.0);
    k.spec.omega0 = get_or<double>(j, "omega0", 1.0);
    if (j.contains("potential")) k.spec.potential = parse_potential(j.at("potential"));
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        if (g.contains("x_range")) {
            k.grid.x_min = g.at("x_range").at(0).get<double>();
            k.grid.x_max = g.at("x_range").at(1).get<double>();
        }
        if (g.contains("v_range")) {
            k.grid.v_min = g.at("v_range").at(0).get<double>();
            k.grid.v_max = g.at("v_range").at(1).get<double>();
        }
        k.grid.nx = get_or<int>(g, "nx", k.grid.nx);
        k.grid.nv = get_or<int>(g, "nv", k.grid.nv);
    }
    if (j.contains("vtilde_dd_bound")) {
        k.spec.vtilde_dd_bound = j.at("vtilde_dd_bound").get<double>();
    } else {
        double bound = 0.0;
        if (k.spec.potential.kind == PotentialKind::Cosine) {
            bound = std::abs(k.spec.potential.epsilon);
        } else if (k.spec.potential.kind == PotentialKind::Polynomial) {
            for (int i = 0; i <= 4000; ++i) {
                const double x = k.grid.x_min + (k.grid.x_max - k.grid.x_min) * i / 4000.0;
                bound = std::max(bound, std::abs(k.spec.potential.d2(x)));
            }
        }
        k.spec.vtilde_dd_bound = bound;
    }
    k.fd.t_end = get_or<double>(j, "t_end", 5.0);
    k.fd.dt = get_or<double>(j, "dt", 0.01);
    k.fd.record_every = get_or<int>(j, "record_every", 1);
    k.fd.theta = get_or<double>(j, "theta", 0.5);
    k.simulate = get_or<bool>(j, "simulate", true);
    if (j.contains("initial")) {
        const json& i = j.at("initial");
        if (i.contains("mean")) k.initial_mean = to_vector(i.at("mean"), "kinetic.initial.mean");
        if (i.contains("cov")) k.initial_cov = to_matrix(i.at("cov"), "kinetic.initial.cov");
    }
    if (k.initial_mean.size() != 2) throw ConfigError("kinetic.initial.mean must have two entries");
    return k;
}

const char* construction_name(PConstruction c) {
    switch (c) {
        case PConstruction::EigenSum: return "eigen-sum";
        case PConstruction::Jordan: return "jordan";
        case PConstruction::Supplied: return "supplied";
    }
    return "";
}

ConditionAReport require_condition_A(const SystemSpec& s, const RunConfig& cfg) {
    ConditionAReport r = check_condition_A(s, cfg.cluster_tolerance);
    if (!r.holds()) throw ConditionAError(r.failure());
    return r;
}

GaussianMixture initial_mixture(const RunConfig& cfg, const SteadyState& ss) {
    if (cfg.initial.empty()) throw ConfigError("this subcommand needs an 'initial' state");
    GaussianMixture m;
    for (const auto& c : cfg.initial) {
        if (c.mean.size() != ss.K.rows()) throw ConfigError("initial: mean has the wrong dimension");
        m.components.push_back({c.weight, c.mean, c.cov ? *c.cov : ss.K, c.affine});
    }
    try {
        m.validate();
    } catch (const DomainError& e) {
        throw ConfigError(std::string("initial: ") + e.what());
    }
    if (m.is_signed() && !cfg.entropy.allows_signed()) {
        throw ConfigError("initial: negative weights or affine factors need the quadratic entropy");
    }
    return m;
}

TransportMatrix make_transport(const RunConfig& cfg, const SteadyState& ss, const SystemSpec& s,
                               const GaussianMixture* f0, const QuadratureRule* q) {
    const EigenStructure eig = eigen_structure(ss.Q, cfg.cluster_tolerance);
    const double mu = eig.min_real_part();
    const double eps = cfg.epsilon ? *cfg.epsilon : kDefaultEpsilonFraction * mu;
    bool defective = false;
    for (const auto& c : eig.clusters) {
        if (c.value.real() - mu <= std::max(eig.tolerance, 1e-12 * std::abs(c.value)) && c.defective()) defective = true;
    }
    const double used_eps = defective ? eps : 0.0;
    if (cfg.optimize_weights && f0 && q) {
        auto amplitude = [&](const TransportMatrix& tm) {
            const double S0 = evaluate_functionals(*f0, ss, cfg.entropy, *q, Mat(), tm.P).S;
            return S0 / (2.0 * lambda_P(ss.K, tm.P));
        };
        (void)s;
        return optimize_weights(ss, eig, used_eps, amplitude);
    }
    return build_P(ss, eig, used_eps, cfg.weights);
}

json eigen_json(const EigenStructure& eig) {
    json a = json::array();
    for (const auto& c : eig.clusters) {
        a.push_back({{"re", c.value.real()},
                     {"im", c.value.imag()},
                     {"algebraic", c.algebraic},
                     {"geometric", c.geometric}});
    }
    return a;
}

std::filesystem::path out_file(const RunConfig& cfg, const std::string& name) {
    return std::filesystem::path(cfg.output_path) / name;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int do_analyze(const RunConfig& cfg, std::ostream& log) {
    const SystemSpec s = cfg.system();
    const ConditionAReport rep = require_condition_A(s, cfg);
    const SteadyState ss = steady_state(s);
    std::optional<GaussianMixture> f0;
    std::optional<QuadratureRule> q;
    if (!cfg.initial.empty()) {
        f0 = initial_mixture(cfg, ss);
        q = make_quadrature(ss.K, cfg.quadrature_order);
    }
    const TransportMatrix tm = make_transport(cfg, ss, s, f0 ? &*f0 : nullptr, q ? &*q : nullptr);
    std::optional<double> S0;
    if (f0) S0 = evaluate_functionals(*f0, ss, cfg.entropy, *q, Mat(), tm.P).S;
    const DecayCertificate cert = certify(s, ss, tm, S0);

    json ca = {{"holds", rep.holds()},
               {"hypoelliptic", rep.hypoelliptic},
               {"rank_D", rep.rank_d},
               {"positively_stable", rep.positively_stable},
               {"mu", rep.mu},
               {"minimal_defective", rep.minimal_defective},
               {"eigenvalues_C", eigen_json(rep.eig_c)}};
    if (rep.hoermander) {
        ca["tau"] = rep.hoermander->tau;
        ca["hoermander_kappa"] = rep.hoermander->kappa;
    }
    const Mat resid = 2.0 * s.D - s.C * ss.K - ss.K * s.C.transpose();
    json st = {{"K", from_matrix(ss.K)},
               {"cK", ss.cK},
               {"R", from_matrix(ss.R)},
               {"Q", from_matrix(ss.Q)},
               {"lyapunov_residual", resid.cwiseAbs().maxCoeff()}};
    json ce = {{"P", from_matrix(tm.P)},
               {"construction", construction_name(tm.construction)},
               {"weights", tm.weights},
               {"mu", cert.mu},
               {"epsilon", cert.epsilon},
               {"kappa", tm.kappa},
               {"margin", cert.margin},
               {"lambda_P", cert.lambda_P}};
    if (cert.lambda_K) ce["lambda_K"] = *cert.lambda_K;
    if (cert.cond_sq_bound) ce["cond_sq_bound"] = *cert.cond_sq_bound;
    if (cert.envelope) {
        ce["S0"] = *S0;
        ce["envelope"] = {{"amplitude", cert.envelope->amplitude}, {"rate", cert.envelope->rate}};
    }
    json doc = {{"condition_A", ca}, {"steady_state", st}, {"certificate", ce}};
    write_text(out_file(cfg, "analysis.json"), dump(doc));
    log << "analyze: mu = " << format_double(cert.mu) << ", lambda_P = " << format_double(cert.lambda_P)
        << ", margin = " << format_double(cert.margin) << "\n";
    return kExitOk;
}

int do_evolve(const RunConfig& cfg, std::ostream& log) {
    const SystemSpec s = cfg.system();
    require_condition_A(s, cfg);
    const SteadyState ss = steady_state(s);
    const GaussianMixture f0 = initial_mixture(cfg, ss);
    const QuadratureRule q = make_quadrature(ss.K, cfg.quadrature_order);
    const TransportMatrix tm = make_transport(cfg, ss, s, &f0, &q);
    const DecayCertificate cert = certify(s, ss, tm);
    (void)cert;
    const std::vector<double> times = linspace(0.0, cfg.t_end, cfg.samples);
    const TrajectoryRecord rec = run_trajectory(s, ss, tm, f0, cfg.entropy, times, q);
    const auto tangencies = find_tangencies(rec.times, rec.entropy, rec.env);

    if (cfg.format == "json") {
        json tj = json::array();
        for (const auto& t : tangencies) tj.push_back({{"t", t.t}, {"gap", t.gap}});
        json doc = {{"t", rec.times},
                    {"e_psi", rec.entropy},
                    {"I_psi", rec.dissipation},
                    {"S_psi", rec.modified},
                    {"envelope", rec.envelope},
                    {"amplitude", rec.env.amplitude},
                    {"rate", rec.env.rate},
                    {"lambda_P", rec.lambda_P},
                    {"S0", rec.S0},
                    {"tangencies", tj}};
        write_text(out_file(cfg, "trajectory.json"), dump(doc));
    } else {
        CsvTable csv;
        csv.header = {"t", "e_psi", "I_psi", "S_psi", "envelope"};
        for (std::size_t i = 0; i < rec.times.size(); ++i) {
            csv.add_row({rec.times[i], rec.entropy[i], rec.dissipation[i], rec.modified[i], rec.envelope[i]});
        }
        write_text(out_file(cfg, "trajectory.csv"), csv.str());
    }
    if (cfg.plot == "svg") {
        const std::string svg = svg_line_plot("Entropy decay", "t",
                                              {{"e_psi", rec.times, rec.entropy},
                                               {"I_psi", rec.times, rec.dissipation},
                                               {"envelope", rec.times, rec.envelope}},
                                              true);
        write_text(out_file(cfg, "trajectory.svg"), svg);
    }
    log << "evolve: " << rec.times.size() << " samples, envelope " << format_double(rec.env.amplitude)
        << " exp(-" << format_double(rec.env.rate) << " t), " << tangencies.size() << " tangencies, "
        << (rec.dominated() ? "dominated" : "NOT dominated") << "\n";
    if (!rec.dominated()) throw CertificateError("evolve: entropy exceeds the certified envelope");
    return kExitOk;
}

int do_spectrum(const RunConfig& cfg, std::ostream& log) {
    const SystemSpec s = cfg.system();
    const ConditionAReport rep = require_condition_A(s, cfg);
    const SteadyState ss = steady_state(s);
    const auto entries = enumerate_spectrum(rep.eig_c, cfg.m_max);
    std::optional<double> mismatch;
    try {
        const PolyOperatorMatrix pm = poly_operator_matrix(s, ss, cfg.m_max);
        std::vector<Complex> want;
        for (const auto& e : entries) want.push_back(e.value);
        mismatch = match_multisets(poly_operator_eigenvalues(pm), want);
    } catch (const DomainError&) {
        // basis too large for the cross-check
    }
    auto alpha_text = [](const MultiIndex& a) {
        std::string s;
        for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ";" : "") + std::to_string(a[i]);
        return s;
    };
    if (cfg.format == "json") {
        json arr = json::array();
        for (const auto& e : entries) {
            arr.push_back({{"re", e.value.real()}, {"im", e.value.imag()}, {"alpha", e.alpha}, {"degree", e.degree}});
        }
        json doc = {{"spectrum", arr}};
        if (mismatch) doc["poly_operator_mismatch"] = *mismatch;
        write_text(out_file(cfg, "spectrum.json"), dump(doc));
    } else {
        CsvTable csv;
        csv.header = {"re", "im", "alpha", "degree"};
        for (const auto& e : entries) {
            csv.rows.push_back({format_double(e.value.real()), format_double(e.value.imag()), alpha_text(e.alpha),
                                std::to_string(e.degree)});
        }
        write_text(out_file(cfg, "spectrum.csv"), csv.str());
    }
    log << "spectrum: " << entries.size() << " eigenvalues up to degree " << cfg.m_max;
    if (mismatch) log << ", polynomial operator mismatch " << format_double(*mismatch);
    log << "\n";
    return kExitOk;
}

int do_kinetic(const RunConfig& cfg, std::ostream& log) {
    if (!cfg.kinetic) throw ConfigError("kinetic: missing 'kinetic' section");
    const KineticConfig& kc = *cfg.kinetic;
    const KineticCertificate cert = kinetic_rate(kc.spec, kc.grid.x_min, kc.grid.x_max);
    const double w2 = kc.spec.omega0 * kc.spec.omega0;
    const Mat k_lin = (kc.spec.sigma / kc.spec.nu) * Vec(Eigen::Vector2d(1.0 / w2, 1.0)).asDiagonal().toDenseMatrix();
    json doc = {{"kappa0", cert.kappa0},
                {"P", from_matrix(cert.P)},
                {"lambda", cert.lambda},
                {"rate", cert.rate},
                {"regime", cert.regime == DampingRegime::Underdamped ? "underdamped" : "overdamped"},
                {"min_margin", cert.min_margin},
                {"vtilde_dd_bound", kc.spec.vtilde_dd_bound}};
    std::optional<SystemSpec> lin;
    std::optional<SteadyState> lin_ss;
    if (kc.spec.potential.trivial()) {
        lin = assemble_linear(kc.spec);
        const ConditionAReport rep = require_condition_A(*lin, cfg);
        lin_ss = steady_state(*lin);
        doc["assembled_mu"] = rep.mu;
        doc["assembled_tau"] = rep.hoermander ? rep.hoermander->tau : -1;
        doc["assembled_margin"] = verify_P(*lin_ss, cert.P, cert.kappa0);
    }
    if (kc.simulate) {
        const Mat cov = kc.initial_cov ? *kc.initial_cov : k_lin;
        const GaussianMixture g0 = GaussianMixture::gaussian(kc.initial_mean, cov);
        g0.validate();
        auto f0 = [&](double x, double v) { return g0.density(Vec(Eigen::Vector2d(x, v))); };
        const FdSeries series = fd_simulate(kc.spec, kc.grid, f0, kc.fd, cfg.entropy, cert.P);
        const double t_end = series.t.back();
        try {
            doc["fitted_rate_S"] = fit_exponential_rate(series.t, series.modified, 0.5 * t_end, t_end);
        } catch (const DomainError&) {
            doc["fitted_rate_S"] = nullptr;
        }
        if (lin) {
            const GaussianMixture ft = evolve_mixture(g0, t_end, lin->C, lin_ss->K);
            doc["l2_error_vs_exact"] = grid_l2_distance(
                series.grid, series.density, [&](double x, double v) { return ft.density(Vec(Eigen::Vector2d(x, v))); });
        }
        if (cfg.format == "json") {
            doc["series"] = {{"t", series.t},
                             {"mass", series.mass},
                             {"e_psi", series.entropy},
                             {"I_psi", series.dissipation},
                             {"S_psi", series.modified}};
        } else {
            CsvTable csv;
            csv.header = {"t", "mass", "e_psi", "I_psi", "S_psi"};
            for (std::size_t i = 0; i < series.t.size(); ++i) {
                csv.add_row({series.t[i], series.mass[i], series.entropy[i], series.dissipation[i], series.modified[i]});
            }
            write_text(out_file(cfg, "kinetic_series.csv"), csv.str());
        }
        if (cfg.plot == "svg") {
            write_text(out_file(cfg, "kinetic_series.svg"),
                       svg_line_plot("Kinetic Fokker-Planck", "t",
                                     {{"e_psi", series.t, series.entropy}, {"S_psi", series.t, series.modified}}, true));
        }
    }
    write_text(out_file(cfg, "kinetic.json"), dump(doc));
    log << "kinetic: kappa0 = " << format_double(cert.kappa0) << ", rate = " << format_double(cert.rate) << "\n";
    return kExitOk;
}

int do_compare(const RunConfig& cfg, std::ostream& log) {
    const SystemSpec s = cfg.system();
    require_condition_A(s, cfg);
    const SteadyState ss = steady_state(s);
    const DecayCertificate cmp = compare_rates(s, ss, cfg.cluster_tolerance);
    json doc = {{"lambda_K", *cmp.lambda_K}, {"mu", cmp.mu}};
    if (cmp.cond_sq_bound) {
        doc["cond_sq"] = *cmp.cond_sq_bound;
        doc["cond_sq_lambda_K"] = *cmp.cond_sq_bound * *cmp.lambda_K;
    }
    write_text(out_file(cfg, "compare.json"), dump(doc));
    log << "compare: lambda_K = " << format_double(*cmp.lambda_K) << ", mu = " << format_double(cmp.mu) << "\n";
    return kExitOk;
}

}  // namespace

SystemSpec RunConfig::system() const {
    if (!D || !C) throw ConfigError("config: missing 'system' with D and C");
    try {
        return SystemSpec(*D, *C);
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

RunConfig parse_config(const std::string& json_text) {
    RunConfig cfg;
    try {
        const json j = json::parse(json_text);
        if (!j.is_object()) throw ConfigError("config: top level must be an object");
        cfg.subcommand = get_or<std::string>(j, "subcommand", "");
        if (j.contains("system")) {
            const json& s = j.at("system");
            cfg.D = to_matrix(s.at("D"), "system.D");
            cfg.C = to_matrix(s.at("C"), "system.C");
            if (cfg.D->rows() != cfg.D->cols() || cfg.C->rows() != cfg.C->cols() || cfg.D->rows() != cfg.C->rows()) {
                throw ConfigError("system: D and C must be square and of equal size");
            }
        }
        if (j.contains("entropy")) cfg.entropy = parse_entropy(j.at("entropy"));
        if (j.contains("initial")) cfg.initial = parse_initial(j.at("initial"));
        if (j.contains("times")) {
            cfg.t_end = get_or<double>(j.at("times"), "t_end", cfg.t_end);
            cfg.samples = get_or<int>(j.at("times"), "samples", cfg.samples);
        }
        if (cfg.samples < 2) throw ConfigError("times.samples must be >= 2");
        if (!(cfg.t_end > 0.0)) throw ConfigError("times.t_end must be > 0");
        if (j.contains("quadrature")) cfg.quadrature_order = get_or<int>(j.at("quadrature"), "order", cfg.quadrature_order);
        if (j.contains("certificate")) {
            const json& c = j.at("certificate");
            if (c.contains("epsilon") && !c.at("epsilon").is_null()) cfg.epsilon = c.at("epsilon").get<double>();
            if (c.contains("weights")) cfg.weights = c.at("weights").get<std::vector<double>>();
            cfg.optimize_weights = get_or<bool>(c, "optimize_weights", false);
            cfg.cluster_tolerance = get_or<double>(c, "cluster_tolerance", cfg.cluster_tolerance);
        }
        if (j.contains("spectrum")) cfg.m_max = get_or<int>(j.at("spectrum"), "m_max", cfg.m_max);
        if (j.contains("kinetic")) cfg.kinetic = parse_kinetic(j.at("kinetic"));
        if (j.contains("output")) {
            const json& o = j.at("output");
            cfg.output_path = get_or<std::string>(o, "path", cfg.output_path);
            cfg.format = get_or<std::string>(o, "format", cfg.format);
            cfg.plot = get_or<std::string>(o, "plot", cfg.plot);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (cfg.format != "csv" && cfg.format != "json") throw ConfigError("output.format must be csv or json");
    if (cfg.plot != "none" && cfg.plot != "svg") throw ConfigError("output.plot must be none or svg");
    return cfg;
}

int run(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    try {
        if (cfg.subcommand == "analyze") return do_analyze(cfg, log);
        if (cfg.subcommand == "evolve") return do_evolve(cfg, log);
        if (cfg.subcommand == "spectrum") return do_spectrum(cfg, log);
        if (cfg.subcommand == "kinetic") return do_kinetic(cfg, log);
        if (cfg.subcommand == "compare") return do_compare(cfg, log);
        err << "error: unknown subcommand '" << cfg.subcommand << "'\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConditionAError& e) {
        err << e.what() << "\n";
        return kExitConditionA;
    } catch (const CertificateError& e) {
        err << e.what() << "\n";
        return kExitCertificate;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitCertificate;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kExitIo;
    }
}

int run_cli(int argc, const char* const* argv, std::ostream& log, std::ostream& err) {
    CLI::App app{"Hypocoercive Fokker-Planck decay toolkit"};
    std::string subcommand, config_path, output, format, plot;
    app.add_option("subcommand", subcommand, "analyze | evolve | spectrum | kinetic | compare")
        ->required()
        ->check(CLI::IsMember({"analyze", "evolve", "spectrum", "kinetic", "compare"}));
    app.add_option("--config", config_path, "JSON configuration file")->required();
    app.add_option("--output", output, "output directory");
    app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--plot", plot, "svg")->check(CLI::IsMember({"svg", "none"}));
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        log << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n" << app.help();
        return kExitConfig;
    }
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        err << "i/o error: cannot read " << config_path << "\n";
        return kExitIo;
    }
    std::ostringstream text;
    text << in.rdbuf();
    RunConfig cfg;
    try {
        cfg = parse_config(text.str());
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    cfg.subcommand = subcommand;
    if (!output.empty()) cfg.output_path = output;
    if (!format.empty()) cfg.format = format;
    if (!plot.empty()) cfg.plot = plot;
    return run(cfg, log, err);
}

}  // namespace hypofp
