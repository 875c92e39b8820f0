#include "hypofp/linalg.hpp"

#include "hypofp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hypofp {

namespace {

void require_square(const Mat& m, const char* what) {
    if (m.rows() != m.cols()) {
        throw DomainError(std::string(what) + ": matrix must be square");
    }
    if (!all_finite(m)) {
        throw DomainError(std::string(what) + ": matrix has non-finite entries");
    }
}

int find_root(std::vector<int>& parent, int i) {
    while (parent[i] != i) {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    return i;
}

// Orthonormal basis of the column space of z (z assumed full column rank).
template <class M>
M orthonormal_columns(const M& z) {
    if (z.cols() == 0) return z;
    Eigen::HouseholderQR<M> qr(z);
    return qr.householderQ() * M::Identity(z.rows(), z.cols());
}

// Kernel of a with singular values below thr.
template <class M>
M kernel_basis(const M& a, double thr) {
    Eigen::JacobiSVD<M> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > thr) ++rank;
    return svd.matrixV().rightCols(a.cols() - rank);
}

// Jordan chains of the generalized eigenspace of m at value lambda.
template <class M>
std::vector<JordanChain> jordan_chains(const M& n_op, int algebraic, double scale, double rel_tol,
                                       int& geometric) {
    using Scalar = typename M::Scalar;
    const Eigen::Index dim = n_op.rows();
    std::vector<M> ker{M(dim, 0)};
    std::vector<int> dims{0};
    M power = M::Identity(dim, dim);
    double thr = 1.0;
    while (dims.back() < algebraic) {
        if (static_cast<int>(ker.size()) > algebraic) {
            throw NumericalError("eigen_structure: Jordan structure did not stabilise; adjust cluster tolerance");
        }
        power = n_op * power;
        thr *= scale;
        M k = kernel_basis<M>(power, rel_tol * thr);
        if (k.cols() <= dims.back() || k.cols() > algebraic) {
            throw NumericalError("eigen_structure: inconsistent kernel dimensions; adjust cluster tolerance");
        }
        dims.push_back(static_cast<int>(k.cols()));
        ker.push_back(k);
    }
    geometric = dims[1];
    const int top = static_cast<int>(dims.size()) - 1;

    std::vector<JordanChain> chains;
    M carried(dim, 0);
    for (int k = top; k >= 1; --k) {
        const int next = (k == top) ? dims[k] : dims[k + 1];
        const int needed = (dims[k] - dims[k - 1]) - (next - dims[k]);
        M fresh(dim, 0);
        if (needed > 0) {
            M z(dim, ker[k - 1].cols() + carried.cols());
            z << ker[k - 1], carried;
            const M q = orthonormal_columns<M>(z);
            M resid = ker[k];
            if (q.cols() > 0) resid -= q * (q.adjoint() * ker[k]);
            Eigen::JacobiSVD<M> svd(resid, Eigen::ComputeThinU);
            fresh = svd.matrixU().leftCols(needed);
            for (int j = 0; j < needed; ++j) {
                JordanChain chain;
                chain.vectors.resize(k);
                Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = fresh.col(j);
                chain.vectors[k - 1] = v.template cast<Complex>();
                for (int i = k - 2; i >= 0; --i) {
                    v = n_op * v;
                    chain.vectors[i] = v.template cast<Complex>();
                }
                chains.push_back(std::move(chain));
            }
        }
        M both(dim, carried.cols() + fresh.cols());
        both << carried, fresh;
        carried = n_op * both;
    }
    // longest chains first
    std::stable_sort(chains.begin(), chains.end(),
                     [](const JordanChain& a, const JordanChain& b) { return a.length() > b.length(); });
    return chains;
}

}  // namespace

int EigenCluster::max_block() const {
    int best = 0;
    for (const auto& c : chains) best = std::max(best, c.length());
    return best;
}

int EigenStructure::dimension() const {
    int n = 0;
    for (const auto& c : clusters) n += c.algebraic;
    return n;
}

std::vector<Complex> EigenStructure::eigenvalues() const {
    std::vector<Complex> out;
    for (const auto& c : clusters) {
        for (int i = 0; i < c.algebraic; ++i) out.push_back(c.value);
    }
    return out;
}

double EigenStructure::min_real_part() const {
    double mu = std::numeric_limits<double>::infinity();
    for (const auto& c : clusters) mu = std::min(mu, c.value.real());
    return mu;
}

bool all_finite(const Mat& m) { return m.allFinite(); }

double norm2(const Mat& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

EigenStructure eigen_structure(const Mat& m, double rel_tol) {
    require_square(m, "eigen_structure");
    if (!(rel_tol >= 0.0)) throw DomainError("eigen_structure: tolerance must be non-negative");
    EigenStructure out;
    const int n = static_cast<int>(m.rows());
    if (n == 0) return out;
    const double scale = norm2(m);
    const double radius = rel_tol * scale;
    out.tolerance = radius;

    Eigen::EigenSolver<Mat> es(m, false);
    if (es.info() != Eigen::Success) throw NumericalError("eigen_structure: eigenvalue iteration failed");
    std::vector<Complex> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);

    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(ev[i] - ev[j]) <= radius) parent[find_root(parent, i)] = find_root(parent, j);
        }
    }
    std::vector<std::vector<int>> groups;
    std::vector<int> group_of(n, -1);
    for (int i = 0; i < n; ++i) {
        const int r = find_root(parent, i);
        if (group_of[r] < 0) {
            group_of[r] = static_cast<int>(groups.size());
            groups.emplace_back();
        }
        groups[group_of[r]].push_back(i);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (group_of[find_root(parent, i)] != group_of[find_root(parent, j)] &&
                std::abs(ev[i] - ev[j]) <= 2.0 * radius) {
                throw NumericalError("eigen_structure: ambiguous eigenvalue clustering at the requested tolerance");
            }
        }
    }

    struct Raw {
        Complex value;
        int count;
    };
    std::vector<Raw> raw;
    for (const auto& g : groups) {
        Complex mean = 0.0;
        for (int i : g) mean += ev[i];
        mean /= static_cast<double>(g.size());
        if (std::abs(mean.imag()) <= radius) mean = Complex(mean.real(), 0.0);
        raw.push_back({mean, static_cast<int>(g.size())});
    }
    // ascending real part, then imaginary part; conjugate partners become adjacent
    std::sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
        if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
        return a.value.imag() > b.value.imag();
    });

    const double chain_scale = std::max(scale, std::numeric_limits<double>::min());
    const double rank_tol = std::max(rel_tol, 64.0 * std::numeric_limits<double>::epsilon());
    std::vector<bool> used(raw.size(), false);
    std::vector<EigenCluster> clusters;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        EigenCluster c;
        c.value = raw[i].value;
        c.algebraic = raw[i].count;
        if (c.value.imag() == 0.0) {
            const Mat nop = m - c.value.real() * Mat::Identity(n, n);
            c.chains = jordan_chains<Mat>(nop, c.algebraic, chain_scale, rank_tol, c.geometric);
            clusters.push_back(std::move(c));
            continue;
        }
        // pair with the closest unused conjugate cluster
        std::size_t partner = raw.size();
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < raw.size(); ++j) {
            if (used[j]) continue;
            const double dist = std::abs(raw[j].value - std::conj(c.value));
            if (dist < best) {
                best = dist;
                partner = j;
            }
        }
        if (partner == raw.size() || raw[partner].count != c.algebraic || best > 2.0 * radius + 1e-14 * scale) {
            throw NumericalError("eigen_structure: complex eigenvalues without a matching conjugate");
        }
        used[partner] = true;
        if (c.value.imag() < 0.0) c.value = std::conj(c.value);
        const CMat nop = m.cast<Complex>() - c.value * CMat::Identity(n, n);
        c.chains = jordan_chains<CMat>(nop, c.algebraic, chain_scale, rank_tol, c.geometric);
        EigenCluster conj;
        conj.value = std::conj(c.value);
        conj.algebraic = c.algebraic;
        conj.geometric = c.geometric;
        for (const auto& ch : c.chains) {
            JordanChain cc;
            for (const auto& v : ch.vectors) cc.vectors.push_back(v.conjugate());
            conj.chains.push_back(std::move(cc));
        }
        clusters.push_back(std::move(c));
        clusters.push_back(std::move(conj));
    }
    out.clusters = std::move(clusters);
    return out;
}

Mat matrix_exponential(const Mat& m, double t) {
    require_square(m, "matrix_exponential");
    if (!std::isfinite(t)) throw DomainError("matrix_exponential: non-finite time");
    const Eigen::Index n = m.rows();
    Mat a = t * m;
    const double norm1 = n == 0 ? 0.0 : a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
    a *= std::ldexp(1.0, -squarings);

    Mat sum = Mat::Identity(n, n);
    Mat term = Mat::Identity(n, n);
    for (int k = 1; k <= 40; ++k) {
        term = term * a / static_cast<double>(k);
        sum += term;
        if (term.cwiseAbs().maxCoeff() <= std::numeric_limits<double>::epsilon() * 1e-2 * sum.cwiseAbs().maxCoeff()) {
            break;
        }
    }
    for (int s = 0; s < squarings; ++s) sum = sum * sum;
    if (!sum.allFinite()) throw NumericalError("matrix_exponential: overflow");
    return sum;
}

Mat solve_lyapunov(const Mat& c, const Mat& d) {
    require_square(c, "solve_lyapunov");
    require_square(d, "solve_lyapunov");
    if (c.rows() != d.rows()) throw DomainError("solve_lyapunov: dimension mismatch");
    const Eigen::Index n = c.rows();
    const Eigen::Index nn = n * n;
    // column-major vec: vec(C K) = (I (x) C) vec K, vec(K C^T) = (C (x) I) vec K
    Mat op = Mat::Zero(nn, nn);
    for (Eigen::Index i = 0; i < n; ++i) {
        op.block(i * n, i * n, n, n) += c;
        for (Eigen::Index j = 0; j < n; ++j) {
            op.block(i * n, j * n, n, n).diagonal().array() += c(i, j);
        }
    }
    Vec rhs(nn);
    for (Eigen::Index j = 0; j < n; ++j) rhs.segment(j * n, n) = 2.0 * d.col(j);
    // the operator's eigenvalues are the pairwise sums lambda_i + lambda_j
    Eigen::EigenSolver<Mat> es(c, false);
    const double cn = std::max(norm2(c), std::numeric_limits<double>::min());
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::abs(es.eigenvalues()(i) + es.eigenvalues()(j)) <= 1e-12 * cn) {
                throw NumericalError("solve_lyapunov: operator is singular (two eigenvalues of C sum to zero)");
            }
        }
    }
    Eigen::PartialPivLU<Mat> lu(op);
    Vec x = lu.solve(rhs);
    x += lu.solve(rhs - op * x);
    Mat k(n, n);
    for (Eigen::Index j = 0; j < n; ++j) k.col(j) = x.segment(j * n, n);
    return symmetrize(k);
}

double min_sym_eigenvalue(const Mat& m) {
    require_square(m, "min_sym_eigenvalue");
    if (m.rows() == 0) throw DomainError("min_sym_eigenvalue: empty matrix");
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double max_sym_eigenvalue(const Mat& m) {
    require_square(m, "max_sym_eigenvalue");
    if (m.rows() == 0) throw DomainError("max_sym_eigenvalue: empty matrix");
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(m.rows() - 1);
}

namespace {

Mat spd_function(const Mat& m, double (*f)(double), const char* what) {
    require_square(m, what);
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(m));
    if (!(es.eigenvalues().size() == 0 || es.eigenvalues()(0) > 0.0)) {
        throw DomainError(std::string(what) + ": matrix is not positive definite");
    }
    const Vec fv = es.eigenvalues().unaryExpr(f);
    return symmetrize(es.eigenvectors() * fv.asDiagonal() * es.eigenvectors().transpose());
}

}  // namespace

Mat sqrt_spd(const Mat& m) {
    return spd_function(m, [](double x) { return std::sqrt(x); }, "sqrt_spd");
}

Mat inv_sqrt_spd(const Mat& m) {
    return spd_function(m, [](double x) { return 1.0 / std::sqrt(x); }, "inv_sqrt_spd");
}

Mat spd_inverse(const Mat& m) {
    require_square(m, "spd_inverse");
    Eigen::LLT<Mat> llt(symmetrize(m));
    if (llt.info() != Eigen::Success) throw DomainError("spd_inverse: matrix is not positive definite");
    return symmetrize(llt.solve(Mat::Identity(m.rows(), m.cols())));
}

}  // namespace hypofp
