#include "hypofp/spectrum.hpp"

#include "hypofp/errors.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace hypofp {

namespace {

void fill_indices(int dim, int remaining, int pos, MultiIndex& cur, std::vector<MultiIndex>& out) {
    if (pos == dim - 1) {
        cur[pos] = remaining;
        out.push_back(cur);
        return;
    }
    for (int k = remaining; k >= 0; --k) {
        cur[pos] = k;
        fill_indices(dim, remaining - k, pos + 1, cur, out);
    }
}

long long binomial(int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

std::vector<MultiIndex> multi_indices(int dim, int degree) {
    if (dim < 1 || degree < 0) throw DomainError("multi_indices: invalid arguments");
    std::vector<MultiIndex> out;
    MultiIndex cur(dim, 0);
    fill_indices(dim, degree, 0, cur, out);
    return out;
}

std::vector<SpectrumEntry> enumerate_spectrum(const EigenStructure& eig_c, int m_max) {
    if (m_max < 0) throw DomainError("enumerate_spectrum: m_max must be >= 0");
    const std::vector<Complex> lambda = eig_c.eigenvalues();
    const int d = static_cast<int>(lambda.size());
    if (d == 0) throw DomainError("enumerate_spectrum: empty spectrum");
    std::vector<SpectrumEntry> out;
    for (int m = 0; m <= m_max; ++m) {
        for (const auto& a : multi_indices(d, m)) {
            Complex v = 0.0;
            for (int j = 0; j < d; ++j) v -= static_cast<double>(a[j]) * lambda[j];
            out.push_back({v, a, m});
        }
    }
    return out;
}

PolyOperatorMatrix poly_operator_matrix(const SystemSpec& s, const SteadyState& ss, int m_max) {
    const int d = s.dim();
    if (m_max < 0) throw DomainError("poly_operator_matrix: m_max must be >= 0");
    if (binomial(d + m_max, m_max) > kMaxPolyBasis) {
        throw DomainError("poly_operator_matrix: basis larger than " + std::to_string(kMaxPolyBasis));
    }
    PolyOperatorMatrix pm;
    std::map<MultiIndex, int> index;
    for (int m = 0; m <= m_max; ++m) {
        pm.degree_offset.push_back(static_cast<int>(pm.basis.size()));
        for (auto& a : multi_indices(d, m)) {
            index[a] = static_cast<int>(pm.basis.size());
            pm.basis.push_back(std::move(a));
        }
    }
    pm.degree_offset.push_back(static_cast<int>(pm.basis.size()));
    const int n = static_cast<int>(pm.basis.size());
    // in y = K^{-1/2} x the operator reads div(Dw grad) - y^T B grad
    pm.whitening = inv_sqrt_spd(ss.K);
    const Mat Dw = symmetrize(pm.whitening * s.D * pm.whitening);
    const Mat B = pm.whitening * s.C * sqrt_spd(ss.K);
    pm.M = Mat::Zero(n, n);
    for (int col = 0; col < n; ++col) {
        const MultiIndex& a = pm.basis[col];
        // second-order part
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                if (Dw(i, j) == 0.0) continue;
                MultiIndex b = a;
                double coef;
                if (i == j) {
                    if (a[i] < 2) continue;
                    coef = a[i] * (a[i] - 1.0);
                    b[i] -= 2;
                } else {
                    if (a[i] < 1 || a[j] < 1) continue;
                    coef = static_cast<double>(a[i]) * a[j];
                    b[i] -= 1;
                    b[j] -= 1;
                }
                pm.M(index.at(b), col) += Dw(i, j) * coef;
            }
        }
        // drift part: - sum_{i,j} B_ij x_i d_j x^a
        for (int j = 0; j < d; ++j) {
            if (a[j] == 0) continue;
            for (int i = 0; i < d; ++i) {
                if (B(i, j) == 0.0) continue;
                MultiIndex b = a;
                b[j] -= 1;
                b[i] += 1;
                pm.M(index.at(b), col) -= B(i, j) * a[j];
            }
        }
    }
    return pm;
}

std::vector<Complex> poly_operator_eigenvalues(const PolyOperatorMatrix& pm) {
    std::vector<Complex> out;
    for (int m = 0; m + 1 < static_cast<int>(pm.degree_offset.size()); ++m) {
        const int start = pm.degree_offset[m];
        const int size = pm.degree_offset[m + 1] - start;
        Eigen::EigenSolver<Mat> es(pm.M.block(start, start, size, size), false);
        if (es.info() != Eigen::Success) throw NumericalError("poly_operator_eigenvalues: eigen solver failed");
        for (int i = 0; i < size; ++i) out.push_back(es.eigenvalues()(i));
    }
    return out;
}

double match_multisets(std::vector<Complex> a, std::vector<Complex> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    std::vector<bool> used(b.size(), false);
    for (const Complex& x : a) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t at = b.size();
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            const double dist = std::abs(x - b[j]);
            if (dist < best) {
                best = dist;
                at = j;
            }
        }
        used[at] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

CVec AffineEigenfunction::coefficient_at(double t) const { return std::exp(eigenvalue * t) * coefficient; }

AffineEigenfunction degree_one_eigenfunction(const SystemSpec& s, const SteadyState& ss, const CVec& w,
                                             Complex lambda) {
    if (w.size() != s.dim()) throw DomainError("degree_one_eigenfunction: size mismatch");
    const CVec resid = s.C.cast<Complex>() * w - lambda * w;
    if (resid.norm() > 1e-10 * std::max(norm2(s.C), 1.0) * w.norm()) {
        throw DomainError("degree_one_eigenfunction: w is not an eigenvector of C");
    }
    AffineEigenfunction ef;
    ef.direction = w;
    ef.coefficient = ss.K_inv.cast<Complex>() * w;
    ef.eigenvalue = -lambda;
    return ef;
}

}  // namespace hypofp
