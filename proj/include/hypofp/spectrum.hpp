#pragma once

#include "hypofp/linalg.hpp"
#include "hypofp/system.hpp"

#include <vector>

namespace hypofp {

using MultiIndex = std::vector<int>;

struct SpectrumEntry {
    Complex value;
    MultiIndex alpha;
    int degree = 0;
};

inline constexpr int kMaxPolyBasis = 2000;

// Multi-indices of total degree m in decreasing lexicographic order.
std::vector<MultiIndex> multi_indices(int dim, int degree);

// -sum_j alpha_j lambda_j over |alpha| <= m_max, eigenvalues of C repeated by
// algebraic multiplicity.
std::vector<SpectrumEntry> enumerate_spectrum(const EigenStructure& eig_c, int m_max);

// Monomials are taken in whitened coordinates y = K^{-1/2} x, where the
// drift K^{-1/2} C K^{1/2} is far better conditioned than K^{-1} C K.
struct PolyOperatorMatrix {
    std::vector<MultiIndex> basis;   // by degree, decreasing lex within a degree
    std::vector<int> degree_offset;  // basis index where degree m starts; size m_max + 2
    Mat M;                           // column j: image of basis monomial j
    Mat whitening;                   // K^{-1/2}, y = whitening * x

    int max_degree() const { return static_cast<int>(degree_offset.size()) - 2; }
};

// Matrix of L^P q = div(D grad q) - x^T (K^{-1} C K) grad q on monomials in y.
PolyOperatorMatrix poly_operator_matrix(const SystemSpec& s, const SteadyState& ss, int m_max);

// Eigenvalues from the diagonal degree blocks (the matrix is block triangular).
std::vector<Complex> poly_operator_eigenvalues(const PolyOperatorMatrix& pm);

// Greedy nearest matching; returns the largest pairing distance, or +inf
// when sizes differ.
double match_multisets(std::vector<Complex> a, std::vector<Complex> b);

// (x^T K^{-1} w) f_inf with L-eigenvalue -lambda, for C w = lambda w.
struct AffineEigenfunction {
    CVec direction;
    CVec coefficient;  // K^{-1} w
    Complex eigenvalue;
    CVec coefficient_at(double t) const;
};

AffineEigenfunction degree_one_eigenfunction(const SystemSpec& s, const SteadyState& ss, const CVec& w,
                                             Complex lambda);

}  // namespace hypofp
