#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "heunlim/matrix.hpp"
#include "heunlim/recurrence.hpp"

namespace heunlim {

struct SymTridiag {
    std::vector<double> diag;     // length m
    std::vector<double> offdiag;  // length m-1; offdiag[i] couples i and i+1
};

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    Matrix vectors;              // columns are eigenvectors, orthonormal
    double residual = 0.0;       // max_i ||A v_i - values_i v_i||_2
};

struct LanczosResult {
    SymTridiag tridiag;
    Matrix basis;             // m x k with orthonormal columns (Krylov basis)
    bool breakdown = false;   // stopped on an invariant subspace before step m
};

struct GaussQuadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

struct LeastSquaresFit {
    std::vector<double> coeffs;
    bool rank_deficient = false;
    double min_pivot_ratio = 1.0;  // smallest |R_jj| / largest |R_jj| after pivoting
};

// Thrown when the QL iteration exceeds its sweep cap. `index` identifies the
// eigenvalue under work when the cap was hit.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, std::size_t where)
        : std::runtime_error(what), index(where) {}
    std::size_t index;
};

// Implicitly shifted QL on a symmetric tridiagonal matrix. Eigenvalues come
// out ascending; eigenvector signs are fixed so each column's
// largest-magnitude entry is positive (ties broken by lowest index).
EigenDecomposition sym_tridiag_eig(const SymTridiag& t);

// Householder reduction to tridiagonal form followed by the QL iteration.
// Input must be symmetric to 1e-12 * ||A||_F (it is symmetrized internally).
EigenDecomposition dense_sym_eig(const Matrix& a);

// Lanczos with full reorthogonalization at every step. Runs to the full
// dimension unless the off-diagonal collapses below 1e-13 * ||A||_F, in which
// case the invariant subspace found so far is returned with the flag set.
LanczosResult lanczos(const Matrix& a, const std::vector<double>& start);

// Gaussian quadrature from a monic recurrence: nodes are eigenvalues of the
// symmetrized Jacobi matrix, weights are mass * (first eigenvector entry)^2.
GaussQuadrature golub_welsch(const RecurrencePair& rec, std::size_t m);

// Householder QR with column pivoting; coefficients of columns whose pivot
// falls below 1e-12 of the largest are set to zero and the fit is flagged.
LeastSquaresFit least_squares(const Matrix& a, const std::vector<double>& rhs);

// Solve U X = rhs for X with U unit upper triangular (diagonal treated as 1).
// Used for change-of-basis against monic coefficient matrices.
Matrix solve_unit_upper(const Matrix& u, Matrix rhs);

}  // namespace heunlim
