#pragma once

#include <cstddef>
#include <vector>

#include "heunlim/basis.hpp"
#include "heunlim/matrix.hpp"
#include "heunlim/recurrence.hpp"

namespace heunlim {

// Jacobi weight x^alpha (1-x)^beta on [0,1]. Both exponents must exceed -1
// for the weight to be integrable; nothing else is restricted, and the one
// removable singularity in the closed-form recurrence (at alpha+beta = -1)
// is handled explicitly.
struct JacobiParams {
    double alpha = 0.0;
    double beta = 0.0;
};

// Hahn weight on the integer grid {0,...,n_grid}.
struct HahnParams {
    double alpha = 0.0;
    double beta = 0.0;
    int n_grid = 1;
};

struct NormConstants {
    std::vector<double> h;  // h[n] = squared norm of the degree-n monic polynomial
};

// Eigenbasis of the Hahn difference operator on the grid, orthonormal in the
// plain Euclidean sense after conjugation by sqrt(w).
struct HahnBasis {
    Matrix vectors;               // column n = unit eigenvector d_n, first entry positive
    std::vector<double> mu;       // eigenvalues n(n+alpha+beta+1), in that analytic form
    std::vector<double> w;        // grid weights, normalized to sum 1
    std::vector<double> w_dual;   // dual weights <e_0, d_n>^2, also summing to 1
};

// Monic three-term recurrence x p_n = p_{n+1} + b_n p_n + u_n p_{n-1} for the
// Jacobi weight, with u indexed from 1 and mass = integral of the weight.
RecurrencePair jacobi_recurrence(const JacobiParams& p, std::size_t nmax);

// Same closed forms without the domain restriction or the mass (set to 0):
// the coefficients remain meaningful as a formal recurrence for exponent
// pairs outside the integrable range, where u_n may turn negative. The
// caller is responsible for keeping denominators 2n+alpha+beta+k away
// from zero.
RecurrencePair jacobi_recurrence_formal(double alpha, double beta, std::size_t nmax);

// Value of the monic degree-n polynomial at x, by forward recurrence.
double jacobi_eval(const RecurrencePair& rec, std::size_t n, double x);

// Squared norms h_n = mass * u_1 * ... * u_n.
NormConstants jacobi_norms(const RecurrencePair& rec, std::size_t nmax);

// The Hahn difference operator Y acting on grid deltas: row x carries
// B(x) = (x-N)(x+alpha+1) at column x+1, D(x) = x(x-beta-N-1) at column x-1,
// and -(B(x)+D(x)) on the diagonal.
BasisOperator hahn_operator(const HahnParams& p);

// Full spectral data of Y: weights from detailed balance, eigenvectors of the
// sqrt(w)-symmetrized operator, eigenvalues checked against n(n+alpha+beta+1)
// to 1e-9 relative. Throws std::runtime_error if any eigenvalue refuses to
// pair with its analytic value.
HahnBasis hahn_basis(const HahnParams& p);

// Recurrence coefficients of the position operator X = diag(0..N) expressed
// in the Hahn eigenbasis. X must compress to a tridiagonal there; off-band
// leakage beyond 1e-10 * ||X||_F throws. u_n is the squared off-diagonal.
RecurrencePair hahn_recurrence(const HahnBasis& basis);

}  // namespace heunlim
