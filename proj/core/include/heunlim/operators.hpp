#pragma once

#include "heunlim/basis.hpp"
#include "heunlim/matrix.hpp"
#include "heunlim/orthopoly.hpp"

namespace heunlim {

// Arithmetic on tagged operators. Basis mismatch throws; the exactness
// window shrinks by the composition rule and `raise` accumulates, so any
// column index <= window of the result is free of truncation artifacts.
BasisOperator op_mul(const BasisOperator& a, const BasisOperator& b);  // a after b
BasisOperator op_add(const BasisOperator& a, const BasisOperator& b);
BasisOperator op_sub(const BasisOperator& a, const BasisOperator& b);
BasisOperator op_scale(double s, const BasisOperator& a);
BasisOperator op_identity(const BasisTag& tag);

// Multiplication by x on monomials up to degree K. The image of x^K falls
// outside the cutoff, hence window K-1 and raise 1.
BasisOperator monomial_x(int degree_cap);

// The second-order hypergeometric operator with the Jacobi weight's
// polynomial eigenfamily: x(1-x) d^2 + (alpha+1 - (alpha+beta+2) x) d.
// Degree-preserving, upper bidiagonal on monomials, eigenvalue
// -n(n+alpha+beta+1) on the degree-n monic polynomial.
BasisOperator monomial_hypergeom(const JacobiParams& p, int degree_cap);

// Rows = monomial coefficients of the monic polynomials, degrees 0..K.
// Unit lower triangular.
Matrix jacobi_basis_matrix(const RecurrencePair& rec, int degree_cap);

// Conjugate a monomial-basis operator into the monic Jacobi basis using the
// coefficient matrix from jacobi_basis_matrix. Window and raise carry over.
BasisOperator to_jacobi_basis(const BasisOperator& op, const JacobiParams& p,
                              const Matrix& basis_rows);

// Position operator diag(0..N) on grid deltas.
BasisOperator grid_x(int n_grid);

// The two polynomial families attached to a Hahn eigenbasis, tabulated on
// each other's spectra, together with the raw overlap matrix. phi(n, s) is
// the degree-n polynomial in the grid variable evaluated at lambda_s = s;
// chi(s, n) is the degree-s polynomial in the eigenvalue variable evaluated
// at mu_n. Both are built from signed three-term recurrences extracted from
// the basis, not from closed forms.
struct DualityData {
    Matrix overlap;              // <e_s, d_n>, i.e. the eigenvector matrix
    std::vector<double> w;
    std::vector<double> w_dual;
    Matrix phi;
    Matrix chi;
};

DualityData duality_data(const HahnParams& p, const HahnBasis& basis);

// Largest absolute mismatch among the three pairwise equalities between
// overlap(s,n), sqrt(w_s) phi_n(lambda_s), and sqrt(w_dual_n) chi_s(mu_n).
double leonard_check(const DualityData& d);

}  // namespace heunlim
