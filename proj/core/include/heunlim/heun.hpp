#pragma once

#include <cstddef>
#include <vector>

#include "heunlim/basis.hpp"
#include "heunlim/matrix.hpp"
#include "heunlim/operators.hpp"
#include "heunlim/orthopoly.hpp"
#include "heunlim/recurrence.hpp"

namespace heunlim {

// Parameters of the second-order operator with four regular singular points
// (0, 1, d_sing, infinity). The exponent pair (alpha_h, beta_h) may come out
// complex when matched from a bilinear form; their sum and product are always
// real and are the quantities the operator actually uses.
struct HeunDiffParams {
    double gamma = 0.0;
    double delta = 0.0;
    double epsilon = 0.0;
    double alpha_h = 0.0;
    double beta_h = 0.0;
    double d_sing = 0.0;
    double q = 0.0;
    double lambda = 0.0;  // spectral shift folded into the constant term

    // Diagnostics filled in by match_heun_params.
    bool degenerate = false;         // tau1+tau2 = 0, or the singularity collides with 0/1
    bool complex_exponents = false;  // discriminant of the exponent quadratic is negative
    double exponent_sum = 0.0;       // alpha_h + beta_h, real in every case
    double exponent_product = 0.0;   // alpha_h * beta_h, real in every case
    double scale = 1.0;              // factor between the bilinear and canonical forms
    double fit_residual = 0.0;       // entrywise mismatch of the matched operators
};

struct HeunTau {
    double t0 = 0.0, t1 = 0.0, t2 = 0.0, t3 = 0.0, t4 = 0.0;
};

// Factored coefficients of the grid-side operator:
// A1(x) = (x-N)(kappa x^2 + mu1 x + mu0), A2(x) = x(kappa x^2 + nu1 x + nu0),
// A0 = -A1 - A2 + r1 x + r0.
struct DiffHeunParams {
    double kappa = 0.0;
    double mu1 = 0.0, mu0 = 0.0;
    double nu1 = 0.0, nu0 = 0.0;
    double r1 = 0.0, r0 = 0.0;
    int n_grid = 1;
};

// Nonzero bands of a bilinear X/Y combination in the monic polynomial basis,
// with deviations from the closed-form band expressions.
struct TridiagonalAction {
    std::vector<double> xi;      // xi[n] multiplies degree n in the image of degree n-1
    std::vector<double> eta;     // diagonal
    std::vector<double> zeta_u;  // sub-band, the degree n-1 coefficient in the image of n
    double leakage = 0.0;        // largest entry beyond the three bands, within the window
    double dev_xi = 0.0;         // closed-form mismatches; eta is compared after removing
    double dev_zeta_u = 0.0;     //   the additive constant the closed form drops
    double eta_shift = 0.0;
    double dev_eta = 0.0;
};

// Parameter choice that makes the bilinear operator preserve polynomials of
// degree at most N: tau1 = 1 - tau2, tau4 = tau0 = 0.
struct TruncationData {
    int n_trunc = 0;
    double nu = 0.0;    // N + 1
    double tau2 = 0.0;  // (1 - N)/2
    double tau3 = 0.0;
    double alpha_t = 0.0;  // transformed exponent pair for the reversed eigenfamily
    double beta_t = 0.0;
    double lambda_shift = 0.0;      // additive constant in the truncated spectrum
    std::vector<double> lambda_t;   // eigenvalues on the reversed family, n = 0..N
};

// Expansion of the reversed eigenfamily over the monic polynomials, with the
// three-term recurrence the expansion coefficients satisfy in the degree index.
struct ExpansionData {
    Matrix g;  // g(k, n) = coefficient of degree k in psi_n
    Matrix q;  // per-column normalized gauge; see the degenerate_gauge note
    std::vector<double> b;  // recurrence coefficients, extracted by least squares
    std::vector<double> u;
    std::vector<double> f;
    // Columns n where the printed gauge G_0(n) vanishes. This is structural:
    // the constant polynomial is an eigenvector of the adjoint operator, so
    // every n >= 1 lands here and those columns are normalized by their first
    // significant entry instead.
    std::vector<int> degenerate_gauge;
    double route_error = 0.0;          // triangular solve vs quadrature, per-row relative
    double gram_error = 0.0;           // quadrature Gram of psi vs sum over g with norms
    double recurrence_residual = 0.0;  // residual of the three-term recurrence on q
    double printed_dev_b = 0.0;        // extracted coefficients vs closed-form bands
    double printed_dev_u = 0.0;
    double printed_dev_f = 0.0;
};

// Matrix of x(x-1)(x-d) d^2 + (rho2 x^2 + rho1 x + rho0) d + r1 x + r0 on
// monomial coefficients, where rho2 = -(gamma+delta+epsilon),
// rho1 = (gamma+delta)d + gamma + epsilon, rho0 = -gamma d,
// r1 = -(alpha_h beta_h), r0 = q + lambda. Throws std::invalid_argument if
// the exponents violate epsilon = alpha_h + beta_h - gamma - delta + 1 or if
// d_sing sits on 0 or 1.
BasisOperator heun_diff_build(const HeunDiffParams& p, int degree_cap);

// tau1 XY + tau2 YX + tau3 X + tau4 Y + tau0, in whatever common basis the
// two operators are realized.
BasisOperator algebraic_heun(const BasisOperator& x_op, const BasisOperator& y_op,
                             const HeunTau& t);

// The same bilinear combination for the continuous realization, built from
// the expanded differential form rather than matrix products. Used as an
// independent construction to test algebraic_heun against.
BasisOperator heun_jacobi_expanded(const HeunTau& t, const JacobiParams& p, int degree_cap);

// Identify the bilinear X/D combination with the canonical four-singularity
// operator: unique closed-form solution, scale -1/(tau1+tau2). The returned
// fit_residual is measured by rebuilding both sides. tau1+tau2 = 0 or a
// singularity collision is reported through the degenerate flag, never thrown.
HeunDiffParams match_heun_params(const HeunTau& t, const JacobiParams& p);

// Band extraction in the monic basis plus comparison against the closed-form
// band values built from the eigenvalue list. m must be jacobi-tagged; lam
// needs window+2 entries. Off-band leakage above 1e-10 * ||m||_F throws.
TridiagonalAction tridiagonal_action(const BasisOperator& m, const HeunTau& t,
                                     const RecurrencePair& rec,
                                     const std::vector<double>& lam);

// Truncation parameters for degree cutoff N, with the vanishing of the
// degree-raising band at N verified numerically on construction.
TruncationData truncation_setup(const JacobiParams& p, int n_trunc);

// The truncated bilinear operator as an (N+1)x(N+1) monomial-basis block.
// If leakage is non-null it receives the largest entry that would have
// escaped into degree N+1.
BasisOperator truncated_heun(const TruncationData& td, const JacobiParams& p,
                             double* leakage = nullptr);

// Coefficient rows of the reversed eigenfamily psi_n(x) = x^N p_n(1/x),
// where p_n is the monic family for the transformed exponent pair. Row n
// holds psi_n's monomial coefficients; its lowest power is x^(N-n).
// Throws std::domain_error when a transformed-recurrence denominator
// 2n + alpha_t + beta_t + k, k in {-1,0,1,2}, falls below 1e-8.
Matrix psi_basis(const TruncationData& td, const JacobiParams& p);

// Expansion coefficients of psi over the monic family, computed by two
// independent routes (triangular change of basis, Gauss quadrature), with
// the three-term recurrence in the degree index extracted and checked.
ExpansionData wilson_expansion(const TruncationData& td, const JacobiParams& p);

// Grid realization from the factored coefficient polynomials.
BasisOperator difference_heun(const DiffHeunParams& dp);

// Grid realization from the closed-form factored polynomials in tau. Must
// coincide entrywise with algebraic_heun(grid_x, hahn_operator, t).
BasisOperator heun_hahn(const HeunTau& t, const HahnParams& p);

// Expand heun_hahn's factored polynomials into DiffHeunParams. Rebuilding
// difference_heun from the result reproduces heun_hahn exactly.
DiffHeunParams param_match_difference(const HeunTau& t, const HahnParams& p);

// Degree of the polynomial interpolating the samples f(0), ..., f(N):
// the highest Newton coefficient above rel_tol times the largest one.
int grid_poly_degree(const std::vector<double>& samples, double rel_tol = 1e-12);

}  // namespace heunlim
