#pragma once

#include <utility>
#include <vector>

#include "heunlim/basis.hpp"
#include "heunlim/heun.hpp"
#include "heunlim/matrix.hpp"
#include "heunlim/orthopoly.hpp"

namespace heunlim {

// Discrete time-and-band limiting on the Hahn bispectral pair: grid positions
// play time, difference-operator degrees play frequency.
struct LimitingConfig {
    HahnParams hahn;
    int j1 = 0;  // keep grid positions s <= j1
    int j2 = 0;  // keep eigenbasis degrees n <= j2
};

struct LimitingOperators {
    BasisOperator v1;  // pi1 pi2 pi1
    BasisOperator v2;  // pi2 pi1 pi2
    BasisOperator e1;  // pi1 pi2
    BasisOperator e2;  // pi2 pi1
};

// K(t, n) for t = 0..j1, n = 0..n_grid, computed along the duality route,
// with the two alternative summation routes and the direct projector product
// kept as agreement diagnostics.
struct KernelMatrix {
    Matrix k;
    int route = 1;           // which printed summation produced k
    double route_gap = 0.0;  // max pairwise entry gap across the three routes
    double direct_gap = 0.0; // max gap against <e_t, pi1 pi2 e_n>; this equals
                             // <e_t, V1 e_n> on the columns n <= j1
};

struct CommutingSolution {
    HeunTau tau;                                  // t1 = t2 = 1/2, t0 = 0
    Matrix m_matrix;                              // symmetric tridiagonal, weight-conjugated
    std::pair<double, double> commutator_residuals;  // vs pi1, pi2 (Frobenius)
    double spectrum_gap = 0.0;  // smallest eigenvalue gap of the pi1 block of M
                                // (each block eigenvalue recurs in the complementary
                                // block, so the full-grid gap is always zero)
    bool degenerate_spectrum = false;             // gap below 1e-8 * spread
};

struct SpectralReport {
    std::vector<double> v1_eigs_direct;  // pi1-block spectrum, ascending
    std::vector<double> v1_eigs_via_m;   // Rayleigh quotients through M, ascending
    double eigenvector_agreement = 0.0;  // max principal angle on well-separated pairs
    std::vector<double> m_eigs;          // pi1-block spectrum of M
    double v1_min_gap = 0.0;             // clustering diagnostics: V1 is nearly
    double m_min_gap = 0.0;              // degenerate where M stays well separated
    bool boundary_case = false;          // j1 = N or j2 = N analytic bypass
    bool used_cluster_fallback = false;  // V1 re-diagonalized inside M clusters
};

// pi1 = diag(1 for s <= j1); pi2 = V diag(1 for n <= j2) V^T. Both idempotent
// and symmetric. Grid-delta basis operators.
std::pair<BasisOperator, BasisOperator> projections(const LimitingConfig& c,
                                                    const HahnBasis& basis);

LimitingOperators limiting_ops(const BasisOperator& pi1, const BasisOperator& pi2);

// The three printed summations for K must agree pairwise to 1e-10; a larger
// gap signals a duality-convention bug and throws runtime_error.
KernelMatrix kernel_matrix(const LimitingConfig& c, const HahnBasis& basis);

// Tridiagonal M = (XY + YX)/2 + t3 X + t4 Y commuting with both projections:
// t4 = -(2 j1 + 1)/2 from the grid spectrum, t3 = -(mu_{j2} + mu_{j2+1})/2.
// Requires j1 < N and j2 < N (the conditions reference index J+1); throws
// runtime_error if the commutator residuals exceed 1e-10 * ||M||_F.
CommutingSolution commuting_tau(const LimitingConfig& c, const HahnBasis& basis);

// Eigenvalues of V1 on the pi1 block, both by direct dense diagonalization
// and through the eigenvectors of the commuting M; boundary configs j1 = N or
// j2 = N return the analytic projection answer without the tau solver. The
// overload sharing a prebuilt basis serves parameter sweeps.
SpectralReport solve(const LimitingConfig& c);
SpectralReport solve(const LimitingConfig& c, const HahnBasis& basis);

}  // namespace heunlim
