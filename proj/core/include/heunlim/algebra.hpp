#pragma once

#include <utility>
#include <vector>

#include "heunlim/basis.hpp"
#include "heunlim/heun.hpp"
#include "heunlim/orthopoly.hpp"

namespace heunlim {

// Operator words (I, K1, K2, K1^2, {K1,K2}, ...) realized on one shared
// basis. The usable fit window is the smallest window among the words.
struct AlgebraWordBasis {
    std::vector<BasisOperator> words;
};

struct ClosureReport {
    std::vector<double> coefficients;  // one per word, in the word order
    double residual = 0.0;             // Frobenius, relative to the target
    int window = 0;                    // columns 0..window entered the fit
    bool rank_deficient = false;       // word set failed the pivot threshold
};

BasisOperator commutator(const BasisOperator& a, const BasisOperator& b);
BasisOperator anticommutator(const BasisOperator& a, const BasisOperator& b);

// Least-squares fit of target over the span of the words, restricted to the
// columns every participant represents exactly. An optional cap tightens the
// window further (pass -1 for no cap). Rank deficiency of the word set is
// reported in the result, not thrown: a zero target against a redundant word
// list is still a legitimate closure statement.
ClosureReport closure_fit(const BasisOperator& target, const AlgebraWordBasis& words,
                          int window_cap = -1);

// Quadratic closure of the grid realization K1 = x, K2 = the difference
// operator, K3 = [K1,K2]:
//   [K2,K3] over {{K1,K2}, K2, K1, I}
//   [K3,K1] over {K1^2,   K1, K2, I}
// Exact dimension, no truncation. The fitted coefficients are the structure
// constants at these (alpha, beta, n_grid).
std::pair<ClosureReport, ClosureReport> hahn_algebra_check(const HahnParams& p);

// Embedding check on the differential side: K1 = the hypergeometric operator,
// K2 = t1 X K1 + t2 K1 X + t3 X with t4 = t0 = 0, realized on monomials with
// cutoff degree_cap. Fits
//   [K2,K3] over {{K1,K2}, K2^2, K2, K1, I}
//   [K3,K1] over {K1^2, {K1,K2}, K1, K2, I}
// restricted to degrees <= degree_cap - 3 (triple products corrupt the top).
// Throws invalid_argument for degree_cap < 10 or t4/t0 violations.
std::pair<ClosureReport, ClosureReport> racah_embedding_jacobi(const HeunTau& t,
                                                               const JacobiParams& p,
                                                               int degree_cap);

// Cubic closure of Y with W = heun_hahn(t, p), Z = [W,Y]:
//   [Y,Z] over {Y^2, {Y,W}, Y, W, I}
//   [Z,W] over {Y^2, Y^3, W^2, {Y,W}, W, Y, I}
// The first two coefficients of the second report are the terms beyond the
// quadratic pattern; they vanish when t1+t2 = 0 and t2 = +/- t4.
std::pair<ClosureReport, ClosureReport> cubic_closure_hahn(const HeunTau& t,
                                                           const HahnParams& p);

}  // namespace heunlim
