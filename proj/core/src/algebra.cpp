#include "heunlim/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "heunlim/linalg.hpp"
#include "heunlim/operators.hpp"

namespace heunlim {

BasisOperator commutator(const BasisOperator& a, const BasisOperator& b) {
    return op_sub(op_mul(a, b), op_mul(b, a));
}

BasisOperator anticommutator(const BasisOperator& a, const BasisOperator& b) {
    return op_add(op_mul(a, b), op_mul(b, a));
}

ClosureReport closure_fit(const BasisOperator& target, const AlgebraWordBasis& words,
                          int window_cap) {
    if (words.words.empty()) throw std::invalid_argument("closure_fit: no words");
    int window = target.basis.window;
    for (const BasisOperator& w : words.words) {
        require_same_space(target.basis, w.basis, "closure_fit");
        window = std::min(window, w.basis.window);
    }
    if (window_cap >= 0) window = std::min(window, window_cap);
    if (window < 0) throw std::invalid_argument("closure_fit: empty exactness window");

    const std::size_t rows = target.matrix.rows();
    const std::size_t ncols = static_cast<std::size_t>(window) + 1;
    const std::size_t nw = words.words.size();
    Matrix design(rows * ncols, nw);
    std::vector<double> rhs(rows * ncols);
    for (std::size_t j = 0; j < ncols; ++j)
        for (std::size_t i = 0; i < rows; ++i) {
            const std::size_t r = j * rows + i;
            rhs[r] = target.matrix(i, j);
            for (std::size_t w = 0; w < nw; ++w) design(r, w) = words.words[w].matrix(i, j);
        }

    const LeastSquaresFit fit = least_squares(design, rhs);
    ClosureReport rep;
    rep.coefficients = fit.coeffs;
    rep.window = window;
    rep.rank_deficient = fit.rank_deficient;

    double resid2 = 0.0, target2 = 0.0;
    for (std::size_t j = 0; j < ncols; ++j)
        for (std::size_t i = 0; i < rows; ++i) {
            double v = target.matrix(i, j);
            target2 += v * v;
            for (std::size_t w = 0; w < nw; ++w)
                v -= rep.coefficients[w] * words.words[w].matrix(i, j);
            resid2 += v * v;
        }
    rep.residual = std::sqrt(resid2) / std::max(std::sqrt(target2), 1e-300);
    return rep;
}

std::pair<ClosureReport, ClosureReport> hahn_algebra_check(const HahnParams& p) {
    const BasisOperator k1 = grid_x(p.n_grid);
    const BasisOperator k2 = hahn_operator(p);
    const BasisOperator k3 = commutator(k1, k2);
    const BasisOperator id = op_identity(k1.basis);

    const AlgebraWordBasis span1{{anticommutator(k1, k2), k2, k1, id}};
    const ClosureReport rel1 = closure_fit(commutator(k2, k3), span1);

    const AlgebraWordBasis span2{{op_mul(k1, k1), k1, k2, id}};
    const ClosureReport rel2 = closure_fit(commutator(k3, k1), span2);
    return {rel1, rel2};
}

std::pair<ClosureReport, ClosureReport> racah_embedding_jacobi(const HeunTau& t,
                                                               const JacobiParams& p,
                                                               int degree_cap) {
    if (degree_cap < 10)
        throw std::invalid_argument("racah_embedding_jacobi: window too small, need cap >= 10");
    if (t.t4 != 0.0 || t.t0 != 0.0)
        throw std::invalid_argument("racah_embedding_jacobi: defined for t4 = t0 = 0 only");

    const BasisOperator x = monomial_x(degree_cap);
    const BasisOperator k1 = monomial_hypergeom(p, degree_cap);
    BasisOperator k2 = op_add(op_scale(t.t1, op_mul(x, k1)), op_scale(t.t2, op_mul(k1, x)));
    k2 = op_add(k2, op_scale(t.t3, x));
    const BasisOperator k3 = commutator(k1, k2);
    const BasisOperator id = op_identity(x.basis);
    const int cap = degree_cap - 3;

    const AlgebraWordBasis span1{
        {anticommutator(k1, k2), op_mul(k2, k2), k2, k1, id}};
    const ClosureReport rel1 = closure_fit(commutator(k2, k3), span1, cap);

    const AlgebraWordBasis span2{
        {op_mul(k1, k1), anticommutator(k1, k2), k1, k2, id}};
    const ClosureReport rel2 = closure_fit(commutator(k3, k1), span2, cap);
    return {rel1, rel2};
}

std::pair<ClosureReport, ClosureReport> cubic_closure_hahn(const HeunTau& t,
                                                           const HahnParams& p) {
    const BasisOperator y = hahn_operator(p);
    const BasisOperator w = heun_hahn(t, p);
    const BasisOperator z = commutator(w, y);
    const BasisOperator id = op_identity(y.basis);
    const BasisOperator y2 = op_mul(y, y);
    const BasisOperator ac = anticommutator(y, w);

    const AlgebraWordBasis span1{{y2, ac, y, w, id}};
    const ClosureReport rel1 = closure_fit(commutator(y, z), span1);

    const AlgebraWordBasis span2{{y2, op_mul(y2, y), op_mul(w, w), ac, w, y, id}};
    const ClosureReport rel2 = closure_fit(commutator(z, w), span2);
    return {rel1, rel2};
}

}  // namespace heunlim
