#include "heunlim/limiting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "heunlim/linalg.hpp"
#include "heunlim/operators.hpp"

namespace heunlim {

namespace {

void validate(const LimitingConfig& c, const HahnBasis& basis) {
    const int n = c.hahn.n_grid;
    if (c.j1 < 0 || c.j1 > n || c.j2 < 0 || c.j2 > n)
        throw std::invalid_argument("limiting: j1 and j2 must lie in 0..n_grid");
    if (basis.vectors.rows() != static_cast<std::size_t>(n) + 1)
        throw std::invalid_argument("limiting: basis does not match the grid size");
}

double min_adjacent_gap(const std::vector<double>& sorted) {
    if (sorted.size() < 2) return 0.0;
    double gap = sorted[1] - sorted[0];
    for (std::size_t i = 2; i < sorted.size(); ++i)
        gap = std::min(gap, sorted[i] - sorted[i - 1]);
    return gap;
}

// Angle between two unit vectors, stable near zero.
double principal_angle(const std::vector<double>& u, const std::vector<double>& v) {
    const double c = dot(u, v);
    double s2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double r = u[i] - c * v[i];
        s2 += r * r;
    }
    return std::asin(std::min(1.0, std::sqrt(s2)));
}

}  // namespace

std::pair<BasisOperator, BasisOperator> projections(const LimitingConfig& c,
                                                    const HahnBasis& basis) {
    validate(c, basis);
    const int m = c.hahn.n_grid + 1;
    const BasisTag tag{BasisKind::grid_delta, m, c.hahn.alpha, c.hahn.beta, m - 1, 0};

    Matrix p1(m, m);
    for (int s = 0; s <= c.j1; ++s) p1(s, s) = 1.0;

    // The full-band projector is the identity operator; assembling it from the
    // eigenvectors would only reintroduce the eigensolver's orthonormality
    // rounding, so that case is exact by construction.
    if (c.j2 == c.hahn.n_grid)
        return {BasisOperator{std::move(p1), tag}, BasisOperator{Matrix::identity(m), tag}};

    Matrix p2(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int n = 0; n <= c.j2; ++n) acc += basis.vectors(i, n) * basis.vectors(j, n);
            p2(i, j) = acc;
        }
    return {BasisOperator{std::move(p1), tag}, BasisOperator{std::move(p2), tag}};
}

LimitingOperators limiting_ops(const BasisOperator& pi1, const BasisOperator& pi2) {
    require_same_space(pi1.basis, pi2.basis, "limiting_ops");
    LimitingOperators ops;
    ops.e1 = op_mul(pi1, pi2);
    ops.e2 = op_mul(pi2, pi1);
    ops.v1 = op_mul(pi1, ops.e2);
    ops.v2 = op_mul(pi2, ops.e1);
    return ops;
}

KernelMatrix kernel_matrix(const LimitingConfig& c, const HahnBasis& basis) {
    validate(c, basis);
    const int n_grid = c.hahn.n_grid;
    const DualityData d = duality_data(c.hahn, basis);

    KernelMatrix out;
    out.k = Matrix(c.j1 + 1, n_grid + 1);
    Matrix k2(c.j1 + 1, n_grid + 1), k3(c.j1 + 1, n_grid + 1);
    for (int t = 0; t <= c.j1; ++t)
        for (int n = 0; n <= n_grid; ++n) {
            double a = 0.0, b = 0.0, cc = 0.0;
            for (int s = 0; s <= c.j2; ++s) {
                a += std::sqrt(d.w[n] * d.w_dual[s]) * d.phi(s, n) * d.chi(t, s);
                b += std::sqrt(d.w[n] * d.w[t]) * d.phi(s, n) * d.phi(s, t);
                cc += d.w_dual[s] * d.chi(n, s) * d.chi(t, s);
            }
            out.k(t, n) = a;
            k2(t, n) = b;
            k3(t, n) = cc;
        }

    double gap = 0.0;
    for (int t = 0; t <= c.j1; ++t)
        for (int n = 0; n <= n_grid; ++n)
            gap = std::max({gap, std::abs(out.k(t, n) - k2(t, n)),
                            std::abs(out.k(t, n) - k3(t, n)),
                            std::abs(k2(t, n) - k3(t, n))});
    out.route_gap = gap;
    if (gap > 1e-10)
        throw std::runtime_error("kernel_matrix: summation routes disagree");

    // The expansion behind K applies pi2 to an arbitrary grid vector and then
    // restricts rows, so the full rectangle is pi1 pi2; it coincides with V1
    // on the columns n <= j1 where pi1 acts as the identity on the right.
    const auto [p1, p2] = projections(c, basis);
    const Matrix e1 = limiting_ops(p1, p2).e1.matrix;
    double dg = 0.0;
    for (int t = 0; t <= c.j1; ++t)
        for (int n = 0; n <= n_grid; ++n)
            dg = std::max(dg, std::abs(out.k(t, n) - e1(t, n)));
    out.direct_gap = dg;
    return out;
}

CommutingSolution commuting_tau(const LimitingConfig& c, const HahnBasis& basis) {
    validate(c, basis);
    const int n = c.hahn.n_grid;
    if (c.j1 >= n || c.j2 >= n)
        throw std::invalid_argument(
            "commuting_tau: boundary configs have no J+1 condition; use solve");

    CommutingSolution sol;
    sol.tau = HeunTau{0.0, 0.5, 0.5, -(basis.mu[c.j2] + basis.mu[c.j2 + 1]) / 2.0,
                      -(2.0 * c.j1 + 1.0) / 2.0};

    const BasisOperator grid_m =
        algebraic_heun(grid_x(n), hahn_operator(c.hahn), sol.tau);
    const int m = n + 1;
    sol.m_matrix = Matrix(m, m);
    for (int i = 0; i < m; ++i) sol.m_matrix(i, i) = grid_m.matrix(i, i);
    for (int i = 0; i + 1 < m; ++i) {
        // weight conjugation makes the two off-diagonal images coincide;
        // average away the last rounding difference to keep M exactly symmetric
        const double up = std::sqrt(basis.w[i] / basis.w[i + 1]) * grid_m.matrix(i, i + 1);
        const double dn = std::sqrt(basis.w[i + 1] / basis.w[i]) * grid_m.matrix(i + 1, i);
        const double v = (up + dn) / 2.0;
        sol.m_matrix(i, i + 1) = v;
        sol.m_matrix(i + 1, i) = v;
    }

    const auto [p1, p2] = projections(c, basis);
    const double scale = frobenius_norm(sol.m_matrix);
    sol.commutator_residuals = {
        frobenius_norm(sol.m_matrix * p1.matrix - p1.matrix * sol.m_matrix),
        frobenius_norm(sol.m_matrix * p2.matrix - p2.matrix * sol.m_matrix)};
    if (sol.commutator_residuals.first > 1e-10 * scale ||
        sol.commutator_residuals.second > 1e-10 * scale)
        throw std::runtime_error("commuting_tau: commutator residual above tolerance");

    // Gap diagnostic on the pi1 block only. Double commutation forces every
    // block eigenvalue to reappear in the complementary block (the four
    // range/kernel intersections cannot hold a full simple spectrum), so the
    // full-grid gap is structurally zero and says nothing about whether the
    // eigenvectors used downstream are well conditioned.
    SymTridiag tri;
    tri.diag.resize(c.j1 + 1);
    tri.offdiag.resize(c.j1);
    for (int i = 0; i <= c.j1; ++i) tri.diag[i] = sol.m_matrix(i, i);
    for (int i = 0; i < c.j1; ++i) tri.offdiag[i] = sol.m_matrix(i, i + 1);
    const EigenDecomposition eig = sym_tridiag_eig(tri);
    sol.spectrum_gap = min_adjacent_gap(eig.values);
    const double spread = eig.values.back() - eig.values.front();
    sol.degenerate_spectrum = eig.values.size() > 1 && sol.spectrum_gap < 1e-8 * spread;
    return sol;
}

SpectralReport solve(const LimitingConfig& c) {
    return solve(c, hahn_basis(c.hahn));
}

SpectralReport solve(const LimitingConfig& c, const HahnBasis& basis) {
    validate(c, basis);
    const int n = c.hahn.n_grid;
    const auto [p1, p2] = projections(c, basis);
    const Matrix v1 = limiting_ops(p1, p2).v1.matrix;

    SpectralReport rep;
    if (c.j1 == n || c.j2 == n) {
        rep.boundary_case = true;
        const int bs = c.j1 + 1;
        const EigenDecomposition direct = dense_sym_eig(block(v1, 0, 0, bs, bs));
        rep.v1_eigs_direct = direct.values;
        // analytic spectrum: pi1 alone (j2 = N) or pi2 alone (j1 = N)
        rep.v1_eigs_via_m.assign(bs, 0.0);
        const int ones = (c.j2 == n) ? bs : c.j2 + 1;
        for (int i = 0; i < ones; ++i) rep.v1_eigs_via_m[bs - 1 - i] = 1.0;
        rep.v1_min_gap = min_adjacent_gap(rep.v1_eigs_direct);
        return rep;
    }

    const CommutingSolution sol = commuting_tau(c, basis);
    const double mnorm = frobenius_norm(sol.m_matrix);
    if (std::abs(sol.m_matrix(c.j1 + 1, c.j1)) > 1e-10 * mnorm)
        throw std::runtime_error("solve: M mixes the pi1 range with its kernel");

    const int bs = c.j1 + 1;
    SymTridiag tri;
    tri.diag.resize(bs);
    tri.offdiag.resize(bs - 1);
    for (int i = 0; i < bs; ++i) tri.diag[i] = sol.m_matrix(i, i);
    for (int i = 0; i + 1 < bs; ++i) tri.offdiag[i] = sol.m_matrix(i, i + 1);
    const EigenDecomposition meig = sym_tridiag_eig(tri);
    rep.m_eigs = meig.values;
    rep.m_min_gap = min_adjacent_gap(meig.values);

    const Matrix v1b = block(v1, 0, 0, bs, bs);
    const EigenDecomposition direct = dense_sym_eig(v1b);
    rep.v1_eigs_direct = direct.values;
    rep.v1_min_gap = min_adjacent_gap(direct.values);

    // Rayleigh quotients through the eigenvectors of M. Commuting operators
    // share eigenspaces, not eigenvectors, so (near-)degenerate clusters of M
    // get V1 re-diagonalized inside the cluster subspace.
    Matrix q = meig.vectors;
    std::vector<double> via(bs, 0.0);
    const double spread =
        std::max(meig.values.back() - meig.values.front(), 1e-300);
    int lo = 0;
    while (lo < bs) {
        int hi = lo;
        while (hi + 1 < bs && meig.values[hi + 1] - meig.values[hi] < 1e-8 * spread) ++hi;
        if (hi == lo) {
            std::vector<double> v(bs);
            for (int i = 0; i < bs; ++i) v[i] = q(i, lo);
            via[lo] = dot(v, v1b * v);
        } else {
            rep.used_cluster_fallback = true;
            const int cs = hi - lo + 1;
            Matrix sub(bs, cs);
            for (int i = 0; i < bs; ++i)
                for (int j = 0; j < cs; ++j) sub(i, j) = q(i, lo + j);
            const Matrix cross = transposed(sub) * (v1b * sub);
            const EigenDecomposition inner = dense_sym_eig(cross);
            const Matrix rot = sub * inner.vectors;
            for (int j = 0; j < cs; ++j) {
                via[lo + j] = inner.values[j];
                for (int i = 0; i < bs; ++i) q(i, lo + j) = rot(i, j);
            }
        }
        lo = hi + 1;
    }

    // ascending pairing against the direct route
    std::vector<int> order(bs);
    for (int i = 0; i < bs; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return via[a] < via[b]; });
    rep.v1_eigs_via_m.resize(bs);
    for (int i = 0; i < bs; ++i) rep.v1_eigs_via_m[i] = via[order[i]];

    double worst_angle = 0.0;
    for (int i = 0; i < bs; ++i) {
        double gap = 1e300;
        for (int j = 0; j < bs; ++j)
            if (j != i) gap = std::min(gap, std::abs(direct.values[i] - direct.values[j]));
        if (bs > 1 && gap <= 1e-10) continue;  // spectrum too clustered to pin vectors
        std::vector<double> u(bs), v(bs);
        for (int r = 0; r < bs; ++r) {
            u[r] = direct.vectors(r, i);
            v[r] = q(r, order[i]);
        }
        worst_angle = std::max(worst_angle, principal_angle(u, v));
    }
    rep.eigenvector_agreement = worst_angle;
    return rep;
}

}  // namespace heunlim
