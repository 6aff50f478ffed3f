#include "heunlim/heun.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "heunlim/linalg.hpp"
#include "heunlim/matrix.hpp"
#include "heunlim/operators.hpp"
#include "heunlim/orthopoly.hpp"
#include "support/oracles.hpp"

using namespace heunlim;
using heunlim::testing::TestRng;

namespace {

double entrywise_gap(const Matrix& a, const Matrix& b, int max_col) {
    double gap = 0.0;
    for (std::size_t j = 0; j <= static_cast<std::size_t>(max_col); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i)
            gap = std::max(gap, std::abs(a(i, j) - b(i, j)));
    return gap;
}

// Leading Newton coefficient of samples on the integer nodes 0..n; for exact
// polynomial data this is the monomial leading coefficient.
double newton_top(const std::vector<double>& samples) {
    std::vector<double> c = samples;
    const int n = static_cast<int>(c.size()) - 1;
    for (int j = 1; j <= n; ++j)
        for (int i = n; i >= j; --i) c[i] = (c[i] - c[i - 1]) / j;
    return c[n];
}

}  // namespace

TEST_CASE("four-singularity build maps low monomials to their hand images") {
    HeunDiffParams p;
    p.gamma = 1.0;
    p.delta = 1.0;
    p.alpha_h = 2.0;
    p.beta_h = 1.0;
    p.epsilon = 2.0;  // alpha_h + beta_h - gamma - delta + 1
    p.d_sing = 2.0;
    p.q = 0.7;
    p.lambda = 0.0;

    const BasisOperator w = heun_diff_build(p, 10);
    CHECK(w.basis.window == 9);
    CHECK(w.basis.raise == 1);

    // image of 1: q - (alpha_h beta_h) x
    CHECK(w.matrix(0, 0) == doctest::Approx(0.7).epsilon(1e-14));
    CHECK(w.matrix(1, 0) == doctest::Approx(-2.0).epsilon(1e-14));
    // image of x: -2 + 7.7 x - 6 x^2
    CHECK(w.matrix(0, 1) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(w.matrix(1, 1) == doctest::Approx(7.7).epsilon(1e-14));
    CHECK(w.matrix(2, 1) == doctest::Approx(-6.0).epsilon(1e-14));
    // image of x^2: 0 x + 8.7 x^2 - 8 x^3
    CHECK(w.matrix(1, 2) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(w.matrix(2, 2) == doctest::Approx(8.7).epsilon(1e-14));
    CHECK(w.matrix(3, 2) == doctest::Approx(-8.0).epsilon(1e-14));

    // tridiagonal in degree: nothing beyond one band off the diagonal
    for (std::size_t j = 0; j < w.matrix.cols(); ++j)
        for (std::size_t i = 0; i < w.matrix.rows(); ++i)
            if (i + 1 < j || j + 1 < i) CHECK(w.matrix(i, j) == 0.0);

    SUBCASE("regularity violation at infinity is rejected") {
        HeunDiffParams bad = p;
        bad.epsilon = 5.0;
        CHECK_THROWS_AS(heun_diff_build(bad, 10), std::invalid_argument);
    }
    SUBCASE("third singular point may not collide with 0 or 1") {
        HeunDiffParams bad = p;
        bad.d_sing = 0.0;
        CHECK_THROWS_AS(heun_diff_build(bad, 10), std::invalid_argument);
        bad.d_sing = 1.0;
        CHECK_THROWS_AS(heun_diff_build(bad, 10), std::invalid_argument);
    }
}

TEST_CASE("bilinear combination degenerates to its building blocks") {
    const JacobiParams p{0.3, 0.7};
    const int cap = 8;
    const BasisOperator x = monomial_x(cap);
    const BasisOperator y = monomial_hypergeom(p, cap);

    const BasisOperator wx = algebraic_heun(x, y, {0.0, 0.0, 0.0, 1.0, 0.0});
    CHECK(entrywise_gap(wx.matrix, x.matrix, cap) == 0.0);

    const BasisOperator wy = algebraic_heun(x, y, {0.0, 0.0, 0.0, 0.0, 1.0});
    CHECK(entrywise_gap(wy.matrix, y.matrix, cap) == 0.0);

    const BasisOperator wi = algebraic_heun(x, y, {2.5, 0.0, 0.0, 0.0, 0.0});
    for (int j = 0; j <= cap; ++j) CHECK(wi.matrix(j, j) == 2.5);

    const BasisOperator comm = algebraic_heun(x, y, {0.0, 1.0, -1.0, 0.0, 0.0});
    const Matrix direct = x.matrix * y.matrix - y.matrix * x.matrix;
    CHECK(entrywise_gap(comm.matrix, direct, comm.basis.window) <= 1e-13);
    CHECK(comm.basis.window == cap - 1);
    CHECK(comm.basis.raise == 1);
}

TEST_CASE("expanded coefficient build matches the operator product on its window") {
    const JacobiParams p{0.3, 0.7};
    const int cap = 12;
    const BasisOperator x = monomial_x(cap);
    const BasisOperator y = monomial_hypergeom(p, cap);
    TestRng rng(41);
    for (int draw = 0; draw < 6; ++draw) {
        HeunTau t{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                  rng.uniform(-1, 1), rng.uniform(-1, 1)};
        if (draw == 0) t.t2 = 1.0 - t.t1;  // normalized second-order part
        const BasisOperator direct = algebraic_heun(x, y, t);
        const BasisOperator expanded = heun_jacobi_expanded(t, p, cap);
        const double scale = std::max(1.0, max_abs(direct.matrix));
        CHECK(entrywise_gap(expanded.matrix, direct.matrix, direct.basis.window) <=
              1e-12 * scale);
    }
}

TEST_CASE("parameter identification is exact and flags its degenerations") {
    const JacobiParams p{0.3, 0.7};
    TestRng rng(97);
    for (int draw = 0; draw < 8; ++draw) {
        HeunTau t{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                  rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const double tsum = t.t1 + t.t2;
        if (std::abs(tsum) < 0.1) {
            t.t1 += 0.5;
        }
        // keep the third singular point comfortably away from 0 and 1
        t.t4 = 0.6 * (t.t1 + t.t2) * (1.0 + 0.3 * rng.uniform(0, 1));

        const HeunDiffParams m = match_heun_params(t, p);
        REQUIRE(!m.degenerate);
        CHECK(m.fit_residual <= 1e-10);
        CHECK(m.scale == doctest::Approx(-1.0 / (t.t1 + t.t2)).epsilon(1e-14));
        CHECK(m.gamma == doctest::Approx(-(p.alpha + 1.0)).epsilon(1e-14));
        CHECK(m.delta == doctest::Approx(-(p.beta + 1.0)).epsilon(1e-14));
        const double fuchs = m.epsilon - (m.exponent_sum - m.gamma - m.delta + 1.0);
        CHECK(std::abs(fuchs) <= 1e-13);
        if (!m.complex_exponents) {
            CHECK(m.alpha_h + m.beta_h == doctest::Approx(m.exponent_sum).epsilon(1e-12));
            CHECK(m.alpha_h * m.beta_h ==
                  doctest::Approx(m.exponent_product).epsilon(1e-10));
        }
    }

    SUBCASE("vanishing second-order part has no four-singularity form") {
        const HeunDiffParams m = match_heun_params({0.1, 0.5, -0.5, 0.3, 0.2}, p);
        CHECK(m.degenerate);
    }
    SUBCASE("singular point colliding with an endpoint is reported, not built") {
        const HeunDiffParams at0 = match_heun_params({0.0, 0.7, 0.3, 0.2, 0.0}, p);
        CHECK(at0.degenerate);
        const HeunDiffParams at1 = match_heun_params({0.0, 0.7, 0.3, 0.2, -1.0}, p);
        CHECK(at1.degenerate);
    }
    SUBCASE("complex exponent pair keeps a real operator and a small residual") {
        const HeunDiffParams m = match_heun_params({0.0, 1.0, 0.0, 10.0, -0.3}, p);
        REQUIRE(!m.degenerate);
        CHECK(m.complex_exponents);
        CHECK(m.alpha_h == doctest::Approx(0.5 * m.exponent_sum).epsilon(1e-14));
        CHECK(m.fit_residual <= 1e-10);
    }
}

TEST_CASE("monic-basis image of the combination carries the stated three bands") {
    const JacobiParams p{0.3, 0.7};
    const int cap = 10;
    const RecurrencePair rec = jacobi_recurrence(p, cap);
    const Matrix rows = jacobi_basis_matrix(rec, cap);
    std::vector<double> lam(cap + 1);
    for (int n = 0; n <= cap; ++n) lam[n] = -n * (n + p.alpha + p.beta + 1.0);
    const BasisOperator x = monomial_x(cap);
    const BasisOperator y = monomial_hypergeom(p, cap);

    SUBCASE("position operator recovers the recurrence itself") {
        const HeunTau t{0.0, 0.0, 0.0, 1.0, 0.0};
        const BasisOperator m = to_jacobi_basis(algebraic_heun(x, y, t), p, rows);
        const TridiagonalAction act = tridiagonal_action(m, t, rec, lam);
        CHECK(act.leakage <= 1e-13);
        CHECK(act.dev_xi <= 1e-12);
        CHECK(act.dev_eta <= 1e-12);
        CHECK(act.dev_zeta_u <= 1e-12);
        CHECK(std::abs(act.eta_shift) <= 1e-12);
        for (int n = 1; n <= m.basis.window; ++n) {
            CHECK(act.xi[n] == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(act.eta[n] == doctest::Approx(rec.b[n]).epsilon(1e-11));
            CHECK(act.zeta_u[n] == doctest::Approx(rec.u[n]).epsilon(1e-10));
        }
    }
    SUBCASE("hypergeometric operator stays diagonal") {
        const HeunTau t{0.0, 0.0, 0.0, 0.0, 1.0};
        const BasisOperator m = to_jacobi_basis(algebraic_heun(x, y, t), p, rows);
        const TridiagonalAction act = tridiagonal_action(m, t, rec, lam);
        CHECK(act.dev_eta <= 1e-11);
        for (int n = 1; n <= m.basis.window; ++n) {
            CHECK(std::abs(act.xi[n]) <= 1e-12);
            CHECK(act.eta[n] == doctest::Approx(lam[n]).epsilon(1e-12));
        }
    }
    SUBCASE("random combinations match the closed-form bands") {
        TestRng rng(7);
        for (int draw = 0; draw < 5; ++draw) {
            const HeunTau t{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                            rng.uniform(-1, 1), rng.uniform(-1, 1)};
            const BasisOperator m = to_jacobi_basis(algebraic_heun(x, y, t), p, rows);
            const TridiagonalAction act = tridiagonal_action(m, t, rec, lam);
            CHECK(act.dev_xi <= 1e-9);
            CHECK(act.dev_zeta_u <= 1e-9);
            CHECK(act.dev_eta <= 1e-9);
            CHECK(act.eta_shift == doctest::Approx(t.t0).epsilon(1e-9));
        }
    }
    SUBCASE("an off-band operator is refused") {
        const BasisOperator x2 = op_mul(x, x);
        const BasisOperator m = to_jacobi_basis(x2, p, rows);
        CHECK_THROWS_AS(tridiagonal_action(m, {0.0, 0.0, 0.0, 1.0, 0.0}, rec, lam),
                        std::runtime_error);
    }
}

TEST_CASE("truncation parameters close the top of the raising band") {
    const JacobiParams p{0.2, 0.4};

    const TruncationData td1 = truncation_setup(p, 1);
    CHECK(td1.tau2 == 0.0);
    CHECK(td1.nu == 2.0);
    CHECK(td1.tau3 == doctest::Approx(2.6).epsilon(1e-14));

    for (int n : {2, 5, 9}) {
        const TruncationData td = truncation_setup(p, n);
        // two printed forms of the same coefficient
        CHECK(td.tau3 ==
              doctest::Approx((n + 1) * (p.alpha + p.beta + 2.0) / 2.0).epsilon(1e-13));
        CHECK(td.alpha_t == doctest::Approx(-(n + p.alpha + p.beta + 2.0)).epsilon(1e-14));
        CHECK(td.lambda_shift ==
              doctest::Approx((p.alpha + 1.0) * (n + 1.0) / 2.0).epsilon(1e-14));
        CHECK(td.lambda_t[0] == doctest::Approx(td.lambda_shift).epsilon(1e-14));
        // the tau2/nu combination printed alongside the transformed parameter
        // is plain arithmetic, independent of which parameter actually works
        CHECK(2.0 * (td.tau2 + td.nu) - p.alpha - p.beta - 7.0 ==
              doctest::Approx(n - p.alpha - p.beta - 4.0).epsilon(1e-12));
    }

    SUBCASE("truncated block is lower bidiagonal with the closed-form diagonal") {
        const int n = 6;
        const TruncationData td = truncation_setup(p, n);
        double leak = -1.0;
        const BasisOperator w = truncated_heun(td, p, &leak);
        CHECK(leak >= 0.0);
        CHECK(leak <= 1e-11);
        CHECK(w.basis.dim == n + 1);
        REQUIRE(w.matrix.rows() == static_cast<std::size_t>(n + 1));
        for (int j = 0; j <= n; ++j) {
            const double diag = j * j + j * (p.alpha + 2.0 * td.tau2) +
                                (p.alpha + 1.0) * td.tau2;
            CHECK(w.matrix(j, j) == doctest::Approx(diag).epsilon(1e-12));
            for (int i = 0; i <= n; ++i)
                if (i != j && i != j + 1) CHECK(std::abs(w.matrix(i, j)) <= 1e-13);
        }
    }
}

TEST_CASE("reversed-parameter rows are eigenvectors of the truncated operator") {
    const JacobiParams p{0.2, 0.4};
    const int n = 4;
    const TruncationData td = truncation_setup(p, n);
    const BasisOperator w = truncated_heun(td, p);
    const Matrix psi = psi_basis(td, p);

    // psi_0 is the pure top-degree monomial
    CHECK(psi(0, n) == 1.0);
    for (int j = 0; j < n; ++j) CHECK(psi(0, j) == 0.0);
    // every row is monic in its lowest-degree entry
    for (int i = 0; i <= n; ++i) CHECK(psi(i, n - i) == 1.0);

    // eigenvalues pair with the operator diagonal in reversed order
    for (int k = 0; k <= n; ++k)
        CHECK(td.lambda_t[k] == doctest::Approx(w.matrix(n - k, n - k)).epsilon(1e-12));

    const Matrix image = w.matrix * transposed(psi);
    for (int k = 0; k <= n; ++k) {
        double rowscale = 0.0;
        for (int j = 0; j <= n; ++j) rowscale = std::max(rowscale, std::abs(psi(k, j)));
        double resid = 0.0;
        for (int i = 0; i <= n; ++i)
            resid = std::max(resid, std::abs(image(i, k) - td.lambda_t[k] * psi(k, i)));
        CHECK(resid / rowscale <= 1e-9);
    }

    SUBCASE("vanishing transformed denominator is refused up front") {
        const TruncationData bad = truncation_setup({0.0, 0.4}, 1);
        CHECK_THROWS_AS(psi_basis(bad, {0.0, 0.4}), std::domain_error);
    }
    SUBCASE("the other printed transformed parameter is not an eigenbasis") {
        TruncationData wrong = td;
        wrong.alpha_t = n - p.alpha - p.beta - 4.0;
        for (int k = 0; k <= n; ++k)
            wrong.lambda_t[k] =
                k * (k + wrong.alpha_t + wrong.beta_t + 1.0) + wrong.lambda_shift;
        const Matrix bad = psi_basis(wrong, p);
        const Matrix img = w.matrix * transposed(bad);
        double worst = 0.0;
        for (int k = 0; k <= n; ++k) {
            double rowscale = 0.0, resid = 0.0;
            for (int j = 0; j <= n; ++j)
                rowscale = std::max(rowscale, std::abs(bad(k, j)));
            for (int i = 0; i <= n; ++i)
                resid = std::max(resid,
                                 std::abs(img(i, k) - wrong.lambda_t[k] * bad(k, i)));
            worst = std::max(worst, resid / rowscale);
        }
        CHECK(worst >= 1e-2);
    }
}

TEST_CASE("expansion coefficients agree across the solve and quadrature routes") {
    const JacobiParams p{0.2, 0.4};
    const int n = 5;
    const TruncationData td = truncation_setup(p, n);
    const ExpansionData ex = wilson_expansion(td, p);

    CHECK(ex.route_error <= 1e-9);
    CHECK(ex.gram_error <= 1e-11);
    CHECK(ex.recurrence_residual <= 1e-8);

    // the constant polynomial is orthogonal to every transform with n >= 1,
    // so exactly those columns lose the leading-entry gauge
    REQUIRE(ex.degenerate_gauge.size() == static_cast<std::size_t>(n));
    for (int c = 1; c <= n; ++c) CHECK(ex.degenerate_gauge[c - 1] == c);
    double colmax0 = 0.0;
    for (int k = 0; k <= n; ++k) colmax0 = std::max(colmax0, std::abs(ex.g(k, 1)));
    CHECK(std::abs(ex.g(0, 1)) <= 1e-12 * colmax0);

    for (int k = 0; k <= n; ++k) CHECK(ex.q(k, 0) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK(ex.printed_dev_b <= 1e-8);
    CHECK(ex.printed_dev_u <= 1e-8);
    CHECK(ex.printed_dev_f <= 1e-8);

    // frozen band values for this parameter set
    CHECK(std::abs(ex.b[0]) <= 1e-8);
    CHECK(ex.u[0] == doctest::Approx(3.6).epsilon(1e-9));
    CHECK(ex.b[1] == doctest::Approx(-0.5535151678818976).epsilon(1e-8));
    CHECK(ex.u[1] == doctest::Approx(2.5739130434782607).epsilon(1e-8));
    CHECK(ex.f[1] == doctest::Approx(13.0).epsilon(1e-9));
}

TEST_CASE("difference operator on the grid has the stated hand image") {
    DiffHeunParams dp;
    dp.kappa = 1.0;
    dp.n_grid = 2;
    const BasisOperator w = difference_heun(dp);
    const double expect[3][3] = {{0, 0, 0}, {1, 0, -1}, {0, 8, -8}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(w.matrix(i, j) == expect[i][j]);
}

TEST_CASE("difference operator raises sample degree by at most one") {
    DiffHeunParams dp;
    dp.kappa = 0.8;
    dp.mu1 = -0.3;
    dp.mu0 = 1.1;
    dp.nu1 = 0.4;
    dp.nu0 = -0.9;
    dp.r1 = 2.0;
    dp.r0 = -0.5;
    dp.n_grid = 8;
    const BasisOperator w = difference_heun(dp);

    SUBCASE("constants map to the affine multiplier") {
        std::vector<double> ones(9, 1.0);
        const std::vector<double> img = w.matrix * ones;
        for (int x = 0; x <= 8; ++x)
            CHECK(img[x] == doctest::Approx(dp.r1 * x + dp.r0).epsilon(1e-13));
    }
    SUBCASE("powers gain at most one degree") {
        for (int k = 0; k <= 3; ++k) {
            std::vector<double> samples(9);
            for (int x = 0; x <= 8; ++x) samples[x] = std::pow(double(x), k);
            const std::vector<double> img = w.matrix * samples;
            CHECK(grid_poly_degree(img) <= k + 1);
        }
    }
}

TEST_CASE("hahn realization matches the generic combination entrywise") {
    const HahnParams p{0.3, 0.7, 6};
    const BasisOperator x = grid_x(p.n_grid);
    const BasisOperator y = hahn_operator(p);
    TestRng rng(303);
    for (int draw = 0; draw < 5; ++draw) {
        const HeunTau t{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                        rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const BasisOperator direct = algebraic_heun(x, y, t);
        const BasisOperator closed = heun_hahn(t, p);
        const double scale = std::max(1.0, max_abs(direct.matrix));
        CHECK(entrywise_gap(closed.matrix, direct.matrix, p.n_grid) <= 1e-11 * scale);
    }

    SUBCASE("pure position and pure difference parts come back unchanged") {
        const BasisOperator wx = heun_hahn({0.0, 0.0, 0.0, 1.0, 0.0}, p);
        CHECK(entrywise_gap(wx.matrix, x.matrix, p.n_grid) == 0.0);
        const BasisOperator wy = heun_hahn({0.0, 0.0, 0.0, 0.0, 1.0}, p);
        CHECK(entrywise_gap(wy.matrix, y.matrix, p.n_grid) <= 1e-13);
    }
}

TEST_CASE("difference parameters rebuild the hahn image exactly") {
    const HahnParams p{0.3, 0.7, 7};
    TestRng rng(55);
    for (int draw = 0; draw < 4; ++draw) {
        const HeunTau t{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                        rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const DiffHeunParams dp = param_match_difference(t, p);
        CHECK(dp.kappa == doctest::Approx(t.t1 + t.t2).epsilon(1e-14));
        CHECK(dp.n_grid == p.n_grid);
        const BasisOperator rebuilt = difference_heun(dp);
        const BasisOperator direct = heun_hahn(t, p);
        const double scale = std::max(1.0, max_abs(direct.matrix));
        CHECK(entrywise_gap(rebuilt.matrix, direct.matrix, p.n_grid) <= 1e-12 * scale);
    }
}

TEST_CASE("leading coefficient of the raised image is grid-size independent") {
    const HeunTau t{0.2, 0.7, 0.3, -0.4, 0.6};
    const double alpha = 0.3, beta = 0.7;
    const int k = 3;
    std::vector<double> tops;
    for (int n : {8, 12}) {
        const HahnParams p{alpha, beta, n};
        const BasisOperator w = heun_hahn(t, p);
        std::vector<double> samples(n + 1);
        for (int x = 0; x <= n; ++x) samples[x] = std::pow(double(x), k);
        std::vector<double> img = w.matrix * samples;
        img.resize(k + 2);  // degree k+1 needs k+2 nodes
        tops.push_back(newton_top(img));
    }
    CHECK(tops[0] == doctest::Approx(tops[1]).epsilon(1e-11));
}

TEST_CASE("newton degree detection is stable on exact samples") {
    std::vector<double> cubic(7), flat(7, 2.5), zero(7, 0.0);
    for (int x = 0; x < 7; ++x) cubic[x] = 1.0 * x * x * x - 2.0 * x + 5.0;
    CHECK(grid_poly_degree(cubic) == 3);
    CHECK(grid_poly_degree(flat) == 0);
    CHECK(grid_poly_degree(zero) == 0);

    std::vector<double> quintic(10);
    for (int x = 0; x < 10; ++x) quintic[x] = std::pow(double(x), 5) - x;
    CHECK(grid_poly_degree(quintic) == 5);

    std::vector<double> jitter(7);
    for (int x = 0; x < 7; ++x) jitter[x] = double(x) * x + (x % 2 ? 1e-13 : -1e-13);
    CHECK(grid_poly_degree(jitter, 1e-9) == 2);
    CHECK_THROWS_AS(grid_poly_degree({}), std::invalid_argument);
}
