#include "heunlim/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "heunlim/linalg.hpp"

namespace heunlim {

namespace {

bool finite_basis(BasisKind k) {
    return k == BasisKind::grid_delta || k == BasisKind::hahn;
}

// Unit eigenvector of the symmetric tridiagonal (diag, off) for an already
// known eigenvalue, by inverse iteration. off[k] couples rows k-1 and k;
// off[0] is unused. The shifts come from closed-form spectra, so two solves
// purify any start that is not exactly orthogonal to the target.
std::vector<double> tridiag_unit_eigenvector(const std::vector<double>& diag,
                                             const std::vector<double>& off, double shift) {
    const int m = static_cast<int>(diag.size());
    // LU factors of (T - shift I) with partial pivoting; a second
    // superdiagonal fills in wherever rows swap.
    std::vector<double> dd(m), u1(m, 0.0), u2(m, 0.0), dl(m, 0.0);
    std::vector<char> swapped(m, 0);
    double tnorm = 1.0;
    for (int k = 0; k < m; ++k) {
        dd[k] = diag[k] - shift;
        if (k + 1 < m) u1[k] = off[k + 1];
        tnorm = std::max(tnorm, std::abs(diag[k]) + 2.0 * std::abs(off[k]));
    }
    const double tiny = std::numeric_limits<double>::epsilon() * tnorm;
    const auto floored = [tiny](double v) {
        if (std::abs(v) >= tiny) return v;
        return v < 0.0 ? -tiny : tiny;
    };
    for (int k = 0; k + 1 < m; ++k) {
        const double sub = off[k + 1];
        if (std::abs(dd[k]) >= std::abs(sub)) {
            dd[k] = floored(dd[k]);
            dl[k] = sub / dd[k];
            dd[k + 1] -= dl[k] * u1[k];
        } else {
            const double fact = dd[k] / sub;
            dl[k] = fact;
            swapped[k] = 1;
            dd[k] = sub;
            const double temp = u1[k];
            u1[k] = dd[k + 1];
            dd[k + 1] = temp - fact * dd[k + 1];
            if (k + 2 < m) {
                u2[k] = u1[k + 1];
                u1[k + 1] = -fact * u1[k + 1];
            }
        }
    }
    dd[m - 1] = floored(dd[m - 1]);

    const auto solve = [&](std::vector<double>& b) {
        for (int k = 0; k + 1 < m; ++k) {
            if (swapped[k]) std::swap(b[k], b[k + 1]);
            b[k + 1] -= dl[k] * b[k];
        }
        for (int k = m - 1; k >= 0; --k) {
            double v = b[k];
            if (k + 1 < m) v -= u1[k] * b[k + 1];
            if (k + 2 < m) v -= u2[k] * b[k + 2];
            b[k] = v / dd[k];
        }
    };
    const auto normalize = [&](std::vector<double>& b) {
        double s = 0.0;
        for (double v : b) s += v * v;
        s = std::sqrt(s);
        for (double& v : b) v /= s;
    };

    // The ramp breaks the symmetry of persymmetric matrices, whose alternating
    // eigenvectors a constant start never reaches.
    std::vector<double> b(m);
    for (int k = 0; k < m; ++k) b[k] = 1.0 + 0.25 * k;
    solve(b);
    normalize(b);
    solve(b);
    normalize(b);
    return b;
}

}  // namespace

BasisOperator op_mul(const BasisOperator& a, const BasisOperator& b) {
    require_same_space(a.basis, b.basis, "op_mul");
    BasisOperator out{a.matrix * b.matrix, a.basis};
    if (finite_basis(a.basis.kind)) {
        out.basis.window = a.basis.dim - 1;
        out.basis.raise = 0;
    } else {
        // b acts first: inputs up to its window are exact, and a must still
        // be exact on the raised degrees b hands it.
        out.basis.window = std::min(b.basis.window, a.basis.window - b.basis.raise);
        out.basis.raise = a.basis.raise + b.basis.raise;
    }
    return out;
}

BasisOperator op_add(const BasisOperator& a, const BasisOperator& b) {
    require_same_space(a.basis, b.basis, "op_add");
    BasisOperator out{a.matrix + b.matrix, a.basis};
    out.basis.window = std::min(a.basis.window, b.basis.window);
    out.basis.raise = std::max(a.basis.raise, b.basis.raise);
    return out;
}

BasisOperator op_sub(const BasisOperator& a, const BasisOperator& b) {
    require_same_space(a.basis, b.basis, "op_sub");
    BasisOperator out{a.matrix - b.matrix, a.basis};
    out.basis.window = std::min(a.basis.window, b.basis.window);
    out.basis.raise = std::max(a.basis.raise, b.basis.raise);
    return out;
}

BasisOperator op_scale(double s, const BasisOperator& a) {
    return {s * a.matrix, a.basis};
}

BasisOperator op_identity(const BasisTag& tag) {
    BasisTag t = tag;
    t.window = tag.dim - 1;
    t.raise = 0;
    return {Matrix::identity(tag.dim), t};
}

BasisOperator monomial_x(int degree_cap) {
    if (degree_cap < 1) throw std::invalid_argument("monomial_x: need degree cap >= 1");
    const int m = degree_cap + 1;
    Matrix x(m, m);
    for (int j = 0; j + 1 < m; ++j) x(j + 1, j) = 1.0;
    return {std::move(x), BasisTag{BasisKind::monomial, m, 0.0, 0.0, degree_cap - 1, 1}};
}

BasisOperator monomial_hypergeom(const JacobiParams& p, int degree_cap) {
    if (degree_cap < 1) throw std::invalid_argument("monomial_hypergeom: need degree cap >= 1");
    const int m = degree_cap + 1;
    Matrix d(m, m);
    for (int j = 0; j < m; ++j) {
        d(j, j) = -static_cast<double>(j) * (j + p.alpha + p.beta + 1.0);
        if (j >= 1) d(j - 1, j) = j * (j + p.alpha);
    }
    return {std::move(d), BasisTag{BasisKind::monomial, m, p.alpha, p.beta, degree_cap, 0}};
}

Matrix jacobi_basis_matrix(const RecurrencePair& rec, int degree_cap) {
    if (degree_cap < 0 || static_cast<std::size_t>(degree_cap) > rec.nmax())
        throw std::invalid_argument("jacobi_basis_matrix: degree cap exceeds the recurrence");
    const int m = degree_cap + 1;
    Matrix rows(m, m);
    rows(0, 0) = 1.0;
    for (int n = 0; n + 1 < m; ++n) {
        for (int j = 0; j <= n; ++j) {
            rows(n + 1, j + 1) += rows(n, j);                      // shift by x
            rows(n + 1, j) -= rec.b[n] * rows(n, j);
            if (n >= 1) rows(n + 1, j) -= rec.u[n] * rows(n - 1, j);
        }
    }
    return rows;
}

BasisOperator to_jacobi_basis(const BasisOperator& op, const JacobiParams& p,
                              const Matrix& basis_rows) {
    if (op.basis.kind != BasisKind::monomial)
        throw std::invalid_argument("to_jacobi_basis: operator must act on monomials");
    if (basis_rows.rows() != op.basis.dim || basis_rows.cols() != op.basis.dim)
        throw std::invalid_argument("to_jacobi_basis: coefficient matrix has the wrong shape");

    // Columns of P^T hold the polynomial coefficients; conjugating by P^T
    // re-expresses the same action on coefficients in the monic family.
    const Matrix pt = transposed(basis_rows);
    Matrix rhs = op.matrix * pt;
    Matrix out = solve_unit_upper(pt, rhs);

    BasisTag tag = op.basis;
    tag.kind = BasisKind::jacobi;
    tag.alpha = p.alpha;
    tag.beta = p.beta;
    return {std::move(out), tag};
}

BasisOperator grid_x(int n_grid) {
    if (n_grid < 1) throw std::invalid_argument("grid_x: need at least two grid points");
    const int m = n_grid + 1;
    Matrix x(m, m);
    for (int s = 0; s < m; ++s) x(s, s) = s;
    return {std::move(x), BasisTag{BasisKind::grid_delta, m, 0.0, 0.0, m - 1, 0}};
}

DualityData duality_data(const HahnParams& p, const HahnBasis& basis) {
    const int m = basis.vectors.rows();
    if (m != p.n_grid + 1)
        throw std::invalid_argument("duality_data: basis does not match the grid size");

    DualityData d;
    d.overlap = basis.vectors;
    d.w = basis.w;
    d.w_dual = basis.w_dual;

    // Signed recurrence of the position operator in the eigenbasis. The
    // squared version in hahn_recurrence drops the sign of the off-diagonal,
    // which the polynomial tables need.
    Matrix x(m, m);
    for (int s = 0; s < m; ++s) x(s, s) = s;
    const Matrix t = transposed(basis.vectors) * (x * basis.vectors);

    // Each column of either table solves the recurrence at one eigenvalue, so
    // it is an eigenvector of the corresponding tridiagonal. The forward sweep
    // alone turns the exponentially small tail entries into noise (its absolute
    // error scales with the largest value met along the column), so the column
    // is taken from inverse iteration instead and anchored to the sweep at the
    // eigenvector's peak, where the sweep is still accurate in relative terms.
    std::vector<double> td(m), te(m, 0.0), f(m);
    for (int n = 0; n < m; ++n) {
        td[n] = t(n, n);
        if (n >= 1) te[n] = t(n, n - 1);
    }
    d.phi = Matrix(m, m);  // phi(n, s) = value of degree-n polynomial at lambda_s = s
    for (int s = 0; s < m; ++s) {
        const double lam = s;
        f[0] = 1.0;
        for (int n = 0; n + 1 < m; ++n) {
            const double prev = (n >= 1) ? te[n] * f[n - 1] : 0.0;
            f[n + 1] = ((lam - td[n]) * f[n] - prev) / te[n + 1];
        }
        const std::vector<double> u = tridiag_unit_eigenvector(td, te, lam);
        int peak = 0;
        for (int n = 1; n < m; ++n)
            if (std::abs(u[n]) > std::abs(u[peak])) peak = n;
        const double scale = f[peak] / u[peak];
        for (int n = 0; n < m; ++n) d.phi(n, s) = scale * u[n];
    }

    // Dual family from the sqrt(w)-symmetrized difference operator.
    std::vector<double> bg(m), ag(m, 0.0);
    for (int s = 0; s < m; ++s) {
        const double up = (s - p.n_grid) * (s + p.alpha + 1.0);
        const double down = s * (s - p.beta - p.n_grid - 1.0);
        bg[s] = -(up + down);
        if (s >= 1) ag[s] = std::sqrt(basis.w[s] / basis.w[s - 1]) * down;
    }
    d.chi = Matrix(m, m);  // chi(s, n) = value of degree-s dual polynomial at mu_n
    for (int n = 0; n < m; ++n) {
        const double mu = basis.mu[n];
        f[0] = 1.0;
        for (int s = 0; s + 1 < m; ++s) {
            const double prev = (s >= 1) ? ag[s] * f[s - 1] : 0.0;
            f[s + 1] = ((mu - bg[s]) * f[s] - prev) / ag[s + 1];
        }
        const std::vector<double> u = tridiag_unit_eigenvector(bg, ag, mu);
        int peak = 0;
        for (int s = 1; s < m; ++s)
            if (std::abs(u[s]) > std::abs(u[peak])) peak = s;
        const double scale = f[peak] / u[peak];
        for (int s = 0; s < m; ++s) d.chi(s, n) = scale * u[s];
    }
    return d;
}

double leonard_check(const DualityData& d) {
    const int m = d.overlap.rows();
    double worst = 0.0;
    for (int s = 0; s < m; ++s) {
        const double rw = std::sqrt(d.w[s]);
        for (int n = 0; n < m; ++n) {
            const double v = d.overlap(s, n);
            const double from_phi = rw * d.phi(n, s);
            const double from_chi = std::sqrt(d.w_dual[n]) * d.chi(s, n);
            worst = std::max({worst, std::abs(v - from_phi), std::abs(v - from_chi),
                              std::abs(from_phi - from_chi)});
        }
    }
    return worst;
}

}  // namespace heunlim
