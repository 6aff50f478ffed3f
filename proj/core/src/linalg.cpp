#include "heunlim/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace heunlim {

namespace {

constexpr int kMaxSweeps = 60;

bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Implicit-shift QL on (d, e). e[i] couples rows i and i+1; e[m-1] is unused.
// z accumulates the rotations: pass identity to get tridiagonal eigenvectors,
// or the Householder product to get dense ones. Classic tqli scheme.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, Matrix& z) {
    const std::size_t n = d.size();
    if (n <= 1) return;
    e.resize(n, 0.0);
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            // Find the first negligible off-diagonal at or after l.
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
            }
            if (m != l) {
                if (iter++ == kMaxSweeps)
                    throw ConvergenceError(
                        "QL iteration exceeded " + std::to_string(kMaxSweeps) +
                            " sweeps at eigenvalue index " + std::to_string(l),
                        l);
                // Wilkinson-style shift from the leading 2x2.
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        // Rotation annihilated early; drop the shift and retry.
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (std::size_t k = 0; k < z.rows(); ++k) {
                        const double zk = z(k, i + 1);
                        z(k, i + 1) = s * z(k, i) + c * zk;
                        z(k, i) = c * z(k, i) - s * zk;
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

// Sort eigenvalues ascending (reordering columns of z along) and fix signs:
// the largest-magnitude entry of each column is made positive, first
// occurrence winning ties.
void sort_and_fix(std::vector<double>& d, Matrix& z) {
    const std::size_t n = d.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return d[a] < d[b]; });
    std::vector<double> dv(n);
    Matrix zs(z.rows(), n);
    for (std::size_t j = 0; j < n; ++j) {
        dv[j] = d[order[j]];
        for (std::size_t i = 0; i < z.rows(); ++i) zs(i, j) = z(i, order[j]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t imax = 0;
        double amax = -1.0;
        for (std::size_t i = 0; i < zs.rows(); ++i) {
            const double a = std::abs(zs(i, j));
            if (a > amax) {
                amax = a;
                imax = i;
            }
        }
        if (zs(imax, j) < 0.0)
            for (std::size_t i = 0; i < zs.rows(); ++i) zs(i, j) = -zs(i, j);
    }
    d = std::move(dv);
    z = std::move(zs);
}

double tridiag_residual(const SymTridiag& t, const std::vector<double>& d, const Matrix& z) {
    const std::size_t n = d.size();
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = t.diag[i] * z(i, j);
            if (i > 0) r += t.offdiag[i - 1] * z(i - 1, j);
            if (i + 1 < n) r += t.offdiag[i] * z(i + 1, j);
            r -= d[j] * z(i, j);
            s += r * r;
        }
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

double dense_residual(const Matrix& a, const std::vector<double>& d, const Matrix& z) {
    const std::size_t n = d.size();
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = -d[j] * z(i, j);
            for (std::size_t k = 0; k < n; ++k) r += a(i, k) * z(k, j);
            s += r * r;
        }
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

// Householder reduction of a symmetric matrix to tridiagonal form with
// accumulation of the orthogonal factor in place (tred2 scheme). On return
// `a` holds Q, d the diagonal, e the subdiagonal with e[i] coupling i-1 and i.
void householder_tridiag(Matrix& a, std::vector<double>& d, std::vector<double>& e) {
    const std::size_t n = a.rows();
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (std::size_t i = n; i-- > 1;) {
        const std::size_t l = i - 1;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (std::size_t k = 0; k <= l; ++k) scale += std::abs(a(i, k));
            if (scale == 0.0) {
                e[i] = a(i, l);
            } else {
                for (std::size_t k = 0; k <= l; ++k) {
                    a(i, k) /= scale;
                    h += a(i, k) * a(i, k);
                }
                double f = a(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                a(i, l) = f - g;
                f = 0.0;
                for (std::size_t j = 0; j <= l; ++j) {
                    a(j, i) = a(i, j) / h;
                    g = 0.0;
                    for (std::size_t k = 0; k <= j; ++k) g += a(j, k) * a(i, k);
                    for (std::size_t k = j + 1; k <= l; ++k) g += a(k, j) * a(i, k);
                    e[j] = g / h;
                    f += e[j] * a(i, j);
                }
                const double hh = f / (h + h);
                for (std::size_t j = 0; j <= l; ++j) {
                    f = a(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (std::size_t k = 0; k <= j; ++k)
                        a(j, k) -= f * e[k] + g * a(i, k);
                }
            }
        } else {
            e[i] = a(i, l);
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] != 0.0) {
            for (std::size_t j = 0; j < i; ++j) {
                double g = 0.0;
                for (std::size_t k = 0; k < i; ++k) g += a(i, k) * a(k, j);
                for (std::size_t k = 0; k < i; ++k) a(k, j) -= g * a(k, i);
            }
        }
        d[i] = a(i, i);
        a(i, i) = 1.0;
        for (std::size_t j = 0; j < i; ++j) a(j, i) = a(i, j) = 0.0;
    }
}

}  // namespace

EigenDecomposition sym_tridiag_eig(const SymTridiag& t) {
    const std::size_t n = t.diag.size();
    if (n == 0) throw std::invalid_argument("sym_tridiag_eig: empty matrix");
    if (t.offdiag.size() + 1 != n)
        throw std::invalid_argument("sym_tridiag_eig: offdiag must have length m-1");
    if (!all_finite(t.diag) || !all_finite(t.offdiag))
        throw std::invalid_argument("sym_tridiag_eig: non-finite entry");

    EigenDecomposition ed;
    ed.values = t.diag;
    std::vector<double> e(t.offdiag);
    ed.vectors = Matrix::identity(n);
    ql_implicit(ed.values, e, ed.vectors);
    sort_and_fix(ed.values, ed.vectors);
    ed.residual = tridiag_residual(t, ed.values, ed.vectors);
    return ed;
}

EigenDecomposition dense_sym_eig(const Matrix& a) {
    const std::size_t n = a.rows();
    if (n == 0 || a.cols() != n) throw std::invalid_argument("dense_sym_eig: not square");
    if (!heunlim::all_finite(a)) throw std::invalid_argument("dense_sym_eig: non-finite entry");
    const double anorm = frobenius_norm(a);
    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            const double d = a(i, j) - a(j, i);
            asym += 2.0 * d * d;
        }
    if (std::sqrt(asym) > 1e-12 * std::max(anorm, 1e-300))
        throw std::invalid_argument("dense_sym_eig: matrix is not symmetric within tolerance");

    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) b(i, j) = 0.5 * (a(i, j) + a(j, i));

    EigenDecomposition ed;
    Matrix work = b;
    std::vector<double> e;
    householder_tridiag(work, ed.values, e);
    // Shift e so that e[i] couples i and i+1, the convention ql_implicit uses.
    if (n > 1) e.erase(e.begin());
    ed.vectors = std::move(work);
    ql_implicit(ed.values, e, ed.vectors);
    sort_and_fix(ed.values, ed.vectors);
    ed.residual = dense_residual(b, ed.values, ed.vectors);
    return ed;
}

LanczosResult lanczos(const Matrix& a, const std::vector<double>& start) {
    const std::size_t n = a.rows();
    if (n == 0 || a.cols() != n) throw std::invalid_argument("lanczos: not square");
    if (start.size() != n) throw std::invalid_argument("lanczos: start vector dimension");
    if (!heunlim::all_finite(a) || !all_finite(start))
        throw std::invalid_argument("lanczos: non-finite input");
    if (std::abs(norm2(start) - 1.0) > 1e-10)
        throw std::invalid_argument("lanczos: start vector must be unit length");

    const double breakdown_tol = 1e-13 * frobenius_norm(a);
    std::vector<std::vector<double>> q;
    q.push_back(start);
    std::vector<double> alphas, betas;
    LanczosResult out;

    for (std::size_t j = 0; j < n; ++j) {
        std::vector<double> w = a * q[j];
        if (j > 0)
            for (std::size_t i = 0; i < n; ++i) w[i] -= betas[j - 1] * q[j - 1][i];
        const double alpha = dot(q[j], w);
        alphas.push_back(alpha);
        for (std::size_t i = 0; i < n; ++i) w[i] -= alpha * q[j][i];
        // Full reorthogonalization, two passes, against every stored vector.
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& qi : q) {
                const double c = dot(qi, w);
                for (std::size_t i = 0; i < n; ++i) w[i] -= c * qi[i];
            }
        if (j + 1 == n) break;
        const double beta = norm2(w);
        if (beta <= breakdown_tol) {
            out.breakdown = true;
            break;
        }
        betas.push_back(beta);
        for (double& x : w) x /= beta;
        q.push_back(std::move(w));
    }

    const std::size_t k = alphas.size();
    out.tridiag.diag = std::move(alphas);
    out.tridiag.offdiag = std::move(betas);
    out.basis = Matrix(n, k);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < n; ++i) out.basis(i, j) = q[j][i];
    return out;
}

GaussQuadrature golub_welsch(const RecurrencePair& rec, std::size_t m) {
    if (m == 0) throw std::invalid_argument("golub_welsch: need at least one node");
    if (rec.b.size() < m)
        throw std::invalid_argument("golub_welsch: recurrence shorter than node count");
    if (!(rec.mass > 0.0)) throw std::invalid_argument("golub_welsch: mass must be positive");
    SymTridiag t;
    t.diag.assign(rec.b.begin(), rec.b.begin() + static_cast<std::ptrdiff_t>(m));
    t.offdiag.resize(m - 1);
    for (std::size_t i = 1; i < m; ++i) {
        if (!(rec.u[i] > 0.0))
            throw std::invalid_argument("golub_welsch: u[" + std::to_string(i) +
                                        "] must be positive");
        t.offdiag[i - 1] = std::sqrt(rec.u[i]);
    }
    const EigenDecomposition ed = sym_tridiag_eig(t);
    GaussQuadrature q;
    q.nodes = ed.values;
    q.weights.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        q.weights[i] = rec.mass * ed.vectors(0, i) * ed.vectors(0, i);
    return q;
}

LeastSquaresFit least_squares(const Matrix& a, const std::vector<double>& rhs) {
    const std::size_t m = a.rows(), n = a.cols();
    if (rhs.size() != m) throw std::invalid_argument("least_squares: rhs dimension");
    if (m < n) throw std::invalid_argument("least_squares: underdetermined system");

    // Householder QR with column pivoting; Q is applied to the rhs on the fly.
    Matrix r = a;
    std::vector<double> b = rhs;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::vector<double> colnorm(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += r(i, j) * r(i, j);
        colnorm[j] = s;
    }

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        for (std::size_t j = k + 1; j < n; ++j)
            if (colnorm[j] > colnorm[pivot]) pivot = j;
        if (pivot != k) {
            for (std::size_t i = 0; i < m; ++i) std::swap(r(i, k), r(i, pivot));
            std::swap(colnorm[k], colnorm[pivot]);
            std::swap(perm[k], perm[pivot]);
        }
        double s = 0.0;
        for (std::size_t i = k; i < m; ++i) s += r(i, k) * r(i, k);
        const double alpha = (r(k, k) >= 0.0) ? -std::sqrt(s) : std::sqrt(s);
        if (s == 0.0) continue;
        std::vector<double> v(m, 0.0);
        v[k] = r(k, k) - alpha;
        for (std::size_t i = k + 1; i < m; ++i) v[i] = r(i, k);
        const double vtv = s - 2.0 * alpha * r(k, k) + alpha * alpha;
        r(k, k) = alpha;
        for (std::size_t i = k + 1; i < m; ++i) r(i, k) = 0.0;
        if (vtv > 0.0) {
            for (std::size_t j = k + 1; j < n; ++j) {
                double c = 0.0;
                for (std::size_t i = k; i < m; ++i) c += v[i] * r(i, j);
                c *= 2.0 / vtv;
                for (std::size_t i = k; i < m; ++i) r(i, j) -= c * v[i];
            }
            double c = 0.0;
            for (std::size_t i = k; i < m; ++i) c += v[i] * b[i];
            c *= 2.0 / vtv;
            for (std::size_t i = k; i < m; ++i) b[i] -= c * v[i];
        }
        for (std::size_t j = k + 1; j < n; ++j) colnorm[j] -= r(k, j) * r(k, j);
    }

    double dmax = 0.0;
    for (std::size_t k = 0; k < n; ++k) dmax = std::max(dmax, std::abs(r(k, k)));
    LeastSquaresFit fit;
    const double cutoff = 1e-12 * dmax;
    std::size_t rank = n;
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(r(k, k)) <= cutoff) {
            rank = k;
            fit.rank_deficient = true;
            break;
        }
    fit.min_pivot_ratio = (dmax > 0.0 && n > 0)
                              ? std::abs(r(n - 1, n - 1)) / dmax
                              : 0.0;

    std::vector<double> y(n, 0.0);
    for (std::size_t k = rank; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < rank; ++j) s -= r(k, j) * y[j];
        y[k] = s / r(k, k);
    }
    fit.coeffs.assign(n, 0.0);
    for (std::size_t k = 0; k < rank; ++k) fit.coeffs[perm[k]] = y[k];
    return fit;
}

Matrix solve_unit_upper(const Matrix& u, Matrix rhs) {
    const std::size_t n = u.rows();
    if (u.cols() != n || rhs.rows() != n)
        throw std::invalid_argument("solve_unit_upper: dimension mismatch");
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t c = 0; c < rhs.cols(); ++c) {
            double s = rhs(i, c);
            for (std::size_t j = i + 1; j < n; ++j) s -= u(i, j) * rhs(j, c);
            rhs(i, c) = s;
        }
    return rhs;
}

}  // namespace heunlim
