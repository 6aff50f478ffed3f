#include "heunlim/orthopoly.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "heunlim/linalg.hpp"

namespace heunlim {

namespace {

void validate(const JacobiParams& p) {
    if (!(p.alpha > -1.0) || !(p.beta > -1.0))
        throw std::invalid_argument("jacobi weight needs alpha > -1 and beta > -1");
}

void validate(const HahnParams& p) {
    if (!(p.alpha > -1.0) || !(p.beta > -1.0))
        throw std::invalid_argument("hahn weight needs alpha > -1 and beta > -1");
    if (p.n_grid < 1)
        throw std::invalid_argument("hahn grid needs at least two points");
}

double hahn_up(const HahnParams& p, int x) {     // B(x), forward coefficient
    return (x - p.n_grid) * (x + p.alpha + 1.0);
}

double hahn_down(const HahnParams& p, int x) {   // D(x), backward coefficient
    return x * (x - p.beta - p.n_grid - 1.0);
}

}  // namespace

namespace {

RecurrencePair closed_form_recurrence(double a, double b, std::size_t nmax) {
    RecurrencePair rec;
    rec.b.resize(nmax + 1);
    rec.u.resize(nmax + 1, 0.0);

    rec.b[0] = (a + 1.0) / (a + b + 2.0);
    for (std::size_t n = 1; n <= nmax; ++n) {
        const double s = 2.0 * n + a + b;
        rec.b[n] = 0.5 + (a * a - b * b) / 4.0 * (1.0 / s - 1.0 / (s + 2.0));
    }

    if (nmax >= 1) {
        // Cancelled form of u_1: the generic numerator and denominator share a
        // factor (alpha+beta+1) that vanishes at alpha+beta = -1.
        const double s2 = a + b + 2.0;
        rec.u[1] = (1.0 + a) * (1.0 + b) / (s2 * s2 * (a + b + 3.0));
    }
    for (std::size_t n = 2; n <= nmax; ++n) {
        const double s = 2.0 * n + a + b;
        rec.u[n] = n * (n + a) * (n + b) * (n + a + b) / ((s - 1.0) * s * s * (s + 1.0));
    }
    return rec;
}

}  // namespace

RecurrencePair jacobi_recurrence(const JacobiParams& p, std::size_t nmax) {
    validate(p);
    RecurrencePair rec = closed_form_recurrence(p.alpha, p.beta, nmax);
    rec.mass = std::exp(std::lgamma(p.alpha + 1.0) + std::lgamma(p.beta + 1.0) -
                        std::lgamma(p.alpha + p.beta + 2.0));
    return rec;
}

RecurrencePair jacobi_recurrence_formal(double alpha, double beta, std::size_t nmax) {
    RecurrencePair rec = closed_form_recurrence(alpha, beta, nmax);
    rec.mass = 0.0;
    return rec;
}

double jacobi_eval(const RecurrencePair& rec, std::size_t n, double x) {
    if (n > rec.nmax())
        throw std::invalid_argument("jacobi_eval: degree exceeds the stored recurrence");
    double prev = 0.0, cur = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double next = (x - rec.b[k]) * cur - (k >= 1 ? rec.u[k] * prev : 0.0);
        prev = cur;
        cur = next;
    }
    return cur;
}

NormConstants jacobi_norms(const RecurrencePair& rec, std::size_t nmax) {
    if (nmax > rec.nmax())
        throw std::invalid_argument("jacobi_norms: degree exceeds the stored recurrence");
    NormConstants out;
    out.h.resize(nmax + 1);
    out.h[0] = rec.mass;
    for (std::size_t n = 1; n <= nmax; ++n) out.h[n] = out.h[n - 1] * rec.u[n];
    return out;
}

BasisOperator hahn_operator(const HahnParams& p) {
    validate(p);
    const int m = p.n_grid + 1;
    Matrix y(m, m);
    for (int x = 0; x < m; ++x) {
        const double up = hahn_up(p, x);
        const double down = hahn_down(p, x);
        if (x + 1 < m) y(x, x + 1) = up;
        if (x - 1 >= 0) y(x, x - 1) = down;
        y(x, x) = -(up + down);
    }
    BasisTag tag{BasisKind::grid_delta, m, p.alpha, p.beta, m - 1, 0};
    return {std::move(y), tag};
}

HahnBasis hahn_basis(const HahnParams& p) {
    validate(p);
    const int m = p.n_grid + 1;

    // Weights from detailed balance w(x+1)/w(x) = B(x)/D(x+1), assembled in
    // log space so large grids cannot overflow before normalization.
    std::vector<double> logw(m, 0.0);
    for (int x = 0; x + 1 < m; ++x) {
        const double ratio = hahn_up(p, x) / hahn_down(p, x + 1);
        logw[x + 1] = logw[x] + std::log(ratio);
    }
    double logmax = logw[0];
    for (double v : logw) logmax = std::max(logmax, v);
    std::vector<double> w(m);
    double total = 0.0;
    for (int x = 0; x < m; ++x) total += (w[x] = std::exp(logw[x] - logmax));
    for (double& v : w) v /= total;

    // Symmetrize Y by sqrt(w): same spectrum, real orthonormal eigenvectors.
    SymTridiag t;
    t.diag.resize(m);
    t.offdiag.resize(m - 1);
    for (int x = 0; x < m; ++x) t.diag[x] = -(hahn_up(p, x) + hahn_down(p, x));
    for (int x = 0; x + 1 < m; ++x)
        t.offdiag[x] = std::sqrt(w[x] / w[x + 1]) * hahn_up(p, x);

    EigenDecomposition eig = sym_tridiag_eig(t);

    HahnBasis out;
    out.mu.resize(m);
    for (int n = 0; n < m; ++n) out.mu[n] = n * (n + p.alpha + p.beta + 1.0);

    // Both lists are ascending, so pairing is positional; still insist each
    // computed eigenvalue actually sits on its analytic partner.
    for (int n = 0; n < m; ++n) {
        const double diff = std::abs(eig.values[n] - out.mu[n]);
        if (diff > 1e-9 * std::max(1.0, std::abs(out.mu[n])))
            throw std::runtime_error("hahn_basis: eigenvalue " + std::to_string(n) +
                                     " does not match n(n+alpha+beta+1)");
    }

    // Fix each column to have positive first entry, so column n starts with
    // +sqrt of the dual weight.
    for (int n = 0; n < m; ++n) {
        if (eig.vectors(0, n) < 0.0)
            for (int s = 0; s < m; ++s) eig.vectors(s, n) = -eig.vectors(s, n);
    }

    out.w_dual.resize(m);
    for (int n = 0; n < m; ++n) out.w_dual[n] = eig.vectors(0, n) * eig.vectors(0, n);
    out.w = std::move(w);
    out.vectors = std::move(eig.vectors);
    return out;
}

RecurrencePair hahn_recurrence(const HahnBasis& basis) {
    const int m = basis.vectors.rows();
    Matrix x(m, m);
    for (int s = 0; s < m; ++s) x(s, s) = s;
    const Matrix t = transposed(basis.vectors) * (x * basis.vectors);

    double leak = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (std::abs(i - j) > 1) leak = std::max(leak, std::abs(t(i, j)));
    if (leak > 1e-10 * frobenius_norm(x))
        throw std::runtime_error("hahn_recurrence: position operator is not tridiagonal "
                                 "in the eigenbasis");

    RecurrencePair rec;
    rec.b.resize(m);
    rec.u.resize(m, 0.0);
    rec.mass = 1.0;
    for (int n = 0; n < m; ++n) rec.b[n] = t(n, n);
    for (int n = 1; n < m; ++n) {
        const double a = 0.5 * (t(n, n - 1) + t(n - 1, n));
        rec.u[n] = a * a;
    }
    return rec;
}

}  // namespace heunlim
