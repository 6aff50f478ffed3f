#include "support/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace heunlim::testing {

namespace {

double softplus(double z) {
    return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

WeightedNodes tanh_sinh_jacobi(double alpha, double beta) {
    // Substitution x = (1 + tanh((pi/2) sinh t)) / 2. Step and range chosen so
    // the discretization error and the tail truncation both land below 1e-15
    // even for exponents near -1, where the integrand decays slowest.
    const double h = 0.005;
    const double tmax = 6.0;
    const double pi = 3.14159265358979323846;
    WeightedNodes out;
    for (double t = -tmax; t <= tmax + h / 2; t += h) {
        const double u = 0.5 * pi * std::sinh(t);
        const double logx = -softplus(-2.0 * u);
        const double log1mx = -softplus(2.0 * u);
        const double logcosh_u = std::abs(u) + std::log1p(std::exp(-2.0 * std::abs(u))) -
                                 std::log(2.0);
        const double logw = std::log(0.25 * pi * h) + std::log(std::cosh(t)) -
                            2.0 * logcosh_u;
        const double logtot = logw + alpha * logx + beta * log1mx;
        if (logtot <= -700.0) continue;
        out.x.push_back(std::exp(logx));
        out.w.push_back(std::exp(logtot));
    }
    return out;
}

RecurrencePair stieltjes_recurrence(double alpha, double beta, std::size_t nmax) {
    const WeightedNodes q = tanh_sinh_jacobi(alpha, beta);
    const std::size_t m = q.x.size();
    std::vector<double> p_prev(m, 0.0), p_cur(m, 1.0);
    double nrm_prev = 0.0;
    RecurrencePair rec;
    rec.b.resize(nmax + 1);
    rec.u.assign(nmax + 1, 0.0);
    for (std::size_t n = 0; n <= nmax; ++n) {
        double nrm = 0.0, xb = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double ww = q.w[i] * p_cur[i] * p_cur[i];
            nrm += ww;
            xb += ww * q.x[i];
        }
        if (!(nrm > 0.0)) throw std::runtime_error("stieltjes oracle lost positivity");
        rec.b[n] = xb / nrm;
        if (n > 0) rec.u[n] = nrm / nrm_prev;
        if (n == 0) rec.mass = nrm;
        for (std::size_t i = 0; i < m; ++i) {
            const double next = (q.x[i] - rec.b[n]) * p_cur[i] -
                                (n > 0 ? rec.u[n] : 0.0) * p_prev[i];
            p_prev[i] = p_cur[i];
            p_cur[i] = next;
        }
        nrm_prev = nrm;
    }
    return rec;
}

std::vector<double> jacobi_moments(double alpha, double beta, std::size_t kmax) {
    std::vector<double> m(kmax + 1);
    m[0] = std::exp(std::lgamma(alpha + 1.0) + std::lgamma(beta + 1.0) -
                    std::lgamma(alpha + beta + 2.0));
    for (std::size_t k = 0; k < kmax; ++k)
        m[k + 1] = m[k] * (alpha + 1.0 + static_cast<double>(k)) /
                   (alpha + beta + 2.0 + static_cast<double>(k));
    return m;
}

std::uint64_t TestRng::next() {
    // splitmix64; stable across platforms and standard libraries.
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double TestRng::uniform(double lo, double hi) {
    const double unit = std::ldexp(static_cast<double>(next() >> 11), -53);
    return lo + (hi - lo) * unit;
}

}  // namespace heunlim::testing
