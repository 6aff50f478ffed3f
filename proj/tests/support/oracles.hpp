#pragma once

// Test-side oracles, deliberately independent of the closed forms the library
// implements: quadrature-driven recurrence extraction and moment ratios.

#include <cstdint>
#include <vector>

#include "heunlim/recurrence.hpp"

namespace heunlim::testing {

struct WeightedNodes {
    std::vector<double> x;
    std::vector<double> w;  // quadrature weight times x^alpha (1-x)^beta
};

// tanh-sinh (double-exponential) discretization of integrals against
// x^alpha (1-x)^beta on (0,1). Endpoint factors are assembled in log space,
// so alpha, beta close to -1 are safe. Accurate to ~1e-15 relative.
WeightedNodes tanh_sinh_jacobi(double alpha, double beta);

// Discretized Stieltjes procedure on the tanh-sinh nodes: runs the monic
// recurrence forward, reading b_n and u_n off inner products. This is the
// Gram-Schmidt oracle the recurrence formulas are tested against.
RecurrencePair stieltjes_recurrence(double alpha, double beta, std::size_t nmax);

// Moments m_k = integral of x^k x^alpha (1-x)^beta over (0,1), built from
// m_0 = Beta(alpha+1, beta+1) and the ratio m_{k+1}/m_k = (alpha+k+1)/(alpha+beta+k+2).
std::vector<double> jacobi_moments(double alpha, double beta, std::size_t kmax);

// Deterministic uniform draws decoupled from std:: distribution internals.
class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : state_(seed) {}
    double uniform(double lo, double hi);

private:
    std::uint64_t next();
    std::uint64_t state_;
};

}  // namespace heunlim::testing
