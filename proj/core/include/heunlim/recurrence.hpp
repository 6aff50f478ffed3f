#pragma once

#include <cstddef>
#include <vector>

namespace heunlim {

// Monic three-term recurrence  x p_n(x) = p_{n+1}(x) + b_n p_n(x) + u_n p_{n-1}(x).
// u is indexed from 1; u[0] is a placeholder and never read. mass is the zeroth
// moment of the orthogonality weight (integral, or sum for grid weights).
struct RecurrencePair {
    std::vector<double> b;
    std::vector<double> u;
    double mass = 0.0;

    std::size_t nmax() const { return b.empty() ? 0 : b.size() - 1; }
};

}  // namespace heunlim
