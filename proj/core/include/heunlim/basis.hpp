#pragma once

#include <stdexcept>
#include <string>

#include "heunlim/matrix.hpp"

namespace heunlim {

enum class BasisKind { monomial, grid_delta, jacobi, hahn };

// Which basis a matrix acts in, plus truncation bookkeeping for polynomial
// bases: `window` is the largest input degree whose image the finite matrix
// still represents exactly, and `raise` is the operator's degree growth.
// Finite-dimensional bases (grid_delta, hahn) are exact everywhere, so their
// window is the full dimension and raise is zero.
struct BasisTag {
    BasisKind kind = BasisKind::monomial;
    int dim = 0;         // matrix dimension: K+1 for degree cutoff K, N+1 for grids
    double alpha = 0.0;  // weight parameters for jacobi/hahn, unused otherwise
    double beta = 0.0;
    int window = 0;
    int raise = 0;
};

struct BasisOperator {
    Matrix matrix;
    BasisTag basis;
};

inline bool same_space(const BasisTag& a, const BasisTag& b) {
    if (a.kind != b.kind || a.dim != b.dim) return false;
    const bool weighted = a.kind == BasisKind::jacobi || a.kind == BasisKind::hahn;
    return !weighted || (a.alpha == b.alpha && a.beta == b.beta);
}

// Mixing representations is a hard error, never a silent coercion: products
// of operator realizations only mean anything inside one representation.
inline void require_same_space(const BasisTag& a, const BasisTag& b, const char* op) {
    if (!same_space(a, b))
        throw std::invalid_argument(std::string(op) + ": operands live in different bases");
}

}  // namespace heunlim
