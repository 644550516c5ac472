#ifndef NILMEL_QUADRATURE_HPP
#define NILMEL_QUADRATURE_HPP

#include <functional>
#include <vector>

#include "nilmel/real.hpp"

namespace nilmel {

struct QuadResult {
    Real value;
    Real error;  // difference between the last two levels
    int levels = 0;
    long evaluations = 0;
};

// f(x, x - a, b - x): the two endpoint distances are computed from the
// transformed abscissa, so they keep full relative precision near a and b.
using EndpointIntegrand = std::function<Real(const Real& x, const Real& da, const Real& db)>;

// Tanh-sinh on [a, b]; stops when two successive levels agree to `tol` (absolute).
QuadResult tanh_sinh(const EndpointIntegrand& f, const Real& a, const Real& b, const Real& tol, int max_level = 10);

// Exp-sinh on [a, inf).
QuadResult exp_sinh(const std::function<Real(const Real& x)>& f, const Real& a, const Real& tol, int max_level = 10);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<Real>& nodes, std::vector<Real>& weights);

} // namespace nilmel

#endif
