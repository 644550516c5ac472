#ifndef NILMEL_PERTURBATION_HPP
#define NILMEL_PERTURBATION_HPP

#include <array>
#include <map>
#include <utility>

#include "nilmel/exact.hpp"

namespace nilmel {

// p(x,y) = sum a_ij x^i y^j, q(x,y) = sum b_ij x^i y^j.
struct PerturbationPoly {
    std::map<std::pair<int, int>, Rational> a;
    std::map<std::pair<int, int>, Rational> b;

    Rational a_coeff(int i, int j) const;
    Rational b_coeff(int i, int j) const;

    // sigma_0..sigma_3 at the origin, recomputed on every call.
    std::array<Rational, 4> sigma() const;

    Real p(const Real& x, const Real& y) const;
    Real q(const Real& x, const Real& y) const;
    // p_x + q_y
    Real divergence(const Real& x, const Real& y) const;
    bool empty() const { return a.empty() && b.empty(); }
};

// Liénard perturbation p = 0, q = -f(x) y with f = sum a_j x^j.
PerturbationPoly lienard_perturbation(const std::vector<Rational>& a);

} // namespace nilmel

#endif
