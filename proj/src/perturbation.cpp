#include "nilmel/perturbation.hpp"

namespace nilmel {

namespace {

Rational lookup(const std::map<std::pair<int, int>, Rational>& m, int i, int j) {
    auto it = m.find({i, j});
    return it == m.end() ? Rational(0) : it->second;
}

Real eval_poly(const std::map<std::pair<int, int>, Rational>& m, const Real& x, const Real& y, int dx, int dy) {
    Real sum = 0;
    for (const auto& [ij, c] : m) {
        auto [i, j] = ij;
        if (i < dx || j < dy) continue;
        Real f = to_real(c);
        for (int k = 0; k < dx; ++k) f *= (i - k);
        for (int k = 0; k < dy; ++k) f *= (j - k);
        sum += f * pow(x, i - dx) * pow(y, j - dy);
    }
    return sum;
}

} // namespace

Rational PerturbationPoly::a_coeff(int i, int j) const { return lookup(a, i, j); }
Rational PerturbationPoly::b_coeff(int i, int j) const { return lookup(b, i, j); }

std::array<Rational, 4> PerturbationPoly::sigma() const {
    return {a_coeff(1, 0) + b_coeff(0, 1), 2 * a_coeff(2, 0) + b_coeff(1, 1), a_coeff(1, 1) + 2 * b_coeff(0, 2),
            3 * a_coeff(3, 0) + b_coeff(2, 1)};
}

Real PerturbationPoly::p(const Real& x, const Real& y) const { return eval_poly(a, x, y, 0, 0); }
Real PerturbationPoly::q(const Real& x, const Real& y) const { return eval_poly(b, x, y, 0, 0); }
Real PerturbationPoly::divergence(const Real& x, const Real& y) const {
    return eval_poly(a, x, y, 1, 0) + eval_poly(b, x, y, 0, 1);
}

PerturbationPoly lienard_perturbation(const std::vector<Rational>& a) {
    PerturbationPoly pq;
    for (size_t j = 0; j < a.size(); ++j)
        if (sgn(a[j]) != 0) pq.b[{static_cast<int>(j), 1}] = -a[j];
    return pq;
}

} // namespace nilmel
