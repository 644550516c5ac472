#include "doctest.h"

#include <chrono>

#include "nilmel/constants.hpp"

using namespace nilmel;

namespace {

Real gamma_fn(const Real& x) {
    Real r;
    mpfr_gamma(r.backend().data(), x.backend().data(), MPFR_RNDN);
    return r;
}

Real beta_fn(const Real& a, const Real& b) { return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b); }

bool rel_close(const Real& a, const Real& b, const Real& tol) { return abs(a - b) <= tol * abs(b); }

} // namespace

TEST_CASE("printed ten-digit values") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = compute_constants(30);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 5.0);
    const Real tol("1e-9");
    CHECK(rel_close(c.A0t, Real("-0.5258182896"), tol));
    CHECK(rel_close(c.A1t, Real("-0.7285951942"), tol));
    CHECK(rel_close(c.A3t, Real("0.3200718001"), tol));
    CHECK(rel_close(c.A4t, Real("0.0808471737"), tol));
    CHECK(rel_close(c.A0b, Real("1.051636580"), tol));
    CHECK(rel_close(c.A2b, Real("-0.1616943474"), tol));
    CHECK(abs(c.D1 - 2) <= Real("1e-8"));
    CHECK(abs(c.D2 - c.A2b / (-c.A4t)) <= Real("1e-9"));
    CHECK(c.signs_ok());
}

TEST_CASE("Beta-function oracles at 30 digits") {
    const auto c = compute_constants(30);
    PrecisionScope prec(40);
    const Real half("0.5");
    // v = w^(1/6): int_0^1 v^(a-1) (1-v^6)^(-1/2) dv = B(a/6, 1/2)/6, continued to a > -6
    const Real tol("1e-28");
    CHECK(rel_close(c.A0t, -Real(3) / 4 * beta_fn(Real(2) / 6, half) / 6, tol));
    CHECK(rel_close(c.A1t, -Real(3) / 5 * beta_fn(Real(1) / 6, half) / 6, tol));
    CHECK(rel_close(c.A3t, -Real(3) / 7 * beta_fn(Real(-1) / 6, half) / 6, tol));
    CHECK(rel_close(c.A4t, -Real(3) / 8 * beta_fn(Real(-2) / 6, half) / 6, tol));
    CHECK(rel_close(c.A0b, Real(3) / 4 * beta_fn(Real(1) / 6, Real(1) / 3) / 6, tol));
}

TEST_CASE("doubling digits stays inside the error estimate") {
    const auto a = compute_constants(15);
    const auto b = compute_constants(30);
    const auto na = a.named(), nb = b.named();
    for (size_t k = 0; k < na.size(); ++k) {
        // floor at the 15-digit run's working precision (25 digits)
        const Real floor = pow(Real(10), -25) * abs(na[k].second);
        const Real bound = a.errors[k] > floor ? a.errors[k] : floor;
        CHECK_MESSAGE(abs(na[k].second - nb[k].second) <= bound, na[k].first);
    }
}

TEST_CASE("digits guard") { CHECK_THROWS(compute_constants(5)); }
