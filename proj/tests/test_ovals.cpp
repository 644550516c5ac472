#include "doctest.h"

#include <random>

#include "nilmel/ovals.hpp"

using namespace nilmel;

namespace {

PerturbationPoly single(int j, long c = 1) {
    std::vector<Rational> a(j + 1, Rational(0));
    a[j] = Rational(c);
    return lienard_perturbation(a);
}

bool rel_close(const Real& a, const Real& b, const Real& tol) { return abs(a - b) <= tol * abs(b); }

// sum of exterior angles of the node polygon
Real turning(const Oval& o) {
    Real total = 0;
    const size_t n = o.nodes.size() - 1;
    auto dir = [&](size_t i) {
        const auto& p = o.nodes[i % n];
        const auto& q = o.nodes[(i + 1) % n];
        return atan2(q.y - p.y, q.x - p.x);
    };
    const Real pi = real_pi();
    for (size_t i = 0; i < n; ++i) {
        Real d = dir(i + 1) - dir(i);
        while (d > pi) d -= 2 * pi;
        while (d < -pi) d += 2 * pi;
        total += d;
    }
    return total;
}

std::vector<Rational> random_a(std::mt19937& rng) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
    std::vector<Rational> a(13);
    for (auto& v : a) v = Rational(num(rng)) / Rational(den(rng));
    return a;
}

} // namespace

TEST_CASE("trace: inner-right oval at h = -0.01") {
    PrecisionScope ps(30);
    const auto H = HamiltonianModel::lienard();
    const Oval o = trace_oval(H, Real("-0.01"), Side::InnerRight, 64);
    const Real xc = sqrt(Real(3)) / 2;
    CHECK(o.x_min < xc);
    CHECK(o.x_max > xc);
    for (const Real& x : {o.x_min, o.x_max}) CHECK(abs(pow(x, 6) - pow(x, 8) - Real("0.01")) < Real("1e-28"));
    CHECK(o.residual < Real("1e-25"));
    CHECK(o.nodes.front().x == o.nodes.back().x);
    CHECK(abs(turning(o) + 2 * real_pi()) < Real("1e-20"));  // clockwise
}

TEST_CASE("trace: turning points approach the loop ends") {
    PrecisionScope ps(30);
    const auto H = HamiltonianModel::lienard();
    const Oval o = trace_oval(H, Real("-1e-10"), Side::InnerRight, 32);
    CHECK(abs(o.x_min - pow(Real("1e-10"), Real(1) / 6)) < Real("1e-3"));
    CHECK(abs(o.x_max - 1) < Real("1e-9"));
    const Oval l = trace_oval(H, Real("-0.02"), Side::InnerLeft, 32);
    CHECK(l.x_max < 0);
    CHECK(abs(turning(l) + 2 * real_pi()) < Real("1e-20"));
}

TEST_CASE("trace: outer oval encloses both centers") {
    PrecisionScope ps(30);
    const auto H = HamiltonianModel::lienard();
    const Real h("0.005");
    const Oval o = trace_oval(H, h, Side::Outer, 200);
    // x^8 - x^6 + h has one positive root beyond 1 and its mirror
    CHECK(o.x_max > 1);
    CHECK(abs(o.x_min + o.x_max) < Real("1e-25"));
    CHECK(abs(pow(o.x_max, 8) - pow(o.x_max, 6) - h) < Real("1e-25"));
    CHECK(abs(turning(o) + 2 * real_pi()) < Real("1e-20"));
}

TEST_CASE("trace: level guards") {
    PrecisionScope ps(30);
    const auto H = HamiltonianModel::lienard();
    CHECK_THROWS_AS(trace_oval(H, Real("-1e-12"), Side::InnerRight, 32), LevelOutOfRange);
    CHECK_THROWS_AS(trace_oval(H, Real("-0.2"), Side::InnerRight, 32), LevelOutOfRange);
    CHECK_THROWS_AS(trace_oval(H, Real("0.01"), Side::InnerRight, 32), LevelOutOfRange);
    CHECK_THROWS_AS(trace_oval(H, Real("-0.01"), Side::Outer, 32), LevelOutOfRange);
    HamiltonianModel bad;  // 1/2 y^2 + x^6 has no loop
    bad.set(6, 0, Rational(1));
    CHECK_THROWS_AS(trace_oval(bad, Real("0.01"), Side::Outer, 32), TopologyError);
}

TEST_CASE("melnikov: loop values") {
    PrecisionScope ps(40);
    const auto H = HamiltonianModel::lienard();
    const Real tol("1e-32");
    const Real r2 = real_sqrt2();
    CHECK(melnikov_value(H, Real(0), Side::InnerRight, PerturbationPoly{}, tol).value == 0);
    const Real a0 = melnikov_value(H, Real(0), Side::InnerRight, single(0), tol).value;
    CHECK(rel_close(a0, -2 * r2 * Real(2) / 15, Real("1e-30")));
    const Real a3 = melnikov_value(H, Real(0), Side::InnerRight, single(3), tol).value;
    CHECK(rel_close(a3, -2 * r2 * Real(5) / 256 * real_pi(), Real("1e-30")));
    const Real a12 = melnikov_value(H, Real(0), Side::InnerRight, single(12), tol).value;
    CHECK(rel_close(a12, -2 * r2 * Real(2048) / 109395, Real("1e-30")));
}

TEST_CASE("melnikov: node rule converges") {
    PrecisionScope ps(30);
    const auto H = HamiltonianModel::lienard();
    std::mt19937 rng(7);
    const auto pq = lienard_perturbation(random_a(rng));
    const Real h("-0.01");
    const Real ref = melnikov_value(H, h, Side::InnerRight, pq, Real("1e-25")).value;
    Real prev = 1;
    for (int n : {16, 32, 64, 128}) {
        const Real err = abs(melnikov_integral(trace_oval(H, h, Side::InnerRight, n), pq) - ref);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < Real("1e-10") * abs(ref));
    CHECK(melnikov_integral(trace_oval(H, h, Side::InnerRight, 32), PerturbationPoly{}) == 0);
}

TEST_CASE("time integrals on the loop") {
    PrecisionScope ps(40);
    const auto H = HamiltonianModel::lienard();
    const Real tol("1e-32");
    const Real r2 = real_sqrt2();
    CHECK(time_integral(H, Real(0), Side::InnerRight, Poly2{}, tol).value == 0);
    const Real t3 = time_integral(H, Real(0), Side::InnerRight, c4_integrand(single(3)), tol).value;
    CHECK(rel_close(t3, -r2 * real_pi() / 2, Real("1e-30")));
    const Real t12 = time_integral(H, Real(0), Side::InnerRight, c4_integrand(single(12)), tol).value;
    CHECK(rel_close(t12, -r2 * Real(128) / 315, Real("1e-30")));

    PerturbationPoly s2;  // p = x y gives sigma_2 = 1
    s2.a[{1, 1}] = Rational(1);
    CHECK_THROWS_AS(c_integrals(H, s2, tol), DivergentIntegral);
    CHECK_THROWS_AS(time_integral(H, Real(0), Side::InnerRight, Poly2{{{0, 1}, Rational(1)}}, tol), DivergentIntegral);
    CHECK_THROWS_AS(time_integral(H, Real(0), Side::InnerRight, Poly2{{{1, 0}, Rational(1)}}, tol),
                    SingularityOrderError);
    // fine away from the loop
    CHECK_NOTHROW(time_integral(H, Real("-0.01"), Side::InnerRight, Poly2{{{0, 0}, Rational(1)}}, tol));
}

TEST_CASE("c integrals: zero perturbation and a_12") {
    PrecisionScope ps(30);
    const auto H = HamiltonianModel::lienard();
    const auto z = c_integrals(H, PerturbationPoly{}, Real("1e-22"));
    CHECK(z.c0 == 0);
    CHECK(z.c0t == 0);
    CHECK(z.c41 == 0);
    CHECK(z.c41t == 0);
    CHECK(z.c31s == 0);
    const auto c = c_integrals(H, single(12), Real("1e-22"));
    CHECK(rel_close(c.c0, -2 * real_sqrt2() * Real(2048) / 109395, Real("1e-20")));
}

TEST_CASE("c integrals: c_41 + c~_41 = c*_31 for random a") {
    PrecisionScope ps(30);
    const auto H = HamiltonianModel::lienard();
    std::mt19937 rng(11);
    for (int trial = 0; trial < 3; ++trial) {
        const auto c = c_integrals(H, lienard_perturbation(random_a(rng)), Real("1e-22"));
        CHECK(rel_close(c.c41 + c.c41t, c.c31s, Real("1e-15")));
    }
}

TEST_CASE("even H: left-lobe values from the right lobe") {
    PrecisionScope ps(30);
    const auto H = HamiltonianModel::lienard();
    const Real tol("1e-22");
    // along the flow the left loop is also clockwise, so odd powers of x flip sign
    for (int j = 0; j <= 12; ++j) {
        const auto pq = single(j);
        const Real r = melnikov_value(H, Real(0), Side::InnerRight, pq, tol).value;
        const Real l = melnikov_value(H, Real(0), Side::InnerLeft, pq, tol).value;
        CHECK(abs(l - (j % 2 == 0 ? r : -r)) < Real("1e-20"));
    }
}

TEST_CASE("limits: M(h) -> c_0 and M*(h) -> c_0 + c~_0") {
    PrecisionScope ps(30);
    const auto H = HamiltonianModel::lienard();
    std::mt19937 rng(3);
    const auto pq = lienard_perturbation(random_a(rng));
    const Real tol("1e-22");
    const auto c = c_integrals(H, pq, tol);
    Real prev_in = 1e9, prev_out = 1e9;
    for (const char* hs : {"1e-4", "1e-6", "1e-8"}) {
        const Real h(hs);
        const Real din = abs(melnikov_value(H, -h, Side::InnerRight, pq, tol).value - c.c0);
        const Real dout = abs(melnikov_value(H, h, Side::Outer, pq, tol).value - (c.c0 + c.c0t));
        CHECK(din < prev_in);
        CHECK(dout < prev_out);
        CHECK(din < 100 * pow(h, Real(2) / 3));
        CHECK(dout < 100 * pow(h, Real(2) / 3));
        prev_in = din;
        prev_out = dout;
    }
}

TEST_CASE("general H: continuation trace and branch quadrature") {
    PrecisionScope ps(30);
    // 1/2 y^2 + 1/2 x^4 y - x^6 + x^8 = 1/2 (y + x^4/2)^2 - x^6 + 7/8 x^8
    HamiltonianModel G;
    G.set(4, 1, Rational(1, 2));
    G.set(6, 0, Rational(-1));
    G.set(8, 0, Rational(1));
    HamiltonianModel S;
    S.set(6, 0, Rational(-1));
    S.set(8, 0, Rational(7, 8));
    CHECK_FALSE(G.separable());
    const auto pq = single(0);  // divergence depends on x only, so the shear keeps every integral
    const Real h("-0.01");
    const Real tol("1e-20");
    const Real ms = melnikov_value(S, h, Side::InnerRight, pq, tol).value;
    const Real mg = melnikov_value(G, h, Side::InnerRight, pq, tol).value;
    CHECK(rel_close(mg, ms, Real("1e-18")));
    const Poly2 one{{{0, 0}, Rational(1)}};
    const Real ts = time_integral(S, h, Side::InnerRight, one, Real("1e-12")).value;
    const Real tg = time_integral(G, h, Side::InnerRight, one, Real("1e-10")).value;
    CHECK(rel_close(tg, ts, Real("1e-9")));
    const Real l3s = time_integral(S, Real(0), Side::InnerRight, c4_integrand(single(3)), Real("1e-12")).value;
    const Real l3g = time_integral(G, Real(0), Side::InnerRight, c4_integrand(single(3)), Real("1e-10")).value;
    CHECK(rel_close(l3g, l3s, Real("1e-9")));

    const Oval o = trace_oval(G, h, Side::InnerRight, 400);
    CHECK(o.rule == OvalRule::ArcLength);
    CHECK(o.residual < Real("1e-20"));
    CHECK(abs(turning(o) + 2 * real_pi()) < Real("1e-6"));
    // second order in the arc-length step
    const Real coarse = abs(melnikov_integral(trace_oval(G, h, Side::InnerRight, 200), pq) - ms);
    const Real fine = abs(melnikov_integral(o, pq) - ms);
    CHECK(coarse / fine > 3);
    CHECK(fine < Real("1e-3") * abs(ms));
}
