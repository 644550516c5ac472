#include "doctest.h"

#include <chrono>
#include <random>

#include "nilmel/expansion.hpp"
#include "nilmel/lienard.hpp"

using namespace nilmel;

namespace {

LienardParams random_params(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
    LienardParams p;
    for (auto& v : p.a) v = Rational(num(rng)) / Rational(den(rng));
    return p;
}

MelnikovExpansion random_expansion(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-3, 3);
    std::array<Real, 10> c;
    for (auto& v : c) v = Real(u(rng));
    return MelnikovExpansion::from_inner(c, Real(u(rng)), Real(u(rng)), Real(u(rng)), default_constants());
}

bool rel_close(const Real& a, const Real& b, const Real& tol) { return abs(a - b) <= tol * abs(b); }

BasisSample quadrature_samples(const LienardParams& p, Side side) {
    const auto g = geometric_grid(Real("1e-9"), Real("1e-3"), 40, side);
    return sample_melnikov(HamiltonianModel::lienard(), p.perturbation(), side, g, Real("1e-24"));
}

} // namespace

TEST_CASE("eval_expansion: single terms") {
    PrecisionScope ps(30);
    std::array<Real, 10> c{};
    for (auto& v : c) v = 0;
    auto e = MelnikovExpansion::from_inner(c, Real(0), Real(0), Real(0), default_constants());
    for (Side s : {Side::InnerRight, Side::InnerLeft})
        for (const char* h : {"-1e-6", "-0.01"}) CHECK(eval_expansion(e, Real(h), s) == 0);
    CHECK(eval_expansion(e, Real("1e-6"), Side::Outer) == 0);

    c[1] = 1;
    e = MelnikovExpansion::from_inner(c, Real(0), Real(0), Real(0), default_constants());
    CHECK(abs(eval_expansion(e, Real("-1e-6"), Side::InnerRight) - Real("1e-4")) < Real("1e-28"));
    CHECK(abs(eval_expansion(e, Real("-1e-6"), Side::InnerLeft) - Real("1e-4")) < Real("1e-28"));
    // outer: -2 D1 c1 h^(2/3)
    CHECK(abs(eval_expansion(e, Real("1e-6"), Side::Outer) + 2 * default_constants().D1 * Real("1e-4")) <
          Real("1e-28"));

    c[1] = 0;
    c[2] = 1;
    e = MelnikovExpansion::from_inner(c, Real(0), Real(0), Real(0), default_constants());
    const Real v = eval_expansion(e, Real("-1e-6"), Side::InnerRight);
    CHECK(abs(v - Real("1e-5")) < Real("1e-28"));
    CHECK(eval_expansion(e, Real("-1e-6"), Side::InnerLeft) == -v);
    CHECK(eval_expansion(e, Real("1e-6"), Side::Outer) == 0);
}

TEST_CASE("outer relations are enforced on construction") {
    PrecisionScope ps(30);
    const auto e = random_expansion(3);
    const auto& k = e.constants;
    CHECK(e.cstar[0] == e.c[0] + e.c0t);
    CHECK(e.cstar[1] == -k.D1 * e.c[1]);
    CHECK(e.cstar[2] == e.c[3]);
    CHECK(e.cstar[4] == -k.D2 * e.c[6]);
    CHECK(e.cstar[5] == k.D1 * e.c[7]);
    CHECK(e.cstar[6] == e.c[9]);
}

TEST_CASE("expansion against quadrature near the loop") {
    PrecisionScope ps(30);
    const auto p = random_params(41);
    const auto e = lienard_expansion(p, default_constants());
    const auto H = HamiltonianModel::lienard();
    for (Side s : {Side::InnerRight, Side::InnerLeft, Side::Outer}) {
        const Real h = s == Side::Outer ? Real("1e-8") : Real("-1e-8");
        const auto m = melnikov_value(H, h, s, p.perturbation(), Real("1e-24"));
        INFO(to_string(s));
        CHECK(rel_close(eval_expansion(e, h, s), m.value, Real("1e-3")));
    }
}

TEST_CASE("fit round trip") {
    PrecisionScope ps(30);
    for (unsigned seed : {1u, 2u, 3u}) {
        const auto e = random_expansion(seed);
        for (Side s : {Side::InnerRight, Side::InnerLeft, Side::Outer}) {
            for (const char* lo : {"1e-9", "1e-6"}) {
                const auto g = geometric_grid(Real(lo), Real("1e-3"), 40, s);
                const auto want = basis_coefficients(e, s);
                for (int rt : {0, 3}) {
                    FitOptions opt;
                    opt.remainder_terms = rt;
                    const auto f = fit_expansion(sample_expansion(e, s, g), opt);
                    REQUIRE(f.coefficients.size() == want.size() + rt);
                    CHECK_FALSE(f.ill_conditioned);
                    for (size_t i = 0; i < want.size(); ++i) {
                        INFO(to_string(s) << " lo " << lo << " term " << f.basis[i]);
                        CHECK(rel_close(f.coefficients[i], want[i], Real("1e-8")));
                    }
                    for (int i = 0; i < rt; ++i) CHECK(abs(f.coefficients[want.size() + i]) < Real("1e-6"));
                }
            }
        }
    }
}

TEST_CASE("fit input validation") {
    PrecisionScope ps(30);
    const auto e = random_expansion(9);
    auto s = sample_expansion(e, Side::InnerRight, geometric_grid(Real("1e-9"), Real("1e-3"), 19, Side::InnerRight));
    FitOptions bare;
    bare.remainder_terms = 0;
    CHECK_THROWS_AS(fit_expansion(s, bare), FitError);
    s = sample_expansion(e, Side::InnerRight, geometric_grid(Real("1e-9"), Real("1e-3"), 40, Side::InnerRight));
    auto wrong = s;
    wrong.side = Side::Outer;
    CHECK_THROWS_AS(fit_expansion(wrong), FitError);
    auto repeated = s;
    repeated.h[5] = repeated.h[4];
    CHECK_THROWS_AS(fit_expansion(repeated), FitError);
    FitOptions strict;
    strict.condition_limit = Real(10);
    const auto f = fit_expansion(s, strict);
    CHECK(f.ill_conditioned);
    CHECK(f.coefficients.size() == 13);
}

TEST_CASE("fit of quadrature samples: c0..c3 against closed forms") {
    PrecisionScope ps(30);
    const auto t0 = std::chrono::steady_clock::now();
    const auto p = random_params(2024);
    const auto e = lienard_expansion(p, default_constants());
    const auto f = fit_expansion(quadrature_samples(p, Side::InnerRight));
    for (int i = 0; i < 4; ++i) {
        INFO("c" << i << " fit " << to_decimal(f.coefficients[i], 12) << " closed " << to_decimal(e.c[i], 12));
        CHECK(rel_close(f.coefficients[i], e.c[i], Real("1e-4")));
    }
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 60);
}

// 1e-8..1e-1 with the remainder through |h|^6: resolves the coefficients past |h|^(4/3)
static FitResult wide_fit(const LienardParams& p, Side side) {
    const auto g = geometric_grid(Real("1e-8"), Real("1e-1"), 120, side);
    FitOptions opt;
    opt.remainder_terms = 25;
    return fit_expansion(sample_melnikov(HamiltonianModel::lienard(), p.perturbation(), side, g, Real("1e-32")), opt);
}

TEST_CASE("cross-side consistency of fitted coefficients") {
    PrecisionScope ps(40);
    const auto p = random_params(77);
    const auto r = fit_expansion(quadrature_samples(p, Side::InnerRight));
    const auto l = fit_expansion(quadrature_samples(p, Side::InnerLeft));
    const auto o = fit_expansion(quadrature_samples(p, Side::Outer));
    // default grid: c1, c2, c3
    for (int i : {1, 2, 3}) {
        const Real sign = i == 2 ? Real(-1) : Real(1);
        INFO("c" << i << " right " << to_decimal(r.coefficients[i], 10) << " left " << to_decimal(l.coefficients[i], 10));
        CHECK(rel_close(sign * l.coefficients[i], r.coefficients[i], Real("1e-4")));
    }
    // h^(2/3) coefficient of M* is -2 D1 c1
    const Real want = -2 * default_constants().D1 * r.coefficients[1];
    CHECK(rel_close(o.coefficients[1], want, Real("1e-5")));

    // wide grid: c5, c6, c7 shared up to the sign pattern, c8 flips sign
    const auto rw = wide_fit(p, Side::InnerRight);
    const auto lw = wide_fit(p, Side::InnerLeft);
    for (int i : {5, 6, 7}) {
        const Real sign = i == 5 ? Real(-1) : Real(1);
        INFO("c" << i << " right " << to_decimal(rw.coefficients[i], 10) << " left " << to_decimal(lw.coefficients[i], 10));
        CHECK(rel_close(sign * lw.coefficients[i], rw.coefficients[i], Real("1e-2")));
    }
    CHECK(rw.coefficients[8] * lw.coefficients[8] < 0);
}

TEST_CASE("fit: a_0 only gives c1 = -2 sqrt2 A~0") {
    PrecisionScope ps(30);
    LienardParams p;
    p.a[0] = 1;
    const auto f = fit_expansion(quadrature_samples(p, Side::InnerRight));
    const Real want = -2 * real_sqrt2() * default_constants().A0t;
    CHECK(abs(want - Real("1.4872")) < Real("1e-4"));
    CHECK(rel_close(f.coefficients[1], want, Real("1e-5")));
}

TEST_CASE("fit: case-1 parameters leave only c9") {
    PrecisionScope ps(40);
    const auto sol = solve_case(1);
    const auto p = sol.instantiate({{7, Rational(1, 3)}, {12, Rational(1)}});
    const Real c9 = lienard_form("c9").value(p, default_constants());
    REQUIRE(c9 != 0);
    const auto f = wide_fit(p, Side::InnerRight);
    for (int i = 0; i < 7; ++i) {
        INFO("c" << i << " = " << to_decimal(f.coefficients[i], 6));
        CHECK(abs(f.coefficients[i]) < Real("1e-6") * abs(c9));
    }
    for (int i : {7, 8}) CHECK(abs(f.coefficients[i]) < Real("1e-2") * abs(c9));
    CHECK(rel_close(f.coefficients[9], c9, Real("1e-2")));
}

TEST_CASE("assemble from chain values") {
    PrecisionScope ps(30);
    const auto& k = default_constants();
    const std::vector<std::string> rt = {"rt00", "rt10", "rt20", "rt30", "rt40", "rt01",
                                         "rt60", "rt11", "rt70", "rt21", "rt80"};
    ChainValues zero;
    for (const auto& n : rt) zero.values[n] = 0;
    LoopIntegrals loops{Real(2), Real(3), Real(5), Real(7), Real(12)};
    const auto a = assemble_from_chain(zero, k, loops).expansion;
    CHECK(a.c[0] == 2);
    CHECK(a.c0t == 3);
    CHECK(a.c[4] == 5);
    CHECK(a.c4t == 7);
    CHECK(a.cstar[0] == 5);
    CHECK(a.cstar[3] == 12);
    for (int i : {1, 2, 3, 5, 6, 7, 8, 9}) CHECK(a.c[i] == 0);

    // Lienard: r~00 = 2 sqrt2 sigma_0 = -2 sqrt2 a_0
    const Rational a0(3, 7);
    const auto r = r_coefficients_closed(HamiltonianModel::lienard(), {-a0, 0, 0, 0});
    ChainValues lien = zero;
    lien.values["rt00"] = r[0].to_real();
    const auto b = assemble_from_chain(lien, k, loops).expansion;
    CHECK(abs(b.c[1] - (-2 * real_sqrt2() * k.A0t * to_real(a0))) < Real("1e-25"));

    std::mt19937 rng(8);
    std::uniform_real_distribution<double> u(-2, 2);
    ChainValues rnd;
    for (const auto& n : rt) rnd.values[n] = Real(u(rng));
    // r^(1) equal to their r~ partners
    for (auto [s, t] : std::vector<std::pair<const char*, const char*>>{
             {"r1_01", "rt00"}, {"r1_11", "rt20"}, {"r1_21", "rt40"}, {"r1_31", "rt60"},
             {"r1_41", "rt80"}, {"r1_03", "rt01"}, {"r1_13", "rt21"}})
        rnd.values[s] = rnd.values[t];
    const auto c = assemble_from_chain(rnd, k, loops);
    CHECK(c.expansion.cstar[2] == c.expansion.c[3]);
    CHECK(c.expansion.cstar[6] == c.expansion.c[9]);
    CHECK(c.star_check.size() == 5);
    for (const auto& [name, pair] : c.star_check) {
        INFO(name);
        CHECK(abs(pair.first - pair.second) < Real("1e-20") * (1 + abs(pair.second)));
    }

    ChainValues missing = rnd;
    missing.values.erase("rt70");
    CHECK_THROWS_AS(assemble_from_chain(missing, k, loops), MissingChainInput);
}
