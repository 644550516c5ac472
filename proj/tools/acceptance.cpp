// One line per acceptance criterion. Exit status is 0 when every failure is one of the
// documented ones (see README), 1 otherwise.
#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "nilmel/constants.hpp"
#include "nilmel/cycles.hpp"
#include "nilmel/expansion.hpp"
#include "nilmel/hamiltonian.hpp"
#include "nilmel/lienard.hpp"
#include "nilmel/ovals.hpp"

using namespace nilmel;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
    bool documented = false;  // a known failure recorded in the README
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Real rel_err(const Real& a, const Real& b) { return abs(a - b) / abs(b); }
Real maxr(const Real& a, const Real& b) { return a < b ? b : a; }

std::vector<Rational> random_a(std::mt19937& rng) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
    std::vector<Rational> a(13);
    for (auto& v : a) v = Rational(num(rng)) / Rational(den(rng));
    return a;
}

// 1. constants
Outcome constants() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = compute_constants(30);
    const double secs = seconds_since(t0);
    const std::vector<std::pair<Real, const char*>> printed = {
        {c.A0t, "-0.5258182896"}, {c.A1t, "-0.7285951942"}, {c.A3t, "0.3200718001"},
        {c.A4t, "0.0808471737"},  {c.A0b, "1.051636580"},   {c.A2b, "-0.1616943474"}};
    Real worst = 0;
    for (const auto& [v, p] : printed) worst = maxr(worst, rel_err(v, Real(p)));
    std::ostringstream d;
    d << "max rel dev " << to_decimal(worst, 2) << " (tol 1e-9), " << secs << " s at 30 digits (limit 5 s)";
    return {worst <= Real("1e-9") && secs < 5.0 && c.signs_ok(), d.str()};
}

// 2. formula-bank h_j against the series for 100 random sparse Hamiltonians
Outcome bank_oracle() {
    std::set<std::pair<int, int>> pool_set;
    const auto& bank = FormulaBank::builtin();
    for (int j = 10; j <= 14; ++j)
        for (const auto& t : bank.terms("h" + std::to_string(j)))
            for (const auto& [s, p] : t.factors) {
                int a, b;
                if (std::sscanf(s.c_str(), "h_%d_%d", &a, &b) == 2) pool_set.insert({a, b});
            }
    const std::vector<std::pair<int, int>> pool(pool_set.begin(), pool_set.end());
    std::mt19937_64 rng(2024);
    int mismatches = 0, nonzero = 0;
    for (int t = 0; t < 100; ++t) {
        HamiltonianModel h;
        const int n = std::uniform_int_distribution<int>(1, 8)(rng);
        for (int k = 0; k < n; ++k) {
            const auto ij = pool[std::uniform_int_distribution<size_t>(0, pool.size() - 1)(rng)];
            Rational r;
            do {
                r = Rational(std::uniform_int_distribution<int>(-9, 9)(rng), std::uniform_int_distribution<int>(1, 3)(rng));
                r.canonicalize();
            } while (sgn(r) == 0 || abs(r) > 3);
            h.set(ij.first, ij.second, r);
        }
        const auto hs = h_series(h, 14);
        for (int j = 10; j <= 14; ++j) {
            const Rational a = eval_appendix_hj(h, j);
            if (a != hs.at(j)) ++mismatches;
            if (sgn(a) != 0) ++nonzero;
        }
    }
    std::ostringstream d;
    d << mismatches << " mismatches in 500 comparisons (" << nonzero << " nonzero); h14 read with whitelisted errata";
    for (const auto& e : bank.errata())
        if (e.target == "h14") d << " " << e.id;
    return {mismatches == 0, d.str()};
}

// 3. the seven identities as linear forms in symbolic alpha
Outcome identities() {
    const auto& printed = FormulaBank::builtin();
    auto keep = [](const std::string& s) {
        return s.rfind("alpha_", 0) == 0 || s.rfind("mubar_", 0) == 0 || s.rfind("nbar_", 0) == 0;
    };
    const std::vector<std::pair<std::string, std::string>> pairs = {{"rt00", "r1_01"}, {"rt20", "r1_11"},
                                                                    {"rt40", "r1_21"}, {"rt60", "r1_31"},
                                                                    {"rt80", "r1_41"}, {"rt01", "r1_03"},
                                                                    {"rt21", "r1_13"}};
    const auto fixed = printed.with_errata({"E2", "E3"});
    int printed_ok = 0, fixed_ok = 0;
    std::string failing;
    for (const auto& [a, b] : pairs) {
        if ((eval_formula_bank_symbolic(printed, a, keep) - eval_formula_bank_symbolic(printed, b, keep)).is_zero())
            ++printed_ok;
        else
            failing += " " + a + "=" + b;
        if ((eval_formula_bank_symbolic(fixed, a, keep) - eval_formula_bank_symbolic(fixed, b, keep)).is_zero())
            ++fixed_ok;
    }
    std::ostringstream d;
    d << fixed_ok << "/7 hold with whitelisted errata E2 E3; " << printed_ok << "/7 on the bank as printed";
    if (!failing.empty()) d << " (printed fails:" << failing << ")";
    return {fixed_ok == 7, d.str()};
}

// 4. printed bracket coefficients against the Beta integrals
Outcome brackets() {
    const auto entries = compare_printed_brackets();
    int ok = 0;
    for (const auto& e : entries) ok += e.match();
    std::ostringstream d;
    d << ok << "/" << entries.size() << " coefficients match exactly";
    return {ok == 52 && entries.size() == 52, d.str()};
}

// 5. exact solves and ranks
Outcome solves() {
    const auto s1 = solve_case(1), s2 = solve_case(2), s3 = solve_case(3);
    const size_t r1 = jacobian_rank(1), r2 = jacobian_rank(2), r3 = jacobian_rank(3);
    const bool ranks = r1 == 11 && r2 == 10 && r3 == 9;
    bool rationals = true, others1 = true;
    for (const auto& c : s1.checks) {
        if (c.what == "a_8" || c.what == "a_10")
            rationals = rationals && c.match;
        else if (c.what.rfind("a_", 0) == 0)
            others1 = others1 && c.match;
    }
    const bool relations23 = s2.all_printed_match() && s3.all_printed_match();
    const Real dev8 = rel_err(to_real(parse_rational("21702051851422978291/27670116110564327424")), to_real(Rational(40, 51)));
    std::ostringstream d;
    d << "ranks " << r1 << "/" << r2 << "/" << r3 << (ranks ? " ok" : " WRONG") << "; cases 2, 3 relations "
      << (relations23 ? "exact" : "DIFFER") << "; case 1 other relations " << (others1 ? "exact" : "DIFFER")
      << "; case 1 20-digit rationals " << (rationals ? "exact" : "not reproduced")
      << " (exact a8 = 40/51 a12, a10 = -92/51 a12; printed a8 off by " << to_decimal(dev8, 2) << " rel)";
    Outcome o{ranks && relations23 && others1 && rationals, d.str()};
    // the printed rationals are rounded binary values; everything else must hold
    o.documented = !o.pass && !rationals && ranks && relations23 && others1;
    return o;
}

// 6. fitted c0..c3 against the closed forms
Outcome cross_validation() {
    PrecisionScope ps(30);
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(6);
    const auto p = LienardParams::from_vector(random_a(rng));
    const auto g = geometric_grid(Real("1e-9"), Real("1e-3"), 40, Side::InnerRight);
    const auto s = sample_melnikov(HamiltonianModel::lienard(), p.perturbation(), Side::InnerRight, g, Real("1e-24"));
    const auto f = fit_expansion(s);
    const auto e = lienard_expansion(p, default_constants());
    const double secs = seconds_since(t0);
    Real worst = 0;
    for (int i = 0; i < 4; ++i) worst = maxr(worst, rel_err(f.coefficients[i], e.c[i]));
    std::ostringstream d;
    d << "max rel err c0..c3 " << to_decimal(worst, 2) << " (tol 1e-4), 40 points on [1e-9, 1e-3], " << secs
      << " s (limit 60 s)";
    return {worst <= Real("1e-4") && secs < 60.0, d.str()};
}

// 7. c41 + c~41 = c*31 from independent quadratures
Outcome loop_identity() {
    PrecisionScope ps(30);
    std::mt19937 rng(7);
    const auto H = HamiltonianModel::lienard();
    Real worst = 0;
    for (int t = 0; t < 10; ++t) {
        const auto c = c_integrals(H, lienard_perturbation(random_a(rng)), Real("1e-22"));
        worst = maxr(worst, rel_err(c.c41 + c.c41t, c.c31s));
    }
    std::ostringstream d;
    d << "10 random a-vectors, max rel dev " << to_decimal(worst, 2) << " (tol 1e-8)";
    return {worst <= Real("1e-8"), d.str()};
}

// 8. zero counts of the truncated expansions
Outcome zero_counts() {
    const std::array<std::array<int, 3>, 3> triples = {{{6, 6, 4}, {6, 5, 5}, {5, 6, 5}}};
    bool ok = true;
    std::ostringstream d;
    for (int v = 1; v <= 3; ++v) {
        ChainSpec s;
        s.variant = v;
        const auto r = count_chain(s);
        ChainSpec h = s;
        h.ratio /= 2;
        const auto rh = count_chain(h);
        const bool certified = r.ambiguous == std::array<int, 3>{} && rh.ambiguous == std::array<int, 3>{};
        ok = ok && r.counts == triples[v - 1] && r.total == 16 && rh.counts == r.counts && certified;
        d << "l=9 v" << v << " (" << r.counts[0] << "," << r.counts[1] << "," << r.counts[2] << ")"
          << (rh.counts == r.counts ? "" : " UNSTABLE") << "; ";
    }
    for (int l : {8, 7, 6}) {
        ChainSpec s;
        s.l = l;
        const auto r = count_chain(s);
        ChainSpec h = s;
        h.ratio /= 2;
        const auto rh = count_chain(h);
        ok = ok && r.total == limit_cycle_count(l) && rh.counts == r.counts && r.ambiguous == std::array<int, 3>{};
        d << "l=" << l << " total " << r.total << (rh.counts == r.counts ? "" : " UNSTABLE") << (l == 6 ? "" : "; ");
    }
    d << " (60 digits, ratio 1e-4 and 5e-5)";
    return {ok, d.str()};
}

// 9. property suites
Outcome properties() {
    std::ostringstream d;
    bool ok = true;
    std::mt19937 rng(9);
    std::uniform_int_distribution<int> num(-20, 20), den(1, 9);
    auto rq = [&]() -> Rational { return Rational(num(rng)) / Rational(den(rng)); };

    // ring axioms: Rational, PiLinear (scalar), AlgebraicElement
    int ring_bad = 0;
    for (int t = 0; t < 200; ++t) {
        const Rational a = rq(), b = rq(), c = rq();
        ring_bad += (a * b) * c != a * (b * c) || a * (b + c) != a * b + a * c;
        const PiLinear x(rq(), rq()), y(rq(), rq());
        ring_bad += !((x + y) * c == x * c + y * c) || !(PiLinear(a) * x == x * a);
        const Rational h6 = -Rational(std::uniform_int_distribution<int>(1, 5)(rng));
        auto rand_alg = [&] {
            AlgebraicElement e = AlgebraicElement::beta_power(0, h6);
            for (int s = 0; s < 2; ++s)
                for (int k = 0; k < 6; ++k) e.set_coeff(s, k, rq());
            return e;
        };
        const auto p = rand_alg(), q = rand_alg(), r = rand_alg();
        ring_bad += (p * q) * r != p * (q * r) || p * (q + r) != p * q + p * r;
    }
    ok = ok && ring_bad == 0;
    d << "ring axioms " << (ring_bad == 0 ? "ok" : "FAIL");

    // series: order invariance, residual and reciprocal
    int series_bad = 0;
    for (int t = 0; t < 20; ++t) {
        BivariatePoly<Rational> g;
        g.add(0, 1, 1);
        g.add(1, 0, rq());
        g.add(2, 1, rq());
        g.add(1, 2, rq());
        g.add(3, 0, rq());
        const auto s10 = series_newton(g, 10), s16 = series_newton(g, 16);
        const auto res = g.compose(s10);
        for (int k = 0; k < 10; ++k) series_bad += s10[k] != s16[k] || sgn(res[k]) != 0;
        Series1<Rational> s(12);
        s[0] = 1 + Rational(den(rng));
        for (int k = 1; k < 12; ++k) s[k] = rq();
        const auto one = s * s.reciprocal();
        for (int k = 0; k < 12; ++k) series_bad += one[k] != (k == 0 ? 1 : 0);
    }
    ok = ok && series_bad == 0;
    d << "; series round trips " << (series_bad == 0 ? "ok" : "FAIL");

    // fit round trip on 3-decade grids, tol 1e-8
    PrecisionScope ps(40);
    Real fit_worst = 0;
    std::uniform_real_distribution<double> u(-3, 3);
    for (Side side : {Side::InnerRight, Side::InnerLeft, Side::Outer}) {
        std::array<Real, 10> c;
        for (auto& v : c) v = Real(u(rng));
        const auto e = MelnikovExpansion::from_inner(c, Real(u(rng)), Real(u(rng)), Real(u(rng)), default_constants());
        FitOptions opt;
        opt.remainder_terms = 0;
        const auto f = fit_expansion(sample_expansion(e, side, geometric_grid(Real("1e-6"), Real("1e-3"), 40, side)), opt);
        const auto want = basis_coefficients(e, side);
        for (size_t i = 0; i < want.size(); ++i) fit_worst = maxr(fit_worst, abs(f.coefficients[i] - want[i]) / abs(want[i]));
    }
    ok = ok && fit_worst <= Real("1e-8");
    d << "; fit round trip max rel err " << to_decimal(fit_worst, 2) << " (tol 1e-8)";

    // oval convergence: node rule approaches the adaptive value
    PrecisionScope ps30(30);
    const auto H = HamiltonianModel::lienard();
    const auto pq = lienard_perturbation(random_a(rng));
    const Real h("-0.01");
    const Real ref = melnikov_value(H, h, Side::InnerRight, pq, Real("1e-25")).value;
    Real prev = 1;
    bool mono = true;
    for (int n : {16, 32, 64, 128}) {
        const Real err = abs(melnikov_integral(trace_oval(H, h, Side::InnerRight, n), pq) - ref);
        mono = mono && err < prev;
        prev = err;
    }
    const Real oval_rel = prev / abs(ref);
    ok = ok && mono && oval_rel < Real("1e-10");
    d << "; oval convergence " << (mono ? "monotone" : "NOT monotone") << ", rel err at 128 nodes "
      << to_decimal(oval_rel, 2) << " (tol 1e-10)";
    return {ok, d.str()};
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"constants", constants},
        {"formula-bank h_j oracle equivalence", bank_oracle},
        {"symbolic identities", identities},
        {"closed-form brackets", brackets},
        {"case solves and ranks", solves},
        {"fit cross-validation", cross_validation},
        {"c41 + c~41 = c*31", loop_identity},
        {"zero counts", zero_counts},
        {"property suites", properties},
    };
    int undocumented = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass && !o.documented) ++undocumented;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << i + 1 << ". " << criteria[i].first << ": " << o.detail
                  << (o.documented ? " [known, see README]" : "") << " [" << seconds_since(t0) << " s]" << std::endl;
    }
    return undocumented == 0 ? 0 : 1;
}
