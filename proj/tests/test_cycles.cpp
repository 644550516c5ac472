#include "doctest.h"

#include "nilmel/cycles.hpp"
#include "nilmel/lienard.hpp"

using namespace nilmel;

namespace {

// Independent count: with the chain ordered by dominance as t -> 0, each function changes sign
// once per alternation in the signs of its successive dominant terms.
struct Term {
    std::string name;
    int num;      // t^(num/6)
    bool logged;  // times ln t (negative)
    int factor;   // constant multiplier sign
};

std::vector<Term> terms_of(int f) {
    if (f == 2)
        return {{"c0+c0t", 0, false, 1}, {"c1", 4, false, -1},   {"c3", 6, true, 2},  {"c41+c41t", 6, false, 1},
                {"c6", 8, false, -1},    {"c7", 10, false, 1},   {"c9", 12, true, 2}};
    const int s = f == 0 ? 1 : -1;
    return {{f == 0 ? "c0" : "c0t", 0, false, 1},
            {"c1", 4, false, 1},
            {"c2", 5, false, s},
            {"c3", 6, true, -1},
            {f == 0 ? "c41" : "c41t", 6, false, -1},
            {"c5", 7, false, s},
            {"c6", 8, false, 1},
            {"c7", 10, false, 1},
            {"c8", 11, false, s},
            {"c9", 12, true, 1}};
}

Real coeff(const Chain& ch, const std::string& name) {
    if (name == "c0+c0t") return ch.c.at("c0") + ch.c.at("c0t");
    if (name == "c41+c41t") return ch.c.at("c41") + ch.c.at("c41t");
    return ch.c.at(name);
}

int alternations(const Chain& ch, int f) {
    int count = 0, last = 0;
    for (const auto& t : terms_of(f)) {
        const Real v = coeff(ch, t.name);
        if (v == 0) continue;
        int sg = (v > 0 ? 1 : -1) * (t.factor > 0 ? 1 : -1) * (t.logged ? -1 : 1);
        if (last != 0 && sg != last) ++count;
        last = sg;
    }
    return count;
}

// log10 of |term| at t
Real log_term(const Chain& ch, const Term& t, const Real& x) {
    const Real v = abs(coeff(ch, t.name));
    if (v == 0) return Real(-1e9);
    Real r = log(v) + x * t.num / 6;
    if (t.logged) r += log(-x);
    return r;
}

ChainSpec spec(int l, int variant, char branch, bool c8neg = true) {
    ChainSpec s;
    s.l = l;
    s.variant = variant;
    s.branch = branch;
    s.c8_negative = c8neg;
    return s;
}

} // namespace

TEST_CASE("chain: input validation") {
    CHECK_THROWS_AS(build_chain(spec(5, 1, 'A')), ChainError);
    CHECK_THROWS_AS(build_chain(spec(10, 1, 'A')), ChainError);
    CHECK_THROWS_AS(build_chain(spec(9, 4, 'A')), ChainError);
    CHECK_THROWS_AS(build_chain(spec(9, 1, 'C')), ChainError);
    ChainSpec s;
    s.ratio = 1;
    CHECK_THROWS_AS(build_chain(s), ChainError);
    s = ChainSpec{};
    s.base = 2;
    CHECK_THROWS_AS(build_chain(s), ChainError);
    s = ChainSpec{};
    s.log_stretch = 1;
    CHECK_THROWS_AS(build_chain(s), ChainError);
}

TEST_CASE("chain: signs and truncation") {
    PrecisionScope ps(40);
    const Chain v1 = build_chain(spec(9, 1, 'A'));
    CHECK(v1.c.at("c0") > 0);
    CHECK(v1.c.at("c0t") > 0);
    CHECK(v1.c.at("c0") == v1.c.at("c0t"));
    CHECK(v1.c.at("c1") < 0);
    CHECK(v1.c.at("c2") < 0);
    CHECK(v1.c.at("c3") > 0);
    CHECK(v1.c.at("c41") < 0);
    CHECK(v1.c.at("c41t") > 0);
    CHECK(v1.c.at("c5") < 0);
    CHECK(v1.c.at("c6") > 0);
    CHECK(v1.c.at("c7") < 0);
    CHECK(v1.c.at("c8") < 0);
    CHECK(v1.c.at("c9") == -1);
    CHECK(v1.order.size() == 12);
    CHECK(v1.order.back() == "c9");
    CHECK(v1.balance.size() == 9);

    const Chain v2 = build_chain(spec(9, 2, 'B', false));
    CHECK(v2.c.at("c0") > 0);
    CHECK(v2.c.at("c0t") < 0);
    CHECK(abs(v2.c.at("c0")) < abs(v2.c.at("c0t")));
    CHECK(v2.c.at("c41t") < 0);
    CHECK(v2.c.at("c41") > 0);
    CHECK(abs(v2.c.at("c41t")) < abs(v2.c.at("c41")));
    CHECK(v2.c.at("c5") > 0);
    CHECK(v2.c.at("c8") > 0);

    const Chain v3 = build_chain(spec(9, 3, 'A'));
    CHECK(v3.c.at("c0t") > 0);
    CHECK(v3.c.at("c0") < 0);
    CHECK(abs(v3.c.at("c0t")) < abs(v3.c.at("c0")));

    for (int l = 6; l <= 8; ++l) {
        const Chain ch = build_chain(spec(l, 1, 'A'));
        const std::vector<std::string> fixed = {"c6", "c7", "c8"};
        CHECK(abs(ch.c.at(fixed[l - 6])) == 1);
        CHECK(ch.order.back() == fixed[l - 6]);
        CHECK(ch.c.at("c9") == 0);
        if (l < 8) CHECK(ch.c.at("c8") == 0);
        CHECK(ch.balance.size() == static_cast<size_t>(l));
    }
    CHECK(build_chain(spec(6, 1, 'A')).c.at("c6") == 1);
    CHECK(build_chain(spec(7, 1, 'A')).c.at("c7") == -1);
    CHECK(build_chain(spec(8, 1, 'A', false)).c.at("c8") == 1);
}

TEST_CASE("chain: each term dominates its own regime") {
    PrecisionScope ps(40);
    for (int l = 6; l <= 9; ++l)
        for (int v = 1; v <= 3; ++v)
            for (char b : {'A', 'B'}) {
                const Chain ch = build_chain(spec(l, v, b));
                // balance[k] separates group l-1-k from l-k; the regime of a group lies between
                // its two balances, or above the first one for the fixed term
                std::vector<Real> xs;
                for (const auto& t : ch.balance) xs.push_back(log(t));
                for (size_t k = 0; k + 1 <= xs.size(); ++k) {
                    const Real lo = k + 1 < xs.size() ? xs[k + 1] : xs[k] + log(ch.spec.ratio);
                    const Real hi = xs[k];
                    const Real mid = -exp((log(-lo) + log(-hi)) / 2);  // geometric mid in |ln t|
                    const int group = l - 1 - static_cast<int>(k);
                    // a pair is represented by its larger entry, which lives in f1 or f2 only
                    std::vector<int> fs = {0, 1};
                    if (group == 0 || group == 4) {
                        const std::string a = group == 0 ? "c0" : "c41", bt = group == 0 ? "c0t" : "c41t";
                        const Real ma = abs(ch.c.at(a)), mb = abs(ch.c.at(bt));
                        if (ma > mb) fs = {0};
                        if (mb > ma) fs = {1};
                    }
                    for (int f : fs) {
                        const auto ts = terms_of(f);
                        size_t best = 0;
                        for (size_t i = 1; i < ts.size(); ++i)
                            if (log_term(ch, ts[i], mid) > log_term(ch, ts[best], mid)) best = i;
                        INFO("l=" << l << " v" << v << b << " k=" << k << " f" << f + 1);
                        CHECK(static_cast<int>(best) == group);
                    }
                }
                CHECK(ch.h_lo < ch.balance.back());
                CHECK(ch.h_hi > ch.balance.front());
                CHECK(ch.h_hi <= Real("0.1"));
            }
}

TEST_CASE("zero count: a single signed term has no zeros") {
    TruncatedExpansions f;
    f.c["c9"] = -1;
    f.D1 = 2;
    f.D2 = 1;
    const auto r = count_zeros(f, Real("1e-30"), Real("1e-1"), 40, 50);
    CHECK(r.counts == std::array<int, 3>{0, 0, 0});
    CHECK(r.total == 0);
    CHECK(r.ambiguous == std::array<int, 3>{0, 0, 0});
}

TEST_CASE("zero count: a double root is reported as ambiguous, not counted") {
    // f1 = f2 = (1 - u^4)^2 with u = t^(1/6): touches zero at t = 1, the middle grid point
    TruncatedExpansions f;
    f.c = {{"c0", 1}, {"c0t", 1}, {"c1", -2}, {"c6", 1}};
    f.D1 = 2;
    f.D2 = 1;
    const auto r = count_zeros(f, Real("1e-2"), Real("1e2"), 12, 50);
    CHECK(r.counts[0] == 0);
    CHECK(r.counts[1] == 0);
    CHECK(r.ambiguous[0] == 1);
    CHECK(r.ambiguous[1] == 1);
    CHECK_THROWS_AS(count_zeros(f, Real(1), Real("0.5")), std::invalid_argument);
    CHECK_THROWS_AS(count_zeros(f, Real(0), Real("0.5")), std::invalid_argument);
    CHECK_THROWS_AS(count_zeros(f, Real("0.1"), Real("0.5"), 30, 0), std::invalid_argument);
}

TEST_CASE("zero count: l = 9 triples for every variant and branch") {
    const std::array<std::array<int, 3>, 3> triples = {{{6, 6, 4}, {6, 5, 5}, {5, 6, 5}}};
    for (int v = 1; v <= 3; ++v)
        for (char b : {'A', 'B'}) {
            INFO("variant " << v << b);
            const auto r = count_chain(spec(9, v, b));
            CHECK(r.counts == triples[v - 1]);
            CHECK(r.total == 16);
            CHECK(r.expected.has_value());
            CHECK(r.matches);
            CHECK(r.ambiguous == std::array<int, 3>{0, 0, 0});
            PrecisionScope ps(60);
            const Chain ch = build_chain(spec(9, v, b));
            for (int f = 0; f < 3; ++f) CHECK(alternations(ch, f) == r.counts[f]);
        }
}

TEST_CASE("zero count: totals for l = 6..9 agree with the sign oracle") {
    for (int l = 6; l <= 9; ++l)
        for (int v = 1; v <= 3; ++v)
            for (bool c8neg : {true, false}) {
                if (l < 9 && !c8neg) continue;
                const auto r = count_chain(spec(l, v, 'A', c8neg), 60, 40);
                INFO("l=" << l << " variant " << v);
                CHECK(r.total == limit_cycle_count(l));
                CHECK(r.matches);
                PrecisionScope ps(60);
                const Chain ch = build_chain(spec(l, v, 'A', c8neg));
                for (int f = 0; f < 3; ++f) CHECK(alternations(ch, f) == r.counts[f]);
            }
}

TEST_CASE("zero count: stable under ratio halving") {
    for (int l : {6, 7, 8, 9}) {
        ChainSpec s = spec(l, 2, 'B');
        const auto a = count_chain(s, 60, 40);
        s.ratio /= 2;
        const auto b = count_chain(s, 60, 40);
        s.ratio /= 2;
        const auto c = count_chain(s, 60, 40);
        CHECK(a.counts == b.counts);
        CHECK(b.counts == c.counts);
    }
}

TEST_CASE("zero count: brackets are certified and shrink with precision") {
    auto widths = [](unsigned digits) {
        const auto r = count_chain(spec(8, 1, 'A'), digits, 40);
        Real sum = 0;
        for (int f = 0; f < 3; ++f)
            for (const auto& z : r.zeros[f]) {
                CHECK(z.lo < z.t);
                CHECK(z.t < z.hi);
                CHECK((z.f_lo > 0) != (z.f_hi > 0));
                sum += (z.hi - z.lo) / z.t;
            }
        return sum;
    };
    const Real w40 = widths(40), w80 = widths(80);
    CHECK(w40 < Real("1e-15"));
    CHECK(w80 < w40 * Real("1e-15"));
}
