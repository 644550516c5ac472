#include "nilmel/cycles.hpp"

#include <cmath>

#include "nilmel/lienard.hpp"

namespace nilmel {

namespace {

// Magnitude function of a group: t^(num/6), times |ln t| when logged.
struct Group {
    std::vector<std::string> names;  // single entry, or (lower, top) pair
    int num;
    bool logged;
};

Real log_phi(const Group& g, const Real& x) {  // x = ln t
    Real v = x * g.num / 6;
    if (g.logged) v += log(-x);
    return v;
}

std::vector<Group> groups(const ChainSpec& s) {
    std::vector<Group> g;
    if (s.variant == 3)
        g.push_back({{"c0t", "c0"}, 0, false});
    else
        g.push_back({{"c0", "c0t"}, 0, false});
    g.push_back({{"c1"}, 4, false});
    g.push_back({{"c2"}, 5, false});
    g.push_back({{"c3"}, 6, true});
    if (s.branch == 'A')
        g.push_back({{"c41", "c41t"}, 6, false});
    else
        g.push_back({{"c41t", "c41"}, 6, false});
    g.push_back({{"c5"}, 7, false});
    g.push_back({{"c6"}, 8, false});
    g.push_back({{"c7"}, 10, false});
    g.push_back({{"c8"}, 11, false});
    g.push_back({{"c9"}, 12, true});
    return g;
}

std::map<std::string, int> signs(const ChainSpec& s) {
    std::map<std::string, int> sg = {{"c1", -1}, {"c2", -1}, {"c3", 1}, {"c6", 1}, {"c7", -1}, {"c9", -1}};
    sg["c8"] = s.c8_negative ? -1 : 1;
    switch (s.variant) {
    case 1: sg["c0"] = 1, sg["c0t"] = 1; break;
    case 2: sg["c0"] = 1, sg["c0t"] = -1; break;
    default: sg["c0t"] = 1, sg["c0"] = -1; break;
    }
    if (s.branch == 'A')
        sg["c41"] = -1, sg["c41t"] = 1, sg["c5"] = -1;
    else
        sg["c41t"] = -1, sg["c41"] = 1, sg["c5"] = 1;
    return sg;
}

// ln t where base * phi_lower(t) = phi_upper(t), lower power dominating below
Real top_balance(const Group& lower, const Group& upper, const Real& base) {
    const Real lb = log(base);
    auto g = [&](const Real& x) { return lb + log_phi(lower, x) - log_phi(upper, x); };
    Real a = -1, b = -1;
    if (!(g(a) < 0)) throw ChainError("base too large: the fixed term never dominates for |h| < 1/e");
    while (g(b) < 0) {
        a = b;
        b *= 2;
        if (b < -1e7) throw ChainError("base too small");
    }
    // g(b) >= 0 > g(a), b < a
    for (int i = 0; i < 300; ++i) {
        const Real m = (a + b) / 2;
        (g(m) < 0 ? a : b) = m;
    }
    return (a + b) / 2;
}

} // namespace

const std::vector<std::string>& chain_names() {
    static const std::vector<std::string> n = {"c0", "c0t", "c1", "c2", "c3", "c41", "c41t", "c5", "c6", "c7", "c8", "c9"};
    return n;
}

Chain build_chain(const ChainSpec& spec) {
    if (spec.l < 6 || spec.l > 9) throw ChainError("l must be 6..9");
    if (spec.variant < 1 || spec.variant > 3) throw ChainError("variant must be 1, 2 or 3");
    if (spec.branch != 'A' && spec.branch != 'B') throw ChainError("branch must be A or B");
    if (!(spec.ratio > 0 && spec.ratio < 1)) throw ChainError("ratio must lie in (0, 1)");
    if (!(spec.base > 0 && spec.base < 1)) throw ChainError("base must lie in (0, 1)");
    if (!(spec.log_stretch > 1)) throw ChainError("log_stretch must exceed 1");

    Chain ch;
    ch.spec = spec;
    for (const auto& n : chain_names()) ch.c[n] = 0;
    const auto gs = groups(spec);
    const auto sg = signs(spec);
    const int top = spec.l;  // group index of the fixed term c_l

    const Real lr = log(spec.ratio);
    std::vector<Real> mag(top);  // magnitude of each group's top entry
    mag[top - 1] = spec.base;
    Real x = top_balance(gs[top - 1], gs[top], spec.base);
    ch.balance.push_back(exp(x));
    for (int g = top - 2; g >= 0; --g) {
        // a t|ln t| term against a t term only gains the ratio of the logs, so the
        // balances on both sides of that pair sit at log_stretch times the previous |ln t|
        auto log_pair = [&](int i) { return gs[i].logged && gs[i].num == gs[i + 1].num; };
        if (log_pair(g) || log_pair(g + 1))
            x *= spec.log_stretch;
        else
            x += lr;
        mag[g] = mag[g + 1] * exp(log_phi(gs[g + 1], x) - log_phi(gs[g], x));
        ch.balance.push_back(exp(x));
    }

    for (int g = 0; g < top; ++g) {
        const auto& names = gs[g].names;
        if (names.size() == 2) {
            const Real lower = spec.variant == 1 && g == 0 ? mag[g] : mag[g] * spec.ratio;
            ch.c[names[0]] = sg.at(names[0]) * lower;
            ch.c[names[1]] = sg.at(names[1]) * mag[g];
        } else {
            ch.c[names[0]] = sg.at(names[0]) * mag[g];
        }
        ch.order.insert(ch.order.end(), names.begin(), names.end());
    }
    const std::string fixed = gs[top].names[0];
    ch.c[fixed] = sg.at(fixed);
    ch.order.push_back(fixed);

    ch.h_hi = ch.balance.front() / spec.ratio;
    if (ch.h_hi > Real("0.1")) ch.h_hi = Real("0.1");
    ch.h_lo = ch.balance.back() * spec.ratio * spec.ratio * spec.ratio;
    return ch;
}

TruncatedExpansions TruncatedExpansions::from_chain(const Chain& chain, const UniversalConstants& k) {
    TruncatedExpansions f;
    f.l = chain.spec.l;
    f.c = chain.c;
    f.D1 = k.D1;
    f.D2 = k.D2;
    return f;
}

namespace {

struct Powers {
    Real u4, u5, u7, u8, u10, u11, t, tL, t2L;
};

Powers powers(const Real& t) {
    Powers p;
    const Real L = log(t);
    const Real u = exp(L / 6);
    const Real u2 = u * u;
    p.u4 = u2 * u2;
    p.u5 = p.u4 * u;
    p.u7 = p.u5 * u2;
    p.u8 = p.u4 * p.u4;
    p.u10 = p.u8 * u2;
    p.u11 = p.u10 * u;
    p.t = t;
    p.tL = t * L;
    p.t2L = t * p.tL;
    return p;
}

} // namespace

std::pair<Real, Real> TruncatedExpansions::eval(int which, const Real& t) const {
    // the three functions share the powers of t; scans evaluate them at the same t in a row
    thread_local Real cached_t = -1;
    thread_local Powers p;
    if (cached_t != t || cached_t.precision() != t.precision()) {
        p = powers(t);
        cached_t = t;
    }
    auto get = [&](const char* n) {
        auto it = c.find(n);
        return it == c.end() ? Real(0) : it->second;
    };
    std::vector<Real> terms;
    switch (which) {
    case 0:
    case 1: {
        const Real s = which == 0 ? Real(1) : Real(-1);  // sign flips of c2, c5, c8 on the left lobe
        terms = {which == 0 ? get("c0") : get("c0t"),
                 get("c1") * p.u4,
                 s * get("c2") * p.u5,
                 -get("c3") * p.tL,
                 -(which == 0 ? get("c41") : get("c41t")) * p.t,
                 s * get("c5") * p.u7,
                 get("c6") * p.u8,
                 get("c7") * p.u10,
                 s * get("c8") * p.u11,
                 get("c9") * p.t2L};
        break;
    }
    case 2:
        terms = {get("c0") + get("c0t"),
                 -2 * D1 * get("c1") * p.u4,
                 2 * get("c3") * p.tL,
                 (get("c41") + get("c41t")) * p.t,
                 -2 * D2 * get("c6") * p.u8,
                 2 * D1 * get("c7") * p.u10,
                 2 * get("c9") * p.t2L};
        break;
    default: throw std::invalid_argument("f must be 0, 1 or 2");
    }
    Real v = 0, mag = 0;
    for (const auto& x : terms) {
        v += x;
        mag += abs(x);
    }
    const Real eps = pow(Real(10), 1 - static_cast<int>(Real::default_precision()));
    return {v, 16 * mag * eps};
}

ZeroCountReport count_zeros(const TruncatedExpansions& fin, const Real& h_lo, const Real& h_hi, unsigned digits,
                            int points_per_decade) {
    if (!(h_lo > 0) || !(h_hi > h_lo)) throw std::invalid_argument("window needs 0 < h_lo < h_hi");
    if (points_per_decade < 1) throw std::invalid_argument("points_per_decade must be positive");
    PrecisionScope ps(digits);
    TruncatedExpansions f = fin;
    for (auto& [n, v] : f.c) v = Real(v.str(0, std::ios_base::scientific));
    f.D1 = Real(fin.D1.str(0, std::ios_base::scientific));
    f.D2 = Real(fin.D2.str(0, std::ios_base::scientific));

    ZeroCountReport r;
    r.digits = digits;
    r.h_lo = h_lo;
    r.h_hi = h_hi;
    const Real xa = log(Real(h_lo)), xb = log(Real(h_hi));
    const Real decades = (xb - xa) / log(Real(10));
    const int n = static_cast<int>(std::ceil(static_cast<double>(decades) * points_per_decade - 1e-9)) + 1;
    r.points = n;
    const Real dx = (xb - xa) / (n - 1);
    const Real stop = pow(Real(10), -static_cast<int>(digits) / 2);

    auto certified = [](const std::pair<Real, Real>& v) { return abs(v.first) > 10 * v.second; };
    struct State {
        bool have = false;
        bool gap = false;  // uncertified samples since the last certified one
        Real last_x, last_v;
    };
    std::array<State, 3> st;
    for (int i = 0; i < n; ++i) {
        const Real x = i == n - 1 ? xb : xa + dx * i;
        const Real t = exp(x);
        for (int which = 0; which < 3; ++which) {
            State& s = st[which];
            const auto v = f.eval(which, t);
            if (!certified(v)) {
                s.gap = true;
                continue;
            }
            if (s.have && (v.first > 0) != (s.last_v > 0)) {
                auto at = [&](const Real& y) { return f.eval(which, exp(y)); };
                Real a = s.last_x, b = x, fa = s.last_v, fb = v.first;
                for (int it = 0; it < 400 && b - a > stop; ++it) {
                    const Real m = (a + b) / 2;
                    const auto vm = at(m);
                    if (!certified(vm)) break;
                    if ((vm.first > 0) == (fa > 0))
                        a = m, fa = vm.first;
                    else
                        b = m, fb = vm.first;
                }
                r.zeros[which].push_back({exp((a + b) / 2), exp(a), exp(b), fa, fb});
            } else if (s.have && s.gap) {
                ++r.ambiguous[which];
            }
            s.have = true;
            s.last_x = x;
            s.last_v = v.first;
            s.gap = false;
        }
    }
    for (int which = 0; which < 3; ++which) {
        r.counts[which] = static_cast<int>(r.zeros[which].size());
        r.total += r.counts[which];
    }
    return r;
}

ZeroCountReport count_chain(const ChainSpec& spec, unsigned digits, int points_per_decade) {
    PrecisionScope ps(digits);
    ChainSpec s = spec;
    s.ratio = Real(spec.ratio.str(0, std::ios_base::scientific));
    s.base = Real(spec.base.str(0, std::ios_base::scientific));
    const Chain ch = build_chain(s);
    auto r = count_zeros(TruncatedExpansions::from_chain(ch, default_constants()), ch.h_lo, ch.h_hi, digits,
                         points_per_decade);
    r.expected_total = limit_cycle_count(spec.l);
    if (spec.l == 9) {
        static const std::array<std::array<int, 3>, 3> triples = {{{6, 6, 4}, {6, 5, 5}, {5, 6, 5}}};
        r.expected = triples[spec.variant - 1];
    }
    r.matches = r.total == r.expected_total && (!r.expected || *r.expected == r.counts) &&
                r.ambiguous == std::array<int, 3>{};
    return r;
}

} // namespace nilmel
