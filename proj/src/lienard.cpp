#include "nilmel/lienard.hpp"

#include <stdexcept>

namespace nilmel {

namespace {

Rational R(long p, long q = 1) { return Rational(p) / Rational(q); }
Rational Rs(const char* s) { return parse_rational(s); }

// coefficient list helper: {j, rational, pi}
struct Entry {
    int j;
    Rational r;
    Rational p;
};

CoefficientForm make_form(const std::string& name, ConstTag tag, const Rational& scale,
                          const std::vector<Entry>& entries) {
    CoefficientForm f;
    f.name = name;
    f.tag = tag;
    for (const auto& e : entries) f.coeff[e.j] = PiLinear(scale * e.r, scale * e.p);
    return f;
}

// the printed relations of each case: a_i = sum coeff * a_f
struct PrintedCase {
    std::vector<std::string> vanishing;
    int n_vars;
    int leading;
    std::vector<int> zeros;
    std::map<int, std::map<int, Rational>> relations;
    std::string certificate;
    ConstTag tag;
    PiLinear certificate_coeff;  // multiple of sqrt2 * tag * a_leading
};

const PrintedCase& printed_case(int id) {
    static const std::vector<PrintedCase> cases = [] {
        const std::vector<std::string> base = {"c0t", "c41", "c41t", "c0", "c1", "c2", "c3", "c5", "c6"};
        std::vector<PrintedCase> v(3);
        auto with = [&](std::vector<std::string> extra) {
            std::vector<std::string> s = base;
            s.insert(s.end(), extra.begin(), extra.end());
            return s;
        };
        const Rational a8r = Rs("21702051851422978291/27670116110564327424");
        const Rational a10r = Rs("-99829438516545753655/55340232221128654848");
        v[0] = {with({"c7", "c8"}),
                13,
                12,
                {0, 1, 2, 3, 4, 6, 9, 11},
                {{5, {{7, R(-3, 4)}}}, {8, {{12, a8r}}}, {10, {{12, a10r}}}},
                "c9",
                ConstTag::One,
                PiLinear(R(-1, 24) * a8r)};
        v[1] = {with({"c7"}),
                12,
                11,
                {0, 1, 2, 3, 4, 6, 8, 10},
                {{5, {{11, R(165, 256)}, {7, R(-3, 4)}}}, {9, {{11, R(-61, 32)}}}},
                "c8",
                ConstTag::A1t,
                PiLinear(R(-55, 176))};
        v[2] = {base,
                11,
                10,
                {0, 1, 2, 3, 4, 9},
                {{5, {{7, R(-3, 4)}}}, {6, {{10, R(8, 7)}}}, {8, {{10, R(-16, 7)}}}},
                "c7",
                ConstTag::A0t,
                PiLinear(R(-8, 35))};
        return v;
    }();
    if (id < 1 || id > 3) throw std::invalid_argument("case must be 1, 2 or 3");
    return cases[id - 1];
}

std::vector<std::vector<PiLinear>> rows_for(const std::vector<std::string>& names, int n_vars) {
    std::vector<std::vector<PiLinear>> rows;
    for (const auto& n : names) {
        const auto& f = lienard_form(n);
        rows.emplace_back(f.coeff.begin(), f.coeff.begin() + n_vars);
    }
    return rows;
}

std::string relation_string(const std::map<int, Rational>& rel) {
    if (rel.empty()) return "0";
    std::string s;
    for (const auto& [f, c] : rel) {
        if (!s.empty()) s += " + ";
        s += to_string(c) + "*a_" + std::to_string(f);
    }
    return s;
}

} // namespace

LienardParams LienardParams::from_vector(const std::vector<Rational>& v) {
    if (v.size() > 13) throw std::invalid_argument("at most 13 coefficients a_0..a_12");
    LienardParams p;
    for (size_t j = 0; j < v.size(); ++j) p.a[j] = v[j];
    return p;
}

PerturbationPoly LienardParams::perturbation() const { return lienard_perturbation({a.begin(), a.end()}); }

std::string to_string(ConstTag t) {
    switch (t) {
    case ConstTag::One: return "1";
    case ConstTag::A0t: return "A~0";
    case ConstTag::A1t: return "A~1";
    case ConstTag::A3t: return "A~3";
    case ConstTag::A4t: return "A~4";
    }
    return "?";
}

Real tag_value(ConstTag t, const UniversalConstants& k) {
    switch (t) {
    case ConstTag::One: return Real(1);
    case ConstTag::A0t: return k.A0t;
    case ConstTag::A1t: return k.A1t;
    case ConstTag::A3t: return k.A3t;
    case ConstTag::A4t: return k.A4t;
    }
    return Real(0);
}

PiLinear CoefficientForm::inner(const LienardParams& p) const {
    PiLinear s;
    for (int j = 0; j < 13; ++j) {
        PiLinear t = coeff[j];
        t *= p.a[j];
        s += t;
    }
    return s;
}

Real CoefficientForm::value(const LienardParams& p, const UniversalConstants& k) const {
    return real_sqrt2() * tag_value(tag, k) * inner(p).value();
}

bool CoefficientForm::is_zero() const {
    for (const auto& c : coeff)
        if (!c.is_zero()) return false;
    return true;
}

PiLinear beta_sqrt(int m) {
    if (m < 0) throw std::invalid_argument("negative power");
    if (m == 0) return PiLinear(0, R(1, 4));
    if (m == 1) return PiLinear(R(1, 3));
    PiLinear v = beta_sqrt(m - 2);
    v *= R(m - 1, m + 2);
    return v;
}

PiLinear beta_inv_sqrt(int m) {
    if (m < 0) throw std::invalid_argument("negative power");
    if (m == 0) return PiLinear(0, R(1, 2));
    if (m == 1) return PiLinear(R(1));
    PiLinear v = beta_inv_sqrt(m - 2);
    v *= R(m - 1, m);
    return v;
}

ClosedFormIntegrals closed_form_integrals() {
    ClosedFormIntegrals c;
    for (int j = 0; j <= 12; ++j) {
        // y = sqrt2 x^3 sqrt(1-x^2) on both lobes (negative for x < 0)
        PiLinear i1 = beta_sqrt(j + 3);
        i1 *= R(2);
        c.I1[j] = i1;
        PiLinear i2 = i1;
        if ((j + 3) % 2 == 1) i2 = -i2;
        c.I2[j] = i2;
        if (j >= 3) {
            c.F[j] = beta_inv_sqrt(j - 3);
            c.Ft[j] = (j - 3) % 2 == 1 ? -c.F[j] : c.F[j];
        }
    }
    return c;
}

const std::vector<CoefficientForm>& lienard_coefficients() {
    static const std::vector<CoefficientForm> forms = [] {
        const ClosedFormIntegrals ci = closed_form_integrals();
        std::vector<CoefficientForm> v;
        // c_0 = -sum a_j I_1j, c~_0 = -sum a_j I_2j, c_41 = -sqrt2 sum a_j F_j, c~_41 likewise
        auto from = [&](const std::string& name, const std::array<PiLinear, 13>& t) {
            CoefficientForm f;
            f.name = name;
            for (int j = 0; j < 13; ++j) f.coeff[j] = -t[j];
            v.push_back(f);
        };
        from("c0", ci.I1);
        from("c0t", ci.I2);
        from("c41", ci.F);
        from("c41t", ci.Ft);
        v.push_back(make_form("c1", ConstTag::A0t, R(-2), {{0, R(1), R(0)}}));
        v.push_back(make_form("c2", ConstTag::A1t, R(-2), {{1, R(1), R(0)}}));
        v.push_back(make_form("c3", ConstTag::One, R(1, 12), {{0, R(1), R(0)}, {2, R(2), R(0)}}));
        v.push_back(make_form("c5", ConstTag::A3t, R(-2, 3), {{1, R(2), R(0)}, {3, R(3), R(0)}}));
        v.push_back(make_form("c6", ConstTag::A4t, R(-1),
                              {{0, R(55, 36), R(0)}, {2, R(5, 3), R(0)}, {4, R(2), R(0)}}));
        v.push_back(make_form("c7", ConstTag::A0t, R(-1, 10),
                              {{0, R(1729, 648), R(0)}, {2, R(91, 36), R(0)}, {4, R(7, 3), R(0)}, {6, R(2), R(0)}}));
        v.push_back(make_form("c8", ConstTag::A1t, R(-4, 11),
                              {{1, R(140, 81), R(0)}, {3, R(14, 9), R(0)}, {5, R(4, 3), R(0)}, {7, R(1), R(0)}}));
        v.push_back(make_form("c9", ConstTag::One, R(-1, 48),
                              {{0, R(315, 64), R(0)},
                               {2, R(35, 8), R(0)},
                               {4, R(15, 4), R(0)},
                               {6, R(3), R(0)},
                               {8, R(2), R(0)}}));
        return v;
    }();
    return forms;
}

const CoefficientForm& lienard_form(const std::string& name) {
    for (const auto& f : lienard_coefficients())
        if (f.name == name) return f;
    throw std::invalid_argument("unknown coefficient form: " + name);
}

MelnikovExpansion lienard_expansion(const LienardParams& p, const UniversalConstants& k) {
    auto v = [&](const char* name) { return lienard_form(name).value(p, k); };
    const std::array<Real, 10> c = {v("c0"), v("c1"), v("c2"), v("c3"), v("c41"),
                                    v("c5"), v("c6"), v("c7"), v("c8"), v("c9")};
    const Real c41t = -v("c41t");
    return MelnikovExpansion::from_inner(c, -v("c0t"), c41t, c[4] + c41t, k);
}

const std::vector<CoefficientForm>& printed_bracket_forms() {
    static const std::vector<CoefficientForm> forms = [] {
        const Rational z(0);
        // c_0 = -2 sqrt2 [...]
        const std::vector<Entry> c0 = {{12, R(2048, 109395), z}, {11, z, R(429, 65536)}, {10, R(1024, 45045), z},
                                       {9, z, R(33, 4096)},      {8, R(256, 9009), z},    {0, R(2, 15), z},
                                       {7, z, R(21, 2048)},      {6, R(128, 3465), z},    {5, z, R(7, 512)},
                                       {4, R(16, 315), z},       {3, z, R(5, 256)},       {2, R(8, 105), z},
                                       {1, z, R(1, 32)}};
        const std::vector<Entry> c0t = {{12, R(-2048, 109395), z}, {11, z, R(429, 65536)}, {10, R(-1024, 45045), z},
                                        {9, z, R(33, 4096)},       {8, R(-256, 9009), z},   {0, R(-2, 15), z},
                                        {7, z, R(21, 2048)},       {6, R(-128, 3465), z},   {5, z, R(7, 512)},
                                        {4, R(-16, 315), z},       {3, z, R(5, 256)},       {2, R(-8, 105), z},
                                        {1, z, R(1, 32)}};
        // c_41 = -sqrt2 [...]
        const std::vector<Entry> c41 = {{12, R(128, 315), z}, {11, z, R(35, 256)}, {10, R(16, 35), z},
                                        {9, z, R(5, 32)},     {8, R(8, 15), z},    {7, z, R(3, 16)},
                                        {6, R(2, 3), z},      {5, z, R(1, 4)},     {4, R(1), z},
                                        {3, z, R(1, 2)}};
        const std::vector<Entry> c41t = {{12, R(-128, 315), z}, {11, z, R(35, 256)}, {10, R(-16, 35), z},
                                         {9, z, R(5, 32)},      {8, R(-8, 15), z},   {7, z, R(3, 16)},
                                         {6, R(-2, 3), z},      {5, z, R(1, 4)},     {4, R(-1), z},
                                         {3, z, R(1, 2)}};
        return std::vector<CoefficientForm>{make_form("c0", ConstTag::One, R(-2), c0),
                                            make_form("c0t", ConstTag::One, R(-2), c0t),
                                            make_form("c41", ConstTag::One, R(-1), c41),
                                            make_form("c41t", ConstTag::One, R(-1), c41t)};
    }();
    return forms;
}

std::vector<BracketEntry> compare_printed_brackets() {
    std::vector<BracketEntry> out;
    for (const auto& p : printed_bracket_forms()) {
        const auto& c = lienard_form(p.name);
        for (int j = 0; j < 13; ++j) out.push_back({p.name, j, p.coeff[j], c.coeff[j]});
    }
    return out;
}

bool CaseSolution::all_printed_match() const {
    for (const auto& c : checks)
        if (!c.match) return false;
    return true;
}

LienardParams CaseSolution::instantiate(const std::map<int, Rational>& free_values) const {
    LienardParams p;
    for (const auto& [f, v] : free_values) p.a[f] = v;
    for (const auto& [i, rel] : relation) {
        Rational s(0);
        for (const auto& [f, c] : rel) {
            auto it = free_values.find(f);
            if (it != free_values.end()) s += c * it->second;
        }
        p.a[i] = s;
    }
    return p;
}

CaseSolution solve_case(int id) {
    const PrintedCase& pc = printed_case(id);
    CaseSolution s;
    s.id = id;
    s.vanishing = pc.vanishing;
    s.n_vars = pc.n_vars;
    s.leading = pc.leading;
    s.certificate = pc.certificate;

    const auto rows = rows_for(pc.vanishing, pc.n_vars);
    const RationalMatrix split = pi_split(rows);
    const LinearSolution sol = linear_solve_rational(split, std::vector<Rational>(split.rows(), Rational(0)));
    s.rank = rank_over_q_pi(rows);
    s.split_consistent = s.rank == sol.rank;
    if (!sol.particular) throw std::logic_error("homogeneous system reported inconsistent");

    std::vector<bool> is_pivot(pc.n_vars, false);
    for (auto c : sol.pivot_columns) is_pivot[c] = true;
    for (int f = 0; f < pc.n_vars; ++f)
        if (!is_pivot[f]) s.free_vars.push_back(f);
    for (int i = 0; i < pc.n_vars; ++i) {
        if (!is_pivot[i]) continue;
        std::map<int, Rational> rel;
        for (size_t k = 0; k < s.free_vars.size(); ++k) {
            const Rational& c = sol.nullspace[k][i];
            if (sgn(c) != 0) rel[s.free_vars[k]] = c;
        }
        s.relation[i] = rel;
    }

    // certificate form on the solution space
    const auto& cert = lienard_form(pc.certificate);
    s.certificate_tag = cert.tag;
    for (size_t k = 0; k < s.free_vars.size(); ++k) {
        PiLinear v;
        for (int j = 0; j < pc.n_vars; ++j) {
            PiLinear t = cert.coeff[j];
            t *= sol.nullspace[k][j];
            v += t;
        }
        if (!v.is_zero()) s.certificate_coeff[s.free_vars[k]] = v;
    }

    // comparison with the printed description
    auto rel_of = [&](int i) -> std::map<int, Rational> {
        auto it = s.relation.find(i);
        if (it != s.relation.end()) return it->second;
        return {{i, Rational(1)}};  // free variable
    };
    for (int i : pc.zeros) {
        const auto r = rel_of(i);
        s.checks.push_back({"a_" + std::to_string(i), "0", relation_string(r), r.empty()});
    }
    for (const auto& [i, printed] : pc.relations) {
        const auto r = rel_of(i);
        s.checks.push_back({"a_" + std::to_string(i), relation_string(printed), relation_string(r), r == printed});
    }
    {
        PrintedCheck c;
        c.what = pc.certificate + " / (sqrt2*" + to_string(pc.tag) + "*a_" + std::to_string(pc.leading) + ")";
        c.printed = pc.certificate_coeff.to_string();
        auto it = s.certificate_coeff.find(pc.leading);
        const PiLinear got = it == s.certificate_coeff.end() ? PiLinear() : it->second;
        c.computed = got.to_string();
        c.match = pc.tag == cert.tag && got.rational == pc.certificate_coeff.rational &&
                  got.pi == pc.certificate_coeff.pi && s.certificate_coeff.size() == 1;
        s.checks.push_back(c);
    }
    return s;
}

size_t jacobian_rank(int id) {
    const PrintedCase& pc = printed_case(id);
    return rank_over_q_pi(rows_for(pc.vanishing, pc.n_vars));
}

int case_chain_length(int id) {
    if (id < 1 || id > 3) throw std::invalid_argument("case must be 1, 2 or 3");
    return 10 - id;
}

int limit_cycle_count(int l) {
    if (l == 8 || l == 9) return 2 * l - 2;
    if (l == 6 || l == 7) return 2 * l - 1;
    throw std::invalid_argument("l must be 6..9");
}

} // namespace nilmel
