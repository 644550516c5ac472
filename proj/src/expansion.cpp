#include "nilmel/expansion.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

namespace nilmel {

namespace {

using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

Real frac_pow(const Real& a, int num, int den) { return pow(a, Real(num) / den); }

bool inner(Side s) { return s != Side::Outer; }

// (k, with log): |h|^(k/6) for k = 12, 13, ..., plus |h|^(k/6) ln|h| at integer powers from 3 on
std::vector<std::pair<int, bool>> remainder_columns(int terms) {
    std::vector<std::pair<int, bool>> out;
    for (int k = 12; k < 12 + terms; ++k) {
        out.push_back({k, false});
        if (k % 6 == 0 && k >= 18) out.push_back({k, true});
    }
    return out;
}

const Real& get(const ChainValues& chain, const std::string& name) {
    auto it = chain.values.find(name);
    if (it == chain.values.end()) throw MissingChainInput("missing chain value " + name);
    return it->second;
}

} // namespace

MelnikovExpansion MelnikovExpansion::from_inner(const std::array<Real, 10>& c, const Real& c0t, const Real& c4t,
                                                const Real& c3star, const UniversalConstants& k) {
    MelnikovExpansion e;
    e.c = c;
    e.c0t = c0t;
    e.c4t = c4t;
    e.constants = k;
    e.cstar = {c[0] + c0t, -k.D1 * c[1], c[3], c3star, -k.D2 * c[6], k.D1 * c[7], c[9]};
    return e;
}

std::vector<std::string> basis_names(Side side) {
    if (inner(side))
        return {"1", "|h|^(2/3)", "|h|^(5/6)", "h ln|h|", "h", "|h|^(7/6)", "|h|^(4/3)", "|h|^(5/3)", "|h|^(11/6)",
                "h^2 ln|h|"};
    return {"1", "h^(2/3)", "h ln h", "h", "h^(4/3)", "h^(5/3)", "h^2 ln h"};
}

std::vector<Real> basis_values(Side side, const Real& h) {
    const Real a = abs(h);
    const Real lg = log(a);
    if (inner(side))
        return {Real(1),          frac_pow(a, 2, 3), frac_pow(a, 5, 6), h * lg, h, frac_pow(a, 7, 6),
                frac_pow(a, 4, 3), frac_pow(a, 5, 3), frac_pow(a, 11, 6), h * h * lg};
    return {Real(1), frac_pow(a, 2, 3), h * lg, h, frac_pow(a, 4, 3), frac_pow(a, 5, 3), h * h * lg};
}

std::vector<Real> basis_coefficients(const MelnikovExpansion& e, Side side) {
    const auto& c = e.c;
    switch (side) {
    case Side::InnerRight: return {c.begin(), c.end()};
    case Side::InnerLeft: return {e.c0t, c[1], -c[2], c[3], e.c4t, -c[5], c[6], c[7], -c[8], c[9]};
    case Side::Outer: {
        const auto& s = e.cstar;
        return {s[0], 2 * s[1], 2 * s[2], s[3], 2 * s[4], 2 * s[5], 2 * s[6]};
    }
    }
    return {};
}

Real eval_expansion(const MelnikovExpansion& e, const Real& h, Side side) {
    const auto k = basis_coefficients(e, side);
    const auto b = basis_values(side, h);
    Real s = 0;
    for (size_t i = 0; i < k.size(); ++i) s += k[i] * b[i];
    return s;
}

std::vector<Real> geometric_grid(const Real& lo, const Real& hi, int n, Side side) {
    if (n < 2 || !(lo > 0) || !(hi > lo)) throw std::invalid_argument("grid needs n >= 2 and 0 < lo < hi");
    std::vector<Real> h(n);
    const Real step = log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) {
        const Real a = i == 0 ? lo : i == n - 1 ? hi : lo * exp(step * i);
        h[i] = inner(side) ? Real(-a) : a;
    }
    return h;
}

BasisSample sample_expansion(const MelnikovExpansion& e, Side side, const std::vector<Real>& h) {
    BasisSample s;
    s.side = side;
    s.h = h;
    for (const auto& v : h) s.M.push_back(eval_expansion(e, v, side));
    return s;
}

BasisSample sample_melnikov(const HamiltonianModel& H, const PerturbationPoly& pq, Side side,
                            const std::vector<Real>& h, const Real& tol) {
    BasisSample s;
    s.side = side;
    s.h = h;
    for (const auto& v : h) s.M.push_back(melnikov_value(H, v, side, pq, tol).value);
    return s;
}

FitResult fit_expansion(const BasisSample& s, const FitOptions& opt) {
    auto names = basis_names(s.side);
    if (opt.remainder_terms < 0) throw FitError("negative remainder_terms");
    const auto extra = remainder_columns(opt.remainder_terms);
    for (const auto& [k, lg] : extra)
        names.push_back("|h|^(" + std::to_string(k) + "/6)" + (lg ? " ln|h|" : ""));
    const size_t n = names.size();
    const size_t m = s.h.size();
    if (s.M.size() != m) throw FitError("h and M differ in length");
    if (m < 2 * n) throw FitError("need at least " + std::to_string(2 * n) + " samples");
    const bool up = s.h[1] > s.h[0];
    for (size_t i = 0; i < m; ++i) {
        if (inner(s.side) ? !(s.h[i] < 0) : !(s.h[i] > 0)) throw FitError("sample h has the wrong sign for the side");
        if (i > 0 && !(up ? s.h[i] > s.h[i - 1] : s.h[i] < s.h[i - 1]))
            throw FitError("sample h is not strictly monotone");
    }

    Matrix A(m, n);
    Vector b(m);
    for (size_t i = 0; i < m; ++i) {
        const auto row = basis_values(s.side, s.h[i]);
        for (size_t j = 0; j < row.size(); ++j) A(i, j) = row[j];
        const Real a = abs(s.h[i]);
        for (size_t k = 0; k < extra.size(); ++k) {
            A(i, row.size() + k) = frac_pow(a, extra[k].first, 6);
            if (extra[k].second) A(i, row.size() + k) *= log(a);
        }
        b(i) = s.M[i];
    }
    std::vector<Real> scale(n);
    for (size_t j = 0; j < n; ++j) {
        scale[j] = A.col(j).norm();
        A.col(j) /= scale[j];
    }

    Eigen::FullPivHouseholderQR<Matrix> qr(A);
    const Vector y = qr.solve(b);
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinV);
    const Vector sv = svd.singularValues();

    FitResult r;
    r.side = s.side;
    r.basis = names;
    r.condition = sv(0) / sv(n - 1);
    r.ill_conditioned = !(r.condition <= opt.condition_limit);
    r.residual_norm = (A * y - b).norm();
    // standard errors from s^2 (A^T A)^-1 = s^2 V S^-2 V^T
    const Real s2 = r.residual_norm * r.residual_norm / Real(m - n);
    const Matrix& V = svd.matrixV();
    for (size_t j = 0; j < n; ++j) {
        Real d = 0;
        for (size_t k = 0; k < n; ++k) d += V(j, k) * V(j, k) / (sv(k) * sv(k));
        r.coefficients.push_back(y(j) / scale[j]);
        r.stderrs.push_back(sqrt(s2 * d) / scale[j]);
    }
    return r;
}

AssembledExpansion assemble_from_chain(const ChainValues& chain, const UniversalConstants& k,
                                       const LoopIntegrals& loops) {
    std::array<Real, 10> c;
    c[0] = loops.c0;
    c[1] = k.A0t * get(chain, "rt00");
    c[2] = k.A1t * get(chain, "rt10");
    c[3] = -get(chain, "rt20") / 12;
    c[4] = loops.c41;
    c[5] = k.A3t * get(chain, "rt30");
    c[6] = k.A4t * get(chain, "rt40");
    c[7] = -k.A0t * (Real(9) / 10 * get(chain, "rt01") - get(chain, "rt60") / 10);
    c[8] = -k.A1t * (Real(9) / 11 * get(chain, "rt11") - Real(2) / 11 * get(chain, "rt70"));
    c[9] = -(Real(3) / 4 * get(chain, "rt21") - get(chain, "rt80") / 4) / 12;

    AssembledExpansion out;
    out.expansion = MelnikovExpansion::from_inner(c, loops.c0t, loops.c41t, loops.c31s, k);
    const auto& s = out.expansion.cstar;
    const auto& v = chain.values;
    auto has = [&](std::initializer_list<const char*> names) {
        for (auto n : names)
            if (!v.count(n)) return false;
        return true;
    };
    if (has({"r1_01"})) out.star_check["c*1"] = {k.A0b * v.at("r1_01"), s[1]};
    if (has({"r1_11"})) out.star_check["c*2"] = {-v.at("r1_11") / 12, s[2]};
    if (has({"r1_21"})) out.star_check["c*4"] = {k.A2b * v.at("r1_21"), s[4]};
    if (has({"r1_03", "r1_31"}))
        out.star_check["c*5"] = {k.A0b * (Real(9) / 10 * v.at("r1_03") - v.at("r1_31") / 10), s[5]};
    if (has({"r1_13", "r1_41"}))
        out.star_check["c*6"] = {-(Real(3) / 4 * v.at("r1_13") - v.at("r1_41") / 4) / 12, s[6]};
    return out;
}

} // namespace nilmel
