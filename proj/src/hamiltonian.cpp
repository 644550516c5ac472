#include "nilmel/hamiltonian.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>

#include "json.hpp"

namespace nilmel {

// ---------------------------------------------------------------- model

void HamiltonianModel::set(int i, int j, const Rational& c) {
    if (i < 0 || j < 0) throw ExactError("negative exponent in H");
    if (i + j < 3) throw ExactError("H terms need i + j >= 3 (the 1/2 y^2 term is implicit)");
    if (degree_bound_ > 0 && i + j > degree_bound_) throw ExactError("term exceeds degree_bound");
    if (sgn(c) == 0)
        hij_.erase({i, j});
    else
        hij_[{i, j}] = c;
}

Rational HamiltonianModel::coeff(int i, int j) const {
    auto it = hij_.find({i, j});
    return it == hij_.end() ? Rational(0) : it->second;
}

int HamiltonianModel::degree() const {
    int d = 2;
    for (const auto& [ij, c] : hij_) d = std::max(d, ij.first + ij.second);
    return d;
}

void HamiltonianModel::set_degree_bound(int d) {
    if (d < degree()) throw ExactError("degree_bound below the degree of H");
    degree_bound_ = d;
}

BivariatePoly<Rational> HamiltonianModel::polynomial() const {
    BivariatePoly<Rational> p;
    p.add(0, 2, Rational(1, 2));
    for (const auto& [ij, c] : hij_) p.add(ij.first, ij.second, c);
    return p;
}

Real HamiltonianModel::partial(const Real& x, const Real& y, int px, int py) const {
    Real sum = 0;
    auto term = [&](int i, int j, const Real& c) {
        if (i < px || j < py) return;
        Real f = c;
        for (int k = 0; k < px; ++k) f *= (i - k);
        for (int k = 0; k < py; ++k) f *= (j - k);
        if (i - px > 0) f *= pow(x, i - px);
        if (j - py > 0) f *= pow(y, j - py);
        sum += f;
    };
    term(0, 2, Real(0.5));
    for (const auto& [ij, c] : hij_) term(ij.first, ij.second, to_real(c));
    return sum;
}

Real HamiltonianModel::value(const Real& x, const Real& y) const { return partial(x, y, 0, 0); }
Real HamiltonianModel::dx(const Real& x, const Real& y) const { return partial(x, y, 1, 0); }
Real HamiltonianModel::dy(const Real& x, const Real& y) const { return partial(x, y, 0, 1); }
Real HamiltonianModel::dxx(const Real& x, const Real& y) const { return partial(x, y, 2, 0); }
Real HamiltonianModel::dxy(const Real& x, const Real& y) const { return partial(x, y, 1, 1); }
Real HamiltonianModel::dyy(const Real& x, const Real& y) const { return partial(x, y, 0, 2); }

bool HamiltonianModel::separable() const {
    for (const auto& [ij, c] : hij_)
        if (ij.second != 0) return false;
    return true;
}

std::string HamiltonianModel::to_json() const {
    nlohmann::ordered_json j;
    j["hij"] = nlohmann::ordered_json::array();
    for (const auto& [ij, c] : hij_)
        j["hij"].push_back({{"i", ij.first}, {"j", ij.second}, {"c", nilmel::to_string(c)}});
    j["degree_bound"] = degree_bound_ > 0 ? degree_bound_ : degree();
    return j.dump();
}

HamiltonianModel HamiltonianModel::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ExactError(std::string("hamiltonian json: ") + e.what());
    }
    if (!j.is_object()) throw ExactError("hamiltonian json: expected an object");
    for (const auto& [key, v] : j.items())
        if (key != "hij" && key != "degree_bound") throw ExactError("hamiltonian json: unknown key " + key);
    if (!j.contains("hij") || !j["hij"].is_array()) throw ExactError("hamiltonian json: hij must be an array");
    HamiltonianModel h;
    for (const auto& t : j["hij"]) {
        if (!t.is_object() || !t.contains("i") || !t.contains("j") || !t.contains("c"))
            throw ExactError("hamiltonian json: each term needs i, j, c");
        for (const auto& [key, v] : t.items())
            if (key != "i" && key != "j" && key != "c") throw ExactError("hamiltonian json: unknown term key " + key);
        if (!t["i"].is_number_integer() || !t["j"].is_number_integer() || !t["c"].is_string())
            throw ExactError("hamiltonian json: i, j are integers and c is a \"p/q\" string");
        const int i = t["i"].get<int>(), jj = t["j"].get<int>();
        if (sgn(h.coeff(i, jj)) != 0) throw ExactError("hamiltonian json: duplicate term");
        h.set(i, jj, parse_rational(t["c"].get<std::string>()));
    }
    if (j.contains("degree_bound")) {
        if (!j["degree_bound"].is_number_integer()) throw ExactError("hamiltonian json: degree_bound must be an integer");
        h.set_degree_bound(j["degree_bound"].get<int>());
    } else {
        h.set_degree_bound(h.degree());
    }
    return h;
}

HamiltonianModel HamiltonianModel::lienard() {
    HamiltonianModel h;
    h.set(6, 0, -1);
    h.set(8, 0, 1);
    h.set_degree_bound(8);
    return h;
}

std::string to_string(SaddleKind k) {
    switch (k) {
    case SaddleKind::CuspOrder1: return "cusp_order_1";
    case SaddleKind::NilpotentCenterOrder1: return "nilpotent_center_order_1";
    case SaddleKind::NilpotentSaddleOrder1: return "nilpotent_saddle_order_1";
    case SaddleKind::CuspOrder2: return "cusp_order_2";
    case SaddleKind::NilpotentSaddleOrder2: return "nilpotent_saddle_order_2";
    case SaddleKind::Other: return "other";
    }
    return "other";
}

Rational HSeriesCoefficients::at(int j) const {
    if (j < 0 || j > order()) throw ExactError("h_j index outside the computed order");
    return hj[static_cast<size_t>(j)];
}

HSeriesCoefficients h_series(const HamiltonianModel& h, int order) {
    if (order < 3 || order > kMaxSeriesOrder) throw ExactError("h_series order out of range");
    const auto poly = h.polynomial();
    const auto phi = series_newton(poly.derivative_y(), order + 1);
    const auto hx = poly.compose(phi);
    HSeriesCoefficients out;
    out.hj = hx.coefficients();
    return out;
}

SaddleClass classify_origin(const HamiltonianModel& h) {
    const auto hs = h_series(h, 14);
    SaddleClass c;
    for (int j = 3; j <= hs.order(); ++j)
        if (sgn(hs.at(j)) != 0) {
            c.k = j;
            c.hk = hs.at(j);
            break;
        }
    switch (c.k) {
    case 3: c.kind = SaddleKind::CuspOrder1; break;
    case 4: c.kind = sgn(c.hk) > 0 ? SaddleKind::NilpotentCenterOrder1 : SaddleKind::NilpotentSaddleOrder1; break;
    case 5: c.kind = SaddleKind::CuspOrder2; break;
    case 6: c.kind = sgn(c.hk) < 0 ? SaddleKind::NilpotentSaddleOrder2 : SaddleKind::Other; break;
    default: c.kind = SaddleKind::Other; break;
    }
    return c;
}

// ---------------------------------------------------------------- formula bank

const char* const kFormulaBankDigest = "d02e40c8a26bfe4d3282c9f7bc5f119d5553a25af49ff9a7f0a57fe5b6a366b3";

std::string default_data_dir() {
    if (const char* env = std::getenv("NILMEL_DATA_DIR")) return env;
    return NILMEL_DATA_DIR;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ExactError("cannot open " + path);
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw ExactError("sha256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

std::string BankTerm::to_string() const {
    std::string s = nilmel::to_string(coeff);
    if (s.find('/') == std::string::npos) s += "/1";
    for (const auto& [sym, pw] : factors) {
        s += ' ' + sym;
        if (pw != 1) s += '^' + std::to_string(pw);
    }
    return s;
}

BankTerm parse_bank_term(const std::string& text) {
    std::istringstream in(text);
    std::string tok;
    BankTerm t;
    if (!(in >> tok)) throw ExactError("empty bank term");
    t.coeff = parse_rational(tok);
    while (in >> tok) {
        const auto caret = tok.find('^');
        if (caret == std::string::npos) {
            t.factors.emplace_back(tok, 1);
        } else {
            t.factors.emplace_back(tok.substr(0, caret), std::stoi(tok.substr(caret + 1)));
        }
    }
    return t;
}

FormulaBank FormulaBank::load(const std::string& bank_path, const std::string& errata_path, bool verify) {
    FormulaBank b;
    b.digest_ = sha256_file(bank_path);
    if (verify && b.digest_ != kFormulaBankDigest)
        throw ExactError("formula bank digest mismatch: " + b.digest_);
    std::ifstream in(bank_path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto sp = line.find(' ');
        if (sp == std::string::npos) throw ExactError("bad bank line: " + line);
        const std::string target = line.substr(0, sp);
        if (!b.table_.count(target)) b.order_.push_back(target);
        b.table_[target].push_back(parse_bank_term(line.substr(sp + 1)));
    }
    if (!errata_path.empty()) {
        std::ifstream ein(errata_path);
        if (!ein) throw ExactError("cannot open " + errata_path);
        while (std::getline(ein, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::vector<std::string> f;
            std::stringstream ss(line);
            std::string part;
            while (std::getline(ss, part, '|')) f.push_back(part);
            if (f.size() != 5) throw ExactError("bad errata line: " + line);
            Erratum e{f[0], f[1], parse_bank_term(f[2]), {}, f[4]};
            std::stringstream rs(f[3]);
            while (std::getline(rs, part, ';'))
                if (!part.empty()) e.reading.push_back(parse_bank_term(part));
            b.errata_.push_back(std::move(e));
        }
    }
    return b;
}

const FormulaBank& FormulaBank::builtin() {
    static std::once_flag once;
    static FormulaBank bank;
    std::call_once(once, [] {
        const auto dir = default_data_dir();
        bank = load(dir + "/formula_bank.txt", dir + "/errata.txt");
    });
    return bank;
}

const std::vector<BankTerm>& FormulaBank::terms(const std::string& target) const {
    auto it = table_.find(target);
    if (it == table_.end()) throw ExactError("unknown bank target: " + target);
    return it->second;
}

std::vector<std::string> FormulaBank::targets() const { return order_; }

size_t FormulaBank::term_count() const {
    size_t n = 0;
    for (const auto& [k, v] : table_) n += v.size();
    return n;
}

FormulaBank FormulaBank::with_errata(const std::vector<std::string>& ids) const {
    FormulaBank b = *this;
    for (const auto& id : ids) {
        const Erratum* e = nullptr;
        for (const auto& x : errata_)
            if (x.id == id) e = &x;
        if (!e) throw ExactError("unknown erratum " + id);
        auto& tab = b.table_.at(e->target);
        auto it = std::find(tab.begin(), tab.end(), e->printed);
        if (it == tab.end()) throw ExactError("erratum " + id + ": printed term not in bank");
        tab.erase(it);
        tab.insert(tab.end(), e->reading.begin(), e->reading.end());
        b.applied_.push_back(id);
    }
    return b;
}

std::vector<std::string> FormulaBank::errata_ids_for(const std::string& target) const {
    std::vector<std::string> ids;
    for (const auto& e : errata_)
        if (e.target == target) ids.push_back(e.id);
    return ids;
}

// ---------------------------------------------------------------- chain

namespace {

bool parse_indexed(const std::string& s, const std::string& prefix, int& i, int& j) {
    if (s.rfind(prefix, 0) != 0) return false;
    const std::string rest = s.substr(prefix.size());
    const auto us = rest.find('_');
    if (us == std::string::npos || us == 0 || us + 1 == rest.size()) return false;
    for (size_t k = 0; k < rest.size(); ++k)
        if (k != us && !std::isdigit(static_cast<unsigned char>(rest[k]))) return false;
    i = std::stoi(rest.substr(0, us));
    j = std::stoi(rest.substr(us + 1));
    return true;
}

// "h7", "h12": series coefficient names
bool parse_hk(const std::string& s, int& k) {
    if (s.size() < 2 || s[0] != 'h') return false;
    for (size_t i = 1; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    k = std::stoi(s.substr(1));
    return true;
}

} // namespace

const std::vector<std::string>& AlphaInputs::names() {
    static const std::vector<std::string> n = [] {
        std::vector<std::string> v;
        for (int l = 0; l <= 5; ++l) v.push_back("alpha_" + std::to_string(l) + "_0");
        v.push_back("alpha_0_1");
        v.push_back("alpha_1_1");
        for (int i = 0; i <= 5; ++i) v.push_back("abar_" + std::to_string(i) + "_1");
        for (int i = 0; i <= 5; ++i) v.push_back("bbar_" + std::to_string(i) + "_0");
        for (const char* s : {"abar_0_2", "abar_1_2", "abar_0_3", "abar_1_3", "bbar_0_1", "bbar_1_1", "bbar_0_2", "bbar_1_2"})
            v.push_back(s);
        return v;
    }();
    return n;
}

bool AlphaInputs::is_input_name(const std::string& name) {
    const auto& n = names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

void AlphaInputs::set(const std::string& name, const AlgebraicElement& v) {
    if (!is_input_name(name)) throw ExactError("not an external chain input: " + name);
    values[name] = v;
}

std::optional<AlgebraicElement> AlphaInputs::get(const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end()) return std::nullopt;
    return it->second;
}

Rational eval_appendix_hj(const HamiltonianModel& h, int j, bool printed_only) {
    if (j < 10 || j > 14) throw ExactError("bank h_j is available for j = 10..14");
    const FormulaBank& base = FormulaBank::builtin();
    const std::string target = "h" + std::to_string(j);
    FormulaBank::Leaf<Rational> leaf = [&](const std::string& s) -> std::optional<Rational> {
        int a, b;
        if (parse_indexed(s, "h_", a, b)) return h.coeff(a, b);
        return std::nullopt;
    };
    if (printed_only) return base.evaluate<Rational>(target, leaf);
    return base.with_errata(base.errata_ids_for(target)).evaluate<Rational>(target, leaf);
}

ChainCoefficients mu_chain(const HSeriesCoefficients& hs, const Rational& h6) {
    if (sgn(h6) >= 0) throw ExactError("mu_chain needs h6 < 0");
    if (hs.order() < 14) throw ExactError("mu_chain needs h_j through j = 14");
    if (hs.at(6) != h6) throw ExactError("h6 does not match the series");
    for (int j = 3; j < 6; ++j)
        if (sgn(hs.at(j)) != 0) throw ExactError("mu_chain needs h3 = h4 = h5 = 0");
    const FormulaBank& bank = FormulaBank::builtin();
    const AlgebraicElement beta = AlgebraicElement::beta_power(1, h6);
    FormulaBank::Leaf<AlgebraicElement> leaf = [&](const std::string& s) -> std::optional<AlgebraicElement> {
        int k;
        if (s == "beta") return beta;
        if (parse_hk(s, k)) {
            AlgebraicElement v(hs.at(k));
            v.set_context(h6);
            return v;
        }
        return std::nullopt;
    };
    ChainCoefficients c;
    for (int k = 1; k <= 9; ++k) c.mu[k] = bank.evaluate<AlgebraicElement>("mu_" + std::to_string(k), leaf);
    for (int k = 1; k <= 8; ++k) c.mu_bar[k] = bank.evaluate<AlgebraicElement>("mubar_" + std::to_string(k), leaf);
    for (int k = 0; k <= 8; ++k) c.n_bar[k] = bank.evaluate<AlgebraicElement>("nbar_" + std::to_string(k), leaf);
    return c;
}

std::array<AlgebraicElement, 3> r_coefficients_closed(const HamiltonianModel& h, const std::array<Rational, 4>& sigma) {
    const auto cls = classify_origin(h);
    if (cls.kind != SaddleKind::NilpotentSaddleOrder2) throw ExactError("closed r forms need a nilpotent saddle of order 2");
    const auto hs = h_series(h, 8);
    const Rational h6 = hs.at(6), h7 = hs.at(7), h8 = hs.at(8);
    const Rational h12 = h.coeff(1, 2), h21 = h.coeff(2, 1), h03 = h.coeff(0, 3), h22 = h.coeff(2, 2);
    auto beta = [&](int k) { return AlgebraicElement::beta_power(k, h6); };
    const AlgebraicElement s2 = AlgebraicElement::sqrt2();
    const AlgebraicElement s0(sigma[0]), s1(sigma[1]), sg2(sigma[2]), s3(sigma[3]);

    std::array<AlgebraicElement, 3> r;
    r[0] = AlgebraicElement(2) * s2 * beta(-1) * s0;
    r[1] = AlgebraicElement(2) * s2 *
           ((AlgebraicElement(h7 / 3) * beta(-8) - AlgebraicElement(h12) * beta(-2)) * s0 + beta(-2) * s1);
    const Rational q = h6 * h6;
    const Rational k0 = 24 * q * h03 * h21 + 12 * q * h12 * h12 - 8 * q * h22 + 4 * h6 * h7 * h12 - 4 * h6 * h8 + 3 * h7 * h7;
    const Rational k1 = -8 * q * h12 - 4 * h6 * h7;
    const Rational k2 = -8 * q * h21;
    const Rational k3 = 8 * q;
    r[2] = AlgebraicElement(Rational(1, 4)) * s2 * beta(-15) *
           (AlgebraicElement(k0) * s0 + AlgebraicElement(k1) * s1 + AlgebraicElement(k2) * sg2 + AlgebraicElement(k3) * s3);
    for (auto& v : r) v.set_context(h6);
    return r;
}

AlgebraicElement eval_formula_bank(const FormulaBank& bank, const std::string& target, const ChainEnvironment& env) {
    std::optional<HSeriesCoefficients> hs;
    std::optional<Rational> h6;
    if (env.hamiltonian) {
        hs = h_series(*env.hamiltonian, 14);
        if (sgn(hs->at(6)) < 0) h6 = hs->at(6);
    }
    FormulaBank::Leaf<AlgebraicElement> leaf = [&](const std::string& s) -> std::optional<AlgebraicElement> {
        if (auto it = env.overrides.find(s); it != env.overrides.end()) return it->second;
        int i, j, k;
        if (s == "sqrt2") return AlgebraicElement::sqrt2();
        if (s == "beta") {
            if (!h6) throw MissingInput("beta (needs a Hamiltonian with h6 < 0)");
            return AlgebraicElement::beta_power(1, *h6);
        }
        if (parse_indexed(s, "h_", i, j)) {
            if (!env.hamiltonian) throw MissingInput(s);
            return AlgebraicElement(env.hamiltonian->coeff(i, j));
        }
        if (parse_hk(s, k)) {
            if (!hs) throw MissingInput(s);
            return AlgebraicElement(hs->at(k));
        }
        if (parse_indexed(s, "a_", i, j) || parse_indexed(s, "b_", i, j)) {
            if (!env.perturbation) throw MissingInput(s);
            return AlgebraicElement(s[0] == 'a' ? env.perturbation->a_coeff(i, j) : env.perturbation->b_coeff(i, j));
        }
        if (AlphaInputs::is_input_name(s)) {
            if (env.alpha)
                if (auto v = env.alpha->get(s)) return v;
            throw MissingInput(s + " (external chain input)");
        }
        return std::nullopt;
    };
    auto v = bank.evaluate<AlgebraicElement>(target, leaf);
    if (h6) v.set_context(*h6);
    return v;
}

SymbolicPoly eval_formula_bank_symbolic(const FormulaBank& bank, const std::string& target,
                                        const std::function<bool(const std::string&)>& keep) {
    FormulaBank::Leaf<SymbolicPoly> leaf = [&](const std::string& s) -> std::optional<SymbolicPoly> {
        if (keep(s)) return SymbolicPoly::variable(s);
        return std::nullopt;
    };
    return bank.evaluate<SymbolicPoly>(target, leaf);
}

} // namespace nilmel
