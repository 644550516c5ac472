#include "nilmel/exact.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace nilmel {

// ---------------------------------------------------------------- Rational

Rational parse_rational(const std::string& text) {
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
    if (t.empty()) throw ExactError("empty rational");
    if (t[0] == '+') t.erase(0, 1);
    const auto slash = t.find('/');
    auto valid_int = [](const std::string& s) {
        size_t i = (!s.empty() && s[0] == '-') ? 1 : 0;
        if (i >= s.size()) return false;
        for (; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        return true;
    };
    Rational r;
    if (slash == std::string::npos) {
        if (!valid_int(t)) throw ExactError("bad rational: " + text);
        r = Rational(mpz_class(t));
    } else {
        const auto num = t.substr(0, slash);
        const auto den = t.substr(slash + 1);
        if (!valid_int(num) || !valid_int(den) || den[0] == '-') throw ExactError("bad rational: " + text);
        mpz_class d(den);
        if (d == 0) throw ExactError("zero denominator: " + text);
        r = Rational(mpz_class(num), d);
    }
    r.canonicalize();
    return r;
}

std::string to_string(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Real to_real(const Rational& r) {
    Real num(r.get_num().get_str());
    Real den(r.get_den().get_str());
    return num / den;
}

// ---------------------------------------------------------------- PiLinear

PiLinear& PiLinear::operator+=(const PiLinear& o) {
    rational += o.rational;
    pi += o.pi;
    return *this;
}
PiLinear& PiLinear::operator-=(const PiLinear& o) {
    rational -= o.rational;
    pi -= o.pi;
    return *this;
}
PiLinear& PiLinear::operator*=(const Rational& s) {
    rational *= s;
    pi *= s;
    return *this;
}
PiLinear operator+(PiLinear a, const PiLinear& b) { return a += b; }
PiLinear operator-(PiLinear a, const PiLinear& b) { return a -= b; }
PiLinear operator*(PiLinear a, const Rational& s) { return a *= s; }
PiLinear operator*(const Rational& s, PiLinear a) { return a *= s; }
PiLinear operator*(const PiLinear& a, const PiLinear& b) {
    if (sgn(a.pi) != 0 && sgn(b.pi) != 0) throw ExactError("pi*pi is outside Q + Q*pi");
    return {a.rational * b.rational, a.rational * b.pi + a.pi * b.rational};
}
bool operator==(const PiLinear& a, const PiLinear& b) { return a.rational == b.rational && a.pi == b.pi; }

Real PiLinear::value() const { return to_real(rational) + to_real(pi) * real_pi(); }

std::string PiLinear::to_string() const {
    return nilmel::to_string(rational) + " + " + nilmel::to_string(pi) + "*pi";
}

PiLinear parse_pi_linear(const std::string& text) {
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) t.push_back(ch);
    const auto star = t.find("*pi");
    if (star == std::string::npos) return {parse_rational(t), 0};
    // the pi coefficient starts after the last sign that is not part of "a/-b"
    size_t split = std::string::npos;
    for (size_t i = star; i-- > 1;)
        if ((t[i] == '+' || t[i] == '-') && t[i - 1] != '/') {
            split = i;
            break;
        }
    if (split == std::string::npos) return {0, parse_rational(t.substr(0, star))};
    Rational pi_part = parse_rational(t.substr(split, star - split));
    size_t end = split;
    if (t[split - 1] == '+' || t[split - 1] == '-') {
        // "a + -b*pi" or "a - -b*pi"
        end = split - 1;
        if (t[end] == '-') pi_part = -pi_part;
    }
    return {parse_rational(t.substr(0, end)), pi_part};
}

// ---------------------------------------------------------------- AlgebraicElement

AlgebraicElement::AlgebraicElement() = default;

AlgebraicElement::AlgebraicElement(const Rational& r) { c_[0] = r; }

AlgebraicElement AlgebraicElement::sqrt2() {
    AlgebraicElement e;
    e.c_[index(1, 0)] = 1;
    return e;
}

AlgebraicElement AlgebraicElement::beta_power(int k, const Rational& h6) {
    if (sgn(h6) == 0) throw ExactError("beta needs h6 != 0");
    // beta^6 = -h6, so beta^(6q + r) = (-h6)^q beta^r
    int q = k >= 0 ? k / kBetaDegree : -((-k + kBetaDegree - 1) / kBetaDegree);
    int r = k - q * kBetaDegree;
    Rational m = -h6;
    m.canonicalize();
    Rational f = 1;
    for (int i = 0; i < std::abs(q); ++i) f *= m;
    if (q < 0) f = Rational(1) / f;
    AlgebraicElement e;
    e.set_context(h6);
    e.c_[index(0, r)] = f;
    return e;
}

const Rational& AlgebraicElement::h6() const {
    if (!ctx_) throw ExactError("algebraic element has no h6 context");
    return h6_;
}

void AlgebraicElement::set_context(const Rational& h6) {
    if (sgn(h6) == 0) throw ExactError("beta needs h6 != 0");
    Rational v = h6;
    v.canonicalize();
    if (ctx_ && h6_ != v) throw ExactError("h6 context mismatch");
    ctx_ = true;
    h6_ = v;
}

void AlgebraicElement::unify(const AlgebraicElement& o) {
    if (!o.ctx_) return;
    if (ctx_ && h6_ != o.h6_) throw ExactError("h6 context mismatch");
    ctx_ = true;
    h6_ = o.h6_;
}

bool AlgebraicElement::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Rational& v) { return sgn(v) == 0; });
}

std::optional<Rational> AlgebraicElement::as_rational() const {
    for (int i = 1; i < kDim; ++i)
        if (sgn(c_[i]) != 0) return std::nullopt;
    return c_[0];
}

AlgebraicElement AlgebraicElement::operator-() const {
    AlgebraicElement r = *this;
    for (auto& v : r.c_) v = -v;
    return r;
}

AlgebraicElement& AlgebraicElement::operator+=(const AlgebraicElement& o) {
    unify(o);
    for (int i = 0; i < kDim; ++i) c_[i] += o.c_[i];
    return *this;
}

AlgebraicElement& AlgebraicElement::operator-=(const AlgebraicElement& o) {
    unify(o);
    for (int i = 0; i < kDim; ++i) c_[i] -= o.c_[i];
    return *this;
}

AlgebraicElement& AlgebraicElement::operator*=(const AlgebraicElement& o) {
    unify(o);
    std::array<Rational, kDim> out;
    const Rational m = ctx_ ? Rational(-h6_) : Rational(0);
    for (int s1 = 0; s1 < 2; ++s1)
        for (int k1 = 0; k1 < kBetaDegree; ++k1) {
            const Rational& a = c_[index(s1, k1)];
            if (sgn(a) == 0) continue;
            for (int s2 = 0; s2 < 2; ++s2)
                for (int k2 = 0; k2 < kBetaDegree; ++k2) {
                    const Rational& b = o.c_[index(s2, k2)];
                    if (sgn(b) == 0) continue;
                    Rational t = a * b;
                    int s = s1 + s2;
                    if (s == 2) {
                        t *= 2;
                        s = 0;
                    }
                    int k = k1 + k2;
                    if (k >= kBetaDegree) {
                        if (!ctx_) throw ExactError("beta power without h6 context");
                        t *= m;
                        k -= kBetaDegree;
                    }
                    out[index(s, k)] += t;
                }
        }
    c_ = out;
    return *this;
}

AlgebraicElement operator+(AlgebraicElement a, const AlgebraicElement& b) { return a += b; }
AlgebraicElement operator-(AlgebraicElement a, const AlgebraicElement& b) { return a -= b; }
AlgebraicElement operator*(AlgebraicElement a, const AlgebraicElement& b) { return a *= b; }

bool operator==(const AlgebraicElement& a, const AlgebraicElement& b) {
    if (a.ctx_ && b.ctx_ && a.h6_ != b.h6_) return false;
    return a.c_ == b.c_;
}

AlgebraicElement AlgebraicElement::inverse() const {
    if (auto r = as_rational()) {
        AlgebraicElement e(inverse_of(*r));
        if (ctx_) e.set_context(h6_);
        return e;
    }
    // column j of the multiplication matrix is (*this) * basis_j
    RationalMatrix m(kDim, kDim);
    for (int j = 0; j < kDim; ++j) {
        AlgebraicElement basis;
        basis.ctx_ = ctx_;
        basis.h6_ = h6_;
        basis.c_[j] = 1;
        AlgebraicElement col = *this * basis;
        for (int i = 0; i < kDim; ++i) m(i, j) = col.c_[i];
    }
    std::vector<Rational> rhs(kDim);
    rhs[0] = 1;
    auto sol = linear_solve_rational(m, rhs);
    if (!sol.particular || sol.rank != static_cast<size_t>(kDim)) throw ExactError("zero divisor has no inverse");
    AlgebraicElement inv;
    inv.ctx_ = ctx_;
    inv.h6_ = h6_;
    for (int i = 0; i < kDim; ++i) inv.c_[i] = (*sol.particular)[i];
    return inv;
}

AlgebraicElement AlgebraicElement::pow(int n) const {
    AlgebraicElement base = n < 0 ? inverse() : *this;
    unsigned e = static_cast<unsigned>(n < 0 ? -n : n);
    AlgebraicElement r(1);
    if (ctx_) r.set_context(h6_);
    while (e) {
        if (e & 1u) r *= base;
        e >>= 1u;
        if (e) base *= base;
    }
    return r;
}

Real AlgebraicElement::to_real() const {
    Real sum = 0;
    Real beta = 1;
    bool need_beta = false;
    for (int s = 0; s < 2; ++s)
        for (int k = 1; k < kBetaDegree; ++k)
            if (sgn(c_[index(s, k)]) != 0) need_beta = true;
    if (need_beta) {
        if (!ctx_ || sgn(h6_) >= 0) throw ExactError("real embedding needs h6 < 0");
        beta = boost::multiprecision::pow(nilmel::to_real(Rational(-h6_)), Real(1) / 6);
    }
    const Real r2 = real_sqrt2();
    for (int s = 0; s < 2; ++s) {
        Real bk = 1;
        for (int k = 0; k < kBetaDegree; ++k) {
            if (sgn(c_[index(s, k)]) != 0) sum += nilmel::to_real(c_[index(s, k)]) * bk * (s ? r2 : Real(1));
            bk *= beta;
        }
    }
    return sum;
}

std::string AlgebraicElement::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (int s = 0; s < 2; ++s)
        for (int k = 0; k < kBetaDegree; ++k) {
            const auto& v = c_[index(s, k)];
            if (sgn(v) == 0) continue;
            if (!first) os << " + ";
            first = false;
            os << nilmel::to_string(v);
            if (s) os << "*sqrt2";
            if (k) os << "*beta^" << k;
        }
    if (first) os << "0/1";
    return os.str();
}

// ---------------------------------------------------------------- matrices

void RationalMatrix::append_row(const std::vector<Rational>& row) {
    if (rows_ == 0 && cols_ == 0) cols_ = row.size();
    if (row.size() != cols_) throw ExactError("row length mismatch");
    a_.insert(a_.end(), row.begin(), row.end());
    ++rows_;
}

namespace {

using IntMatrix = std::vector<std::vector<mpz_class>>;

IntMatrix clear_denominators(const RationalMatrix& m, size_t extra_cols, const std::vector<Rational>* b) {
    IntMatrix out(m.rows(), std::vector<mpz_class>(m.cols() + extra_cols));
    for (size_t i = 0; i < m.rows(); ++i) {
        mpz_class l = 1;
        for (size_t j = 0; j < m.cols(); ++j) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).get_den_mpz_t());
        if (b) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), (*b)[i].get_den_mpz_t());
        for (size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j).get_num() * (l / m(i, j).get_den());
        if (b) out[i][m.cols()] = (*b)[i].get_num() * (l / (*b)[i].get_den());
    }
    return out;
}

// Bareiss forward elimination; returns pivot columns, leaves `a` in echelon form.
std::vector<size_t> bareiss(IntMatrix& a, size_t ncols) {
    const size_t n = a.size();
    std::vector<size_t> pivots;
    mpz_class prev = 1;
    size_t row = 0;
    for (size_t col = 0; col < ncols && row < n; ++col) {
        // smallest nonzero magnitude keeps entries short
        size_t best = n;
        for (size_t i = row; i < n; ++i)
            if (sgn(a[i][col]) != 0 && (best == n || mpz_cmpabs(a[i][col].get_mpz_t(), a[best][col].get_mpz_t()) < 0)) best = i;
        if (best == n) continue;
        std::swap(a[row], a[best]);
        for (size_t i = row + 1; i < n; ++i) {
            for (size_t j = col + 1; j < a[i].size(); ++j) {
                mpz_class v = a[row][col] * a[i][j] - a[i][col] * a[row][j];
                mpz_divexact(a[i][j].get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
            }
            a[i][col] = 0;
        }
        prev = a[row][col];
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

} // namespace

size_t rank_rational(const RationalMatrix& m) {
    auto a = clear_denominators(m, 0, nullptr);
    return bareiss(a, m.cols()).size();
}

LinearSolution linear_solve_rational(const RationalMatrix& a, const std::vector<Rational>& b) {
    if (b.size() != a.rows()) throw ExactError("rhs length mismatch");
    auto m = clear_denominators(a, 1, &b);
    const size_t n = a.cols();
    auto pivots = bareiss(m, n + 1);
    LinearSolution sol;
    bool inconsistent = !pivots.empty() && pivots.back() == n;
    if (inconsistent) pivots.pop_back();
    sol.rank = pivots.size();
    sol.pivot_columns = pivots;

    // reduced row echelon form over Q
    const size_t r = pivots.size();
    std::vector<std::vector<Rational>> e(r, std::vector<Rational>(n + 1));
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j <= n; ++j) e[i][j] = Rational(m[i][j]);
    for (size_t i = r; i-- > 0;) {
        const size_t pc = pivots[i];
        const Rational p = e[i][pc];
        for (size_t j = 0; j <= n; ++j) e[i][j] /= p;
        for (size_t k = 0; k < i; ++k) {
            const Rational f = e[k][pc];
            if (sgn(f) == 0) continue;
            for (size_t j = 0; j <= n; ++j) e[k][j] -= f * e[i][j];
        }
    }
    std::vector<bool> is_pivot(n, false);
    for (auto pc : pivots) is_pivot[pc] = true;
    if (!inconsistent) {
        std::vector<Rational> x(n);
        for (size_t i = 0; i < r; ++i) x[pivots[i]] = e[i][n];
        sol.particular = x;
    }
    for (size_t f = 0; f < n; ++f) {
        if (is_pivot[f]) continue;
        std::vector<Rational> v(n);
        v[f] = 1;
        for (size_t i = 0; i < r; ++i) v[pivots[i]] = -e[i][f];
        sol.nullspace.push_back(v);
    }
    return sol;
}

RationalMatrix pi_split(const std::vector<std::vector<PiLinear>>& rows) {
    RationalMatrix m;
    for (const auto& row : rows) {
        std::vector<Rational> ra, rp;
        for (const auto& v : row) {
            ra.push_back(v.rational);
            rp.push_back(v.pi);
        }
        m.append_row(ra);
        m.append_row(rp);
    }
    return m;
}

namespace {

// Polynomials in t over Q, used for elimination over Q(t) with t = pi.
struct UPoly {
    std::vector<Rational> c;

    void trim() {
        while (!c.empty() && sgn(c.back()) == 0) c.pop_back();
    }
    bool zero() const { return c.empty(); }
};

UPoly mul(const UPoly& a, const UPoly& b) {
    UPoly r;
    if (a.zero() || b.zero()) return r;
    r.c.assign(a.c.size() + b.c.size() - 1, Rational(0));
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
    r.trim();
    return r;
}

UPoly sub(const UPoly& a, const UPoly& b) {
    UPoly r;
    r.c.assign(std::max(a.c.size(), b.c.size()), Rational(0));
    for (size_t i = 0; i < a.c.size(); ++i) r.c[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r.c[i] -= b.c[i];
    r.trim();
    return r;
}

UPoly divexact(UPoly a, const UPoly& d) {
    if (d.zero()) throw ExactError("division by zero polynomial");
    UPoly q;
    if (a.zero()) return q;
    if (a.c.size() < d.c.size()) throw ExactError("inexact polynomial division");
    q.c.assign(a.c.size() - d.c.size() + 1, Rational(0));
    const Rational lead = d.c.back();
    for (size_t k = q.c.size(); k-- > 0;) {
        const Rational f = a.c[k + d.c.size() - 1] / lead;
        q.c[k] = f;
        for (size_t j = 0; j < d.c.size(); ++j) a.c[k + j] -= f * d.c[j];
    }
    a.trim();
    if (!a.zero()) throw ExactError("inexact polynomial division");
    q.trim();
    return q;
}

} // namespace

size_t rank_over_q_pi(const std::vector<std::vector<PiLinear>>& rows) {
    if (rows.empty()) return 0;
    const size_t ncols = rows[0].size();
    std::vector<std::vector<UPoly>> a(rows.size(), std::vector<UPoly>(ncols));
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != ncols) throw ExactError("ragged pi matrix");
        for (size_t j = 0; j < ncols; ++j) {
            a[i][j].c = {rows[i][j].rational, rows[i][j].pi};
            a[i][j].trim();
        }
    }
    UPoly prev;
    prev.c = {Rational(1)};
    size_t row = 0;
    for (size_t col = 0; col < ncols && row < a.size(); ++col) {
        size_t best = a.size();
        for (size_t i = row; i < a.size(); ++i)
            if (!a[i][col].zero() && (best == a.size() || a[i][col].c.size() < a[best][col].c.size())) best = i;
        if (best == a.size()) continue;
        std::swap(a[row], a[best]);
        for (size_t i = row + 1; i < a.size(); ++i) {
            for (size_t j = col + 1; j < ncols; ++j)
                a[i][j] = divexact(sub(mul(a[row][col], a[i][j]), mul(a[i][col], a[row][j])), prev);
            a[i][col] = UPoly{};
        }
        prev = a[row][col];
        ++row;
    }
    return row;
}

} // namespace nilmel
