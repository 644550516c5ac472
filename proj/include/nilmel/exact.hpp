#ifndef NILMEL_EXACT_HPP
#define NILMEL_EXACT_HPP

#include <gmpxx.h>

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nilmel/real.hpp"

namespace nilmel {

class ExactError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- Rational

using Rational = mpq_class;

// Accepts "p/q", "p" or "-p/q"; the result is canonical (gcd 1, q > 0).
Rational parse_rational(const std::string& text);
// "p/q", or "p" when q = 1.
std::string to_string(const Rational& r);
Real to_real(const Rational& r);

// ---------------------------------------------------------------- PiLinear

// a + b*pi with a, b rational. Products of two pi parts are rejected.
struct PiLinear {
    Rational rational;
    Rational pi;

    PiLinear() = default;
    PiLinear(Rational a, Rational b = 0) : rational(std::move(a)), pi(std::move(b)) {}

    bool is_zero() const { return sgn(rational) == 0 && sgn(pi) == 0; }
    Real value() const;
    // "a/b + c/d*pi"
    std::string to_string() const;

    PiLinear operator-() const { return {-rational, -pi}; }
    PiLinear& operator+=(const PiLinear& o);
    PiLinear& operator-=(const PiLinear& o);
    PiLinear& operator*=(const Rational& s);
};

PiLinear operator+(PiLinear a, const PiLinear& b);
PiLinear operator-(PiLinear a, const PiLinear& b);
PiLinear operator*(PiLinear a, const Rational& s);
PiLinear operator*(const Rational& s, PiLinear a);
// Throws ExactError when both factors carry a pi part.
PiLinear operator*(const PiLinear& a, const PiLinear& b);
bool operator==(const PiLinear& a, const PiLinear& b);
PiLinear parse_pi_linear(const std::string& text);

// ---------------------------------------------------------------- AlgebraicElement

// Element of Q(sqrt2)[beta]/(beta^6 + h6): sum of c[s][k] sqrt2^s beta^k,
// s in {0,1}, k in 0..5. Elements without beta content carry no h6 context.
class AlgebraicElement {
public:
    static constexpr int kBetaDegree = 6;
    static constexpr int kDim = 2 * kBetaDegree;

    AlgebraicElement();
    AlgebraicElement(const Rational& r);  // NOLINT: implicit by design
    AlgebraicElement(long r) : AlgebraicElement(Rational(r)) {}  // NOLINT
    AlgebraicElement(int r) : AlgebraicElement(Rational(r)) {}   // NOLINT

    static AlgebraicElement sqrt2();
    // beta^k for any integer k, reduced with beta^6 = -h6 (h6 != 0).
    static AlgebraicElement beta_power(int k, const Rational& h6);

    const Rational& coeff(int s, int k) const { return c_[index(s, k)]; }
    void set_coeff(int s, int k, const Rational& v) { c_[index(s, k)] = v; }
    bool has_context() const { return ctx_; }
    const Rational& h6() const;
    void set_context(const Rational& h6);

    bool is_zero() const;
    std::optional<Rational> as_rational() const;

    AlgebraicElement operator-() const;
    AlgebraicElement& operator+=(const AlgebraicElement& o);
    AlgebraicElement& operator-=(const AlgebraicElement& o);
    AlgebraicElement& operator*=(const AlgebraicElement& o);

    // Throws ExactError on zero divisors.
    AlgebraicElement inverse() const;
    AlgebraicElement pow(int n) const;

    // Real embedding with beta = (-h6)^(1/6) > 0; requires h6 < 0 when beta occurs.
    Real to_real() const;
    std::string to_string() const;

    friend bool operator==(const AlgebraicElement& a, const AlgebraicElement& b);

private:
    static int index(int s, int k) { return s * kBetaDegree + k; }
    void unify(const AlgebraicElement& o);

    std::array<Rational, kDim> c_;
    Rational h6_;
    bool ctx_ = false;
};

AlgebraicElement operator+(AlgebraicElement a, const AlgebraicElement& b);
AlgebraicElement operator-(AlgebraicElement a, const AlgebraicElement& b);
AlgebraicElement operator*(AlgebraicElement a, const AlgebraicElement& b);
inline bool operator!=(const AlgebraicElement& a, const AlgebraicElement& b) { return !(a == b); }

inline Rational inverse_of(const Rational& r) {
    if (sgn(r) == 0) throw ExactError("division by zero");
    return Rational(1) / r;
}
inline AlgebraicElement inverse_of(const AlgebraicElement& a) { return a.inverse(); }
inline bool is_zero_value(const Rational& r) { return sgn(r) == 0; }
inline bool is_zero_value(const AlgebraicElement& a) { return a.is_zero(); }

// ---------------------------------------------------------------- Series1

inline constexpr int kDefaultSeriesOrder = 20;

// Truncated power series sum_{k < order} c_k x^k.
template <class T>
class Series1 {
public:
    explicit Series1(int order = kDefaultSeriesOrder) : c_(static_cast<size_t>(order), T(0)) {
        if (order <= 0) throw ExactError("series order must be positive");
    }

    static Series1 variable(int order) {
        Series1 s(order);
        if (order > 1) s.c_[1] = T(1);
        return s;
    }
    static Series1 constant(const T& v, int order) {
        Series1 s(order);
        s.c_[0] = v;
        return s;
    }

    int order() const { return static_cast<int>(c_.size()); }
    const T& operator[](int k) const { return c_.at(static_cast<size_t>(k)); }
    T& operator[](int k) { return c_.at(static_cast<size_t>(k)); }
    const std::vector<T>& coefficients() const { return c_; }

    Series1& operator+=(const Series1& o) {
        check(o);
        for (size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    Series1& operator-=(const Series1& o) {
        check(o);
        for (size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Series1& operator*=(const T& s) {
        for (auto& v : c_) v *= s;
        return *this;
    }
    friend Series1 operator+(Series1 a, const Series1& b) { return a += b; }
    friend Series1 operator-(Series1 a, const Series1& b) { return a -= b; }
    friend Series1 operator*(Series1 a, const T& s) { return a *= s; }
    friend Series1 operator*(const Series1& a, const Series1& b) {
        a.check(b);
        const int n = a.order();
        Series1 r(n);
        for (int i = 0; i < n; ++i) {
            if (is_zero_value(a.c_[i])) continue;
            for (int j = 0; i + j < n; ++j) {
                if (is_zero_value(b.c_[j])) continue;
                r.c_[i + j] += a.c_[i] * b.c_[j];
            }
        }
        return r;
    }

    // 1/s; needs an invertible constant term.
    Series1 reciprocal() const {
        const int n = order();
        Series1 r(n);
        T inv0 = inverse_of(c_[0]);
        r.c_[0] = inv0;
        for (int k = 1; k < n; ++k) {
            T acc(0);
            for (int j = 1; j <= k; ++j) {
                if (is_zero_value(c_[j])) continue;
                acc += c_[j] * r.c_[k - j];
            }
            r.c_[k] = -(acc * inv0);
        }
        return r;
    }

    Series1 derivative() const {
        Series1 r(order());
        for (int k = 1; k < order(); ++k) r.c_[k - 1] = c_[k] * T(k);
        return r;
    }

private:
    void check(const Series1& o) const {
        if (o.c_.size() != c_.size()) throw ExactError("series order mismatch");
    }
    std::vector<T> c_;
};

// G(x, y) = sum c_ij x^i y^j.
template <class T>
struct BivariatePoly {
    std::map<std::pair<int, int>, T> terms;

    void add(int i, int j, const T& c) {
        auto& slot = terms[{i, j}];
        slot += c;
        if (is_zero_value(slot)) terms.erase({i, j});
    }

    T coeff(int i, int j) const {
        auto it = terms.find({i, j});
        return it == terms.end() ? T(0) : it->second;
    }

    BivariatePoly derivative_y() const {
        BivariatePoly d;
        for (const auto& [ij, c] : terms)
            if (ij.second > 0) d.add(ij.first, ij.second - 1, c * T(ij.second));
        return d;
    }

    // G(x, y(x)) truncated to y's order.
    Series1<T> compose(const Series1<T>& y) const {
        const int n = y.order();
        int max_j = 0;
        for (const auto& [ij, c] : terms) max_j = std::max(max_j, ij.second);
        std::vector<Series1<T>> ypow;
        ypow.push_back(Series1<T>::constant(T(1), n));
        for (int j = 1; j <= max_j; ++j) ypow.push_back(ypow.back() * y);
        Series1<T> out(n);
        for (const auto& [ij, c] : terms) {
            const int i = ij.first;
            if (i >= n) continue;
            const auto& p = ypow[static_cast<size_t>(ij.second)];
            for (int k = 0; k + i < n; ++k) {
                if (is_zero_value(p[k])) continue;
                out[k + i] += c * p[k];
            }
        }
        return out;
    }
};

// Solves G(x, phi(x)) = 0 with phi(0) = 0 by Newton iteration on series.
// Requires G(0,0) = 0 and G_y(0,0) != 0.
template <class T>
Series1<T> series_newton(const BivariatePoly<T>& g, int order = kDefaultSeriesOrder) {
    if (!is_zero_value(g.coeff(0, 0))) throw ExactError("series_newton: G(0,0) != 0");
    if (is_zero_value(g.coeff(0, 1))) throw ExactError("series_newton: G_y(0,0) = 0");
    const auto gy = g.derivative_y();
    Series1<T> phi(order);
    int steps = 2;
    for (int reach = 1; reach < order; reach *= 2) ++steps;
    for (int it = 0; it < steps; ++it) {
        auto val = g.compose(phi);
        auto der = gy.compose(phi);
        phi -= val * der.reciprocal();
    }
    auto residual = g.compose(phi);
    for (int k = 0; k < order; ++k)
        if (!is_zero_value(residual[k])) throw ExactError("series_newton: residual not zero");
    return phi;
}

// ---------------------------------------------------------------- matrices

class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    Rational& operator()(size_t i, size_t j) { return a_[i * cols_ + j]; }
    const Rational& operator()(size_t i, size_t j) const { return a_[i * cols_ + j]; }
    void append_row(const std::vector<Rational>& row);

private:
    size_t rows_ = 0;
    size_t cols_ = 0;
    std::vector<Rational> a_;
};

struct LinearSolution {
    size_t rank = 0;
    std::vector<size_t> pivot_columns;
    std::optional<std::vector<Rational>> particular;  // empty when inconsistent
    std::vector<std::vector<Rational>> nullspace;      // basis, free variable = 1
};

// Fraction-free (Bareiss) elimination on the denominator-cleared matrix.
size_t rank_rational(const RationalMatrix& m);
LinearSolution linear_solve_rational(const RationalMatrix& a, const std::vector<Rational>& b);

// Rows of pi-linear forms -> rational system with the rational part and the pi part of
// each form as separate rows.
RationalMatrix pi_split(const std::vector<std::vector<PiLinear>>& rows);
// Rank over the field Q(pi), treating pi as transcendental.
size_t rank_over_q_pi(const std::vector<std::vector<PiLinear>>& rows);

} // namespace nilmel

#endif
