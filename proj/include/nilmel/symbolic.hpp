#ifndef NILMEL_SYMBOLIC_HPP
#define NILMEL_SYMBOLIC_HPP

#include <map>
#include <string>

#include "nilmel/exact.hpp"

namespace nilmel {

// Sparse Laurent polynomial over Q in named variables. Used to keep alpha, gamma,
// mubar and nbar symbolic when checking bank identities.
class SymbolicPoly {
public:
    using Monomial = std::map<std::string, int>;

    SymbolicPoly() = default;
    SymbolicPoly(const Rational& c);  // NOLINT
    SymbolicPoly(int c) : SymbolicPoly(Rational(c)) {}  // NOLINT

    static SymbolicPoly variable(const std::string& name, int power = 1);

    const std::map<Monomial, Rational>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    // Coefficient of `name` as a polynomial in the remaining variables (linear part only).
    SymbolicPoly linear_coefficient(const std::string& name) const;
    std::string to_string() const;

    SymbolicPoly operator-() const;
    SymbolicPoly& operator+=(const SymbolicPoly& o);
    SymbolicPoly& operator-=(const SymbolicPoly& o);
    SymbolicPoly& operator*=(const SymbolicPoly& o);
    friend SymbolicPoly operator+(SymbolicPoly a, const SymbolicPoly& b) { return a += b; }
    friend SymbolicPoly operator-(SymbolicPoly a, const SymbolicPoly& b) { return a -= b; }
    friend SymbolicPoly operator*(const SymbolicPoly& a, const SymbolicPoly& b);
    friend bool operator==(const SymbolicPoly& a, const SymbolicPoly& b) { return a.t_ == b.t_; }

private:
    void add_term(const Monomial& m, const Rational& c);
    std::map<Monomial, Rational> t_;
};

// Only monomials are invertible.
SymbolicPoly inverse_of(const SymbolicPoly& p);
inline bool is_zero_value(const SymbolicPoly& p) { return p.is_zero(); }

inline Real inverse_of(const Real& x) {
    if (x == 0) throw ExactError("division by zero");
    return Real(1) / x;
}
inline bool is_zero_value(const Real& x) { return x == 0; }

template <class T> T scalar_from(const Rational& r);
template <> inline Rational scalar_from<Rational>(const Rational& r) { return r; }
template <> inline AlgebraicElement scalar_from<AlgebraicElement>(const Rational& r) { return AlgebraicElement(r); }
template <> inline SymbolicPoly scalar_from<SymbolicPoly>(const Rational& r) { return SymbolicPoly(r); }
template <> inline Real scalar_from<Real>(const Rational& r) { return to_real(r); }

template <class T>
T ipow(const T& x, int n) {
    T base = n < 0 ? T(inverse_of(x)) : x;
    unsigned e = static_cast<unsigned>(n < 0 ? -n : n);
    T r = scalar_from<T>(Rational(1));
    while (e) {
        if (e & 1u) r = r * base;
        e >>= 1u;
        if (e) base = base * base;
    }
    return r;
}

} // namespace nilmel

#endif
