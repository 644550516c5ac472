#include "nilmel/symbolic.hpp"

#include <sstream>

namespace nilmel {

SymbolicPoly::SymbolicPoly(const Rational& c) {
    if (sgn(c) != 0) t_[{}] = c;
}

SymbolicPoly SymbolicPoly::variable(const std::string& name, int power) {
    SymbolicPoly p;
    Monomial m;
    if (power != 0) m[name] = power;
    p.t_[m] = 1;
    return p;
}

void SymbolicPoly::add_term(const Monomial& m, const Rational& c) {
    if (sgn(c) == 0) return;
    auto it = t_.find(m);
    if (it == t_.end()) {
        t_.emplace(m, c);
        return;
    }
    it->second += c;
    if (sgn(it->second) == 0) t_.erase(it);
}

SymbolicPoly SymbolicPoly::operator-() const {
    SymbolicPoly r = *this;
    for (auto& [m, c] : r.t_) c = -c;
    return r;
}

SymbolicPoly& SymbolicPoly::operator+=(const SymbolicPoly& o) {
    for (const auto& [m, c] : o.t_) add_term(m, c);
    return *this;
}

SymbolicPoly& SymbolicPoly::operator-=(const SymbolicPoly& o) {
    for (const auto& [m, c] : o.t_) add_term(m, -c);
    return *this;
}

SymbolicPoly operator*(const SymbolicPoly& a, const SymbolicPoly& b) {
    SymbolicPoly r;
    for (const auto& [ma, ca] : a.t_)
        for (const auto& [mb, cb] : b.t_) {
            auto m = ma;
            for (const auto& [v, e] : mb) {
                int& slot = m[v];
                slot += e;
                if (slot == 0) m.erase(v);
            }
            r.add_term(m, ca * cb);
        }
    return r;
}

SymbolicPoly& SymbolicPoly::operator*=(const SymbolicPoly& o) {
    *this = *this * o;
    return *this;
}

SymbolicPoly SymbolicPoly::linear_coefficient(const std::string& name) const {
    SymbolicPoly r;
    for (const auto& [m, c] : t_) {
        auto it = m.find(name);
        if (it == m.end() || it->second != 1) continue;
        auto rest = m;
        rest.erase(name);
        r.add_term(rest, c);
    }
    return r;
}

std::string SymbolicPoly::to_string() const {
    if (t_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : t_) {
        if (!first) os << " + ";
        first = false;
        os << nilmel::to_string(c);
        for (const auto& [v, e] : m) {
            os << '*' << v;
            if (e != 1) os << '^' << e;
        }
    }
    return os.str();
}

SymbolicPoly inverse_of(const SymbolicPoly& p) {
    if (p.terms().size() != 1) throw ExactError("only monomials are invertible");
    const auto& [m, c] = *p.terms().begin();
    SymbolicPoly r(inverse_of(c));
    for (const auto& [v, e] : m) r *= SymbolicPoly::variable(v, -e);
    return r;
}

} // namespace nilmel
