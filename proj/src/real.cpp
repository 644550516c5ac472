#include "nilmel/real.hpp"

#include <iomanip>
#include <sstream>

namespace nilmel {

Real real_pi() {
    Real p;
    mpfr_const_pi(p.backend().data(), MPFR_RNDN);
    return p;
}

Real real_sqrt2() { return boost::multiprecision::sqrt(Real(2)); }

std::string to_decimal(const Real& x, int digits) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(digits > 1 ? digits - 1 : 0) << x;
    return os.str();
}

} // namespace nilmel
