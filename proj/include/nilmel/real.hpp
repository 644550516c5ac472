#ifndef NILMEL_REAL_HPP
#define NILMEL_REAL_HPP

#include <boost/multiprecision/mpfr.hpp>
#include <string>

namespace nilmel {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                           boost::multiprecision::et_off>;

// Sets the working precision (decimal digits) for Reals created in scope.
class PrecisionScope {
public:
    explicit PrecisionScope(unsigned digits) : saved_(Real::default_precision()) {
        Real::default_precision(digits);
    }
    ~PrecisionScope() { Real::default_precision(saved_); }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_;
};

Real real_pi();
Real real_sqrt2();

// Fixed-format scientific decimal with `digits` significant digits.
std::string to_decimal(const Real& x, int digits);

} // namespace nilmel

#endif
