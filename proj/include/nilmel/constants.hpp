#ifndef NILMEL_CONSTANTS_HPP
#define NILMEL_CONSTANTS_HPP

#include <string>
#include <utility>
#include <vector>

#include "nilmel/real.hpp"

namespace nilmel {

struct UniversalConstants {
    Real A0t, A1t, A3t, A4t;  // A~_0, A~_1, A~_3, A~_4
    Real A0b, A2b;            // A-_0, A-_2
    Real D1, D2;              // |A-_0|/|A~_0|, |A-_2|/|A~_4|
    // quadrature error estimates, same order as named()
    std::vector<Real> errors;
    unsigned digits = 0;

    // (name, value) in a fixed order: A0t A1t A3t A4t A0b A2b D1 D2
    std::vector<std::pair<std::string, Real>> named() const;
    bool signs_ok() const;
};

class PrecisionNotMet : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Each constant to `digits` significant figures (digits >= 10). Integrals run at
// digits + 10 working precision; the returned Reals carry that precision.
UniversalConstants compute_constants(unsigned digits = 30);

// Cached 40-digit set for the expansion and cycles modules.
const UniversalConstants& default_constants();

} // namespace nilmel

#endif
