#ifndef NILMEL_CYCLES_HPP
#define NILMEL_CYCLES_HPP

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nilmel/constants.hpp"
#include "nilmel/real.hpp"

namespace nilmel {

// Coefficient names used by the chain: c0 c0t c1 c2 c3 c41 c41t c5 c6 c7 c8 c9.
const std::vector<std::string>& chain_names();

// Ordering of the proof of the l = 9 count:
//   variant 1: c0, c0t << -c1 ...   variant 2: c0 << -c0t << -c1 ...   variant 3: c0t << -c0 << -c1 ...
//   branch A: ... c3 << -c41 << c41t << -c5 ...   branch B: ... c3 << -c41t << c41 << c5 ...
// and c6 << -c7 << -c8 (or c8) << 1 with c9 < 0. For l < 9 the chain stops at c_{l-1}
// and c_l is the fixed term, with the sign it has in the l = 9 pattern.
struct ChainSpec {
    int l = 9;
    int variant = 1;
    char branch = 'A';
    bool c8_negative = true;
    Real ratio = Real("1e-4");  // spacing of consecutive balance points in |h|
    Real base = Real("1e-2");   // magnitude of c_{l-1}
    Real log_stretch = 4;       // |ln h| factor across the c2/c3 and c3/c41 balances
};

class ChainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Chain {
    ChainSpec spec;
    std::map<std::string, Real> c;  // every name of chain_names(); entries beyond l are 0
    // chain entries from the smallest magnitude up, with the fixed term last
    std::vector<std::string> order;
    // |h| where consecutive groups of the chain balance, from the top down
    std::vector<Real> balance;
    Real h_lo, h_hi;  // scan window in |h|
};

Chain build_chain(const ChainSpec& spec);

// f1, f2 (h < 0) and f3 (h > 0) truncated at order l, evaluated at |h| = t.
struct TruncatedExpansions {
    int l = 9;
    std::map<std::string, Real> c;
    Real D1, D2;

    static TruncatedExpansions from_chain(const Chain& chain, const UniversalConstants& k);
    // value and a bound on its rounding error at the current precision
    std::pair<Real, Real> eval(int f, const Real& t) const;
};

struct CertifiedZero {
    Real t;          // |h| of the zero
    Real lo, hi;     // certified bracket in |h|
    Real f_lo, f_hi; // values at the bracket ends (opposite signs, above 10x the error bound)
};

struct ZeroCountReport {
    std::array<int, 3> counts{};
    std::array<std::vector<CertifiedZero>, 3> zeros;
    std::array<int, 3> ambiguous{};  // stretches below the noise floor that could hide zeros
    int total = 0;
    unsigned digits = 0;
    Real h_lo, h_hi;
    int points = 0;
    std::optional<std::array<int, 3>> expected;  // the triple claimed for l = 9
    int expected_total = 0;
    bool matches = false;
};

// Log-spaced scan of |h| in [h_lo, h_hi] (points_per_decade), sign changes between
// certified samples refined by bisection.
ZeroCountReport count_zeros(const TruncatedExpansions& f, const Real& h_lo, const Real& h_hi, unsigned digits = 60,
                            int points_per_decade = 200);

// build_chain + count_zeros at `digits`, with the expected values filled in.
ZeroCountReport count_chain(const ChainSpec& spec, unsigned digits = 60, int points_per_decade = 200);

} // namespace nilmel

#endif
