#ifndef NILMEL_EXPANSION_HPP
#define NILMEL_EXPANSION_HPP

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nilmel/constants.hpp"
#include "nilmel/hamiltonian.hpp"
#include "nilmel/ovals.hpp"
#include "nilmel/perturbation.hpp"
#include "nilmel/real.hpp"

namespace nilmel {

// M   = c0  + c1|h|^2/3 + c2|h|^5/6 + c3 h ln|h| + c4 h  + c5|h|^7/6 + c6|h|^4/3 + c7|h|^5/3 + c8|h|^11/6 + c9 h^2 ln|h|
// M~  = c0~ + c1|h|^2/3 - c2|h|^5/6 + c3 h ln|h| + c4~ h - c5|h|^7/6 + c6|h|^4/3 + c7|h|^5/3 - c8|h|^11/6 + c9 h^2 ln|h|
// M*  = c*0 + 2c*1 h^2/3 + 2c*2 h ln h + c*3 h + 2c*4 h^4/3 + 2c*5 h^5/3 + 2c*6 h^2 ln h
struct MelnikovExpansion {
    std::array<Real, 10> c;
    Real c0t, c4t;
    std::array<Real, 7> cstar;
    UniversalConstants constants;

    // c*0 = c0 + c0~, c*1 = -D1 c1, c*2 = c3, c*4 = -D2 c6, c*5 = D1 c7, c*6 = c9
    static MelnikovExpansion from_inner(const std::array<Real, 10>& c, const Real& c0t, const Real& c4t,
                                        const Real& c3star, const UniversalConstants& k);
};

// Basis of the side's series, with the names used in reports.
std::vector<std::string> basis_names(Side side);
std::vector<Real> basis_values(Side side, const Real& h);
// The expansion's coefficients on basis_values(side, .), signs and factors of 2 included.
std::vector<Real> basis_coefficients(const MelnikovExpansion& e, Side side);

Real eval_expansion(const MelnikovExpansion& e, const Real& h, Side side);

struct BasisSample {
    Side side = Side::InnerRight;
    std::vector<Real> h, M;
};

// n points, |h| geometric from lo to hi, signed for the side, increasing |h|.
std::vector<Real> geometric_grid(const Real& lo, const Real& hi, int n, Side side);
BasisSample sample_expansion(const MelnikovExpansion& e, Side side, const std::vector<Real>& h);
BasisSample sample_melnikov(const HamiltonianModel& H, const PerturbationPoly& pq, Side side,
                            const std::vector<Real>& h, const Real& tol);

class FitError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct FitResult {
    Side side = Side::InnerRight;
    std::vector<std::string> basis;
    std::vector<Real> coefficients;
    std::vector<Real> stderrs;
    Real condition;      // of the column-scaled design matrix
    Real residual_norm;  // ||A x - M||
    bool ill_conditioned = false;
};

inline const Real& default_condition_limit() {
    static const Real v("1e16");
    return v;
}

struct FitOptions {
    Real condition_limit = default_condition_limit();
    // extra columns |h|^(k/6), k = 12 .. 11 + remainder_terms, for the O(h^2) remainder,
    // with |h|^m ln|h| added at integer m >= 3; their coefficients follow the basis ones
    int remainder_terms = 3;
};

// Least squares in the side's basis with unit-norm columns and a fully pivoted QR.
// Needs at least twice as many samples as columns.
FitResult fit_expansion(const BasisSample& s, const FitOptions& opt = {});

// Named chain values: rt00 rt10 rt20 rt30 rt40 rt01 rt60 rt11 rt70 rt21 rt80 (r~),
// r1_01 r1_11 r1_21 r1_03 r1_31 r1_13 r1_41 (r^(1), optional).
struct ChainValues {
    std::map<std::string, Real> values;
};

// Loop data that the chain does not supply.
struct LoopIntegrals {
    Real c0, c0t;      // loop Melnikov values
    Real c41, c41t;    // time integrals of p_x + q_y - sigma_0 - sigma_1 x - sigma_3 x^2
    Real c31s;         // the same over the figure eight
};

class MissingChainInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct AssembledExpansion {
    MelnikovExpansion expansion;
    // c*_i from the r^(1) values next to the relation values, when r^(1) is given
    std::map<std::string, std::pair<Real, Real>> star_check;
};

// c4 and c~4 are set to the loop time integrals (the O(|c1|+|c2|+|c3|) part is not known).
AssembledExpansion assemble_from_chain(const ChainValues& chain, const UniversalConstants& k,
                                       const LoopIntegrals& loops);

} // namespace nilmel

#endif
