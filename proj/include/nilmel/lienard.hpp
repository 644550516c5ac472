#ifndef NILMEL_LIENARD_HPP
#define NILMEL_LIENARD_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "nilmel/constants.hpp"
#include "nilmel/exact.hpp"
#include "nilmel/expansion.hpp"
#include "nilmel/perturbation.hpp"

namespace nilmel {

// x' = y, y' = 6x^5 - 8x^7 - eps f(x) y with f = sum_{j<=12} a_j x^j.
struct LienardParams {
    std::array<Rational, 13> a{};

    static LienardParams from_vector(const std::vector<Rational>& v);  // shorter vectors are zero-padded
    PerturbationPoly perturbation() const;
};

enum class ConstTag { One, A0t, A1t, A3t, A4t };
std::string to_string(ConstTag t);
Real tag_value(ConstTag t, const UniversalConstants& k);

// value = sqrt(2) * tag * sum_j coeff[j] a_j
struct CoefficientForm {
    std::string name;
    ConstTag tag = ConstTag::One;
    std::array<PiLinear, 13> coeff{};

    PiLinear inner(const LienardParams& p) const;
    Real value(const LienardParams& p, const UniversalConstants& k) const;
    bool is_zero() const;
};

// Closed forms in units of sqrt(2): I1[j] = I_{1j}/sqrt2, I2[j] = I_{2j}/sqrt2 (j = 0..12),
// F[j] = int_0^1 x^{j-3}/sqrt(1-x^2), Ft[j] the same over [-1, 0] (j = 3..12, zero below).
struct ClosedFormIntegrals {
    std::array<PiLinear, 13> I1{}, I2{}, F{}, Ft{};
};
ClosedFormIntegrals closed_form_integrals();

// int_0^1 x^m sqrt(1-x^2) dx and int_0^1 x^m / sqrt(1-x^2) dx
PiLinear beta_sqrt(int m);
PiLinear beta_inv_sqrt(int m);

// c0, c0t, c41, c41t from the closed forms; c1 .. c9 as printed.
// Order: c0 c0t c41 c41t c1 c2 c3 c5 c6 c7 c8 c9.
const std::vector<CoefficientForm>& lienard_coefficients();
const CoefficientForm& lienard_form(const std::string& name);

// Expansion record from the closed forms. The left-lobe values carry the clockwise
// orientation of the flow (minus the printed c~0, c~41); c4 = c41, c~4 = -c~41.
MelnikovExpansion lienard_expansion(const LienardParams& p, const UniversalConstants& k);

// The four printed brackets, transcribed.
const std::vector<CoefficientForm>& printed_bracket_forms();

struct BracketEntry {
    std::string form;
    int j = 0;
    PiLinear printed, computed;
    bool match() const { return printed.rational == computed.rational && printed.pi == computed.pi; }
};
// 4 x 13 entries, the printed coefficient next to the closed-form one.
std::vector<BracketEntry> compare_printed_brackets();

struct PrintedCheck {
    std::string what;
    std::string printed;
    std::string computed;
    bool match = false;
};

struct CaseSolution {
    int id = 0;
    std::vector<std::string> vanishing;  // forms set to zero
    int n_vars = 0;                      // a_0 .. a_{n_vars-1} are unknowns
    int leading = 0;                     // index of the nonzero parameter
    std::vector<int> free_vars;
    // a_i = sum_f relation[i][f] a_f over the free variables
    std::map<int, std::map<int, Rational>> relation;
    std::string certificate;  // name of the first non-vanishing form
    ConstTag certificate_tag = ConstTag::One;
    // certificate on the solution = sqrt2 * tag * sum_f certificate_coeff[f] a_f
    std::map<int, PiLinear> certificate_coeff;
    size_t rank = 0;             // over Q(pi)
    bool split_consistent = false;  // rank over Q(pi) equals rank of the rational/pi split
    std::vector<PrintedCheck> checks;

    bool all_printed_match() const;
    // the full a-vector for given free-variable values
    LienardParams instantiate(const std::map<int, Rational>& free_values) const;
};

// Exact solve of the vanishing system of case 1, 2 or 3.
CaseSolution solve_case(int id);
size_t jacobian_rank(int id);

// Chain length l used for a case and the limit-cycle count 2l-2 (l = 8, 9), 2l-1 (l = 6, 7).
int case_chain_length(int id);
int limit_cycle_count(int l);

} // namespace nilmel

#endif
