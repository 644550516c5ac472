#ifndef NILMEL_HAMILTONIAN_HPP
#define NILMEL_HAMILTONIAN_HPP

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nilmel/exact.hpp"
#include "nilmel/perturbation.hpp"
#include "nilmel/symbolic.hpp"

namespace nilmel {

// H = 1/2 y^2 + sum h_ij x^i y^j, i + j >= 3.
class HamiltonianModel {
public:
    HamiltonianModel() = default;

    void set(int i, int j, const Rational& c);
    Rational coeff(int i, int j) const;
    const std::map<std::pair<int, int>, Rational>& terms() const { return hij_; }
    int degree() const;
    int degree_bound() const { return degree_bound_; }
    void set_degree_bound(int d);

    // Includes the 1/2 y^2 term.
    BivariatePoly<Rational> polynomial() const;

    Real value(const Real& x, const Real& y) const;
    Real dx(const Real& x, const Real& y) const;
    Real dy(const Real& x, const Real& y) const;
    Real dyy(const Real& x, const Real& y) const;
    Real dxx(const Real& x, const Real& y) const;
    Real dxy(const Real& x, const Real& y) const;
    // True when H = 1/2 y^2 + U(x).
    bool separable() const;

    std::string to_json() const;
    static HamiltonianModel from_json(const std::string& text);

    // 1/2 y^2 - x^6 + x^8
    static HamiltonianModel lienard();

private:
    Real partial(const Real& x, const Real& y, int px, int py) const;
    std::map<std::pair<int, int>, Rational> hij_;
    int degree_bound_ = 0;
};

enum class SaddleKind {
    CuspOrder1,
    NilpotentCenterOrder1,
    NilpotentSaddleOrder1,
    CuspOrder2,
    NilpotentSaddleOrder2,
    Other
};
std::string to_string(SaddleKind k);

struct SaddleClass {
    SaddleKind kind = SaddleKind::Other;
    int k = 0;  // leading index, 0 when no nonzero h_j was found
    Rational hk;
};

// h_j of H(x, phi(x)) = sum h_j x^j, j = 0..order.
struct HSeriesCoefficients {
    std::vector<Rational> hj;
    Rational at(int j) const;
    int order() const { return static_cast<int>(hj.size()) - 1; }
};

inline constexpr int kMaxSeriesOrder = 40;

HSeriesCoefficients h_series(const HamiltonianModel& h, int order = 14);
SaddleClass classify_origin(const HamiltonianModel& h);

// ---------------------------------------------------------------- formula bank

class MissingInput : public ExactError {
public:
    explicit MissingInput(const std::string& symbol)
        : ExactError("missing input: " + symbol), symbol_(symbol) {}
    const std::string& symbol() const { return symbol_; }

private:
    std::string symbol_;
};

struct BankTerm {
    Rational coeff;
    std::vector<std::pair<std::string, int>> factors;
    std::string to_string() const;
    friend bool operator==(const BankTerm& a, const BankTerm& b) {
        return a.coeff == b.coeff && a.factors == b.factors;
    }
};

BankTerm parse_bank_term(const std::string& text);

struct Erratum {
    std::string id;
    std::string target;
    BankTerm printed;
    std::vector<BankTerm> reading;
    std::string justification;
};

extern const char* const kFormulaBankDigest;
std::string default_data_dir();
std::string sha256_file(const std::string& path);

class FormulaBank {
public:
    template <class T>
    using Leaf = std::function<std::optional<T>(const std::string&)>;

    // Throws if the digest differs from kFormulaBankDigest (when verify is set).
    static FormulaBank load(const std::string& bank_path, const std::string& errata_path, bool verify = true);
    // Bank and errata from the data directory, loaded once.
    static const FormulaBank& builtin();

    const std::string& digest() const { return digest_; }
    bool has(const std::string& target) const { return table_.count(target) != 0; }
    const std::vector<BankTerm>& terms(const std::string& target) const;
    std::vector<std::string> targets() const;
    size_t term_count() const;
    const std::vector<Erratum>& errata() const { return errata_; }
    const std::vector<std::string>& applied_errata() const { return applied_; }

    // Copy with the printed term of each listed erratum replaced by its reading.
    FormulaBank with_errata(const std::vector<std::string>& ids) const;
    std::vector<std::string> errata_ids_for(const std::string& target) const;

    // Sum of products. `leaf` is consulted first for every symbol, so it can
    // override targets; unresolved non-targets raise MissingInput.
    template <class T>
    T evaluate(const std::string& target, const Leaf<T>& leaf) const {
        std::map<std::string, T> memo;
        return eval_rec<T>(target, leaf, memo);
    }

private:
    template <class T>
    T eval_rec(const std::string& target, const Leaf<T>& leaf, std::map<std::string, T>& memo) const {
        if (auto it = memo.find(target); it != memo.end()) return it->second;
        T sum = scalar_from<T>(Rational(0));
        for (const auto& term : terms(target)) {
            T prod = scalar_from<T>(term.coeff);
            for (const auto& [sym, pw] : term.factors) {
                std::optional<T> v = leaf(sym);
                if (!v) {
                    if (!has(sym)) throw MissingInput(sym);
                    v = eval_rec<T>(sym, leaf, memo);
                }
                prod = prod * ipow(*v, pw);
            }
            sum = sum + prod;
        }
        memo.emplace(target, sum);
        return sum;
    }

    std::map<std::string, std::vector<BankTerm>> table_;
    std::vector<std::string> order_;
    std::vector<Erratum> errata_;
    std::vector<std::string> applied_;
    std::string digest_;
};

// ---------------------------------------------------------------- chain

// Values that the bank does not define and that must be supplied from outside:
// alpha_{l,0} (l <= 5), alpha_{0,1}, alpha_{1,1}, abar_{i,1}, bbar_{i,0} (i <= 5),
// abar_{0,2}, abar_{1,2}, abar_{0,3}, abar_{1,3}, bbar_{0,1}, bbar_{1,1}, bbar_{0,2}, bbar_{1,2}.
struct AlphaInputs {
    std::map<std::string, AlgebraicElement> values;

    static const std::vector<std::string>& names();
    static bool is_input_name(const std::string& name);
    void set(const std::string& name, const AlgebraicElement& v);
    std::optional<AlgebraicElement> get(const std::string& name) const;
};

struct ChainCoefficients {
    std::array<AlgebraicElement, 10> mu;      // mu[1..9]
    std::array<AlgebraicElement, 9> mu_bar;   // mu_bar[1..8]
    std::array<AlgebraicElement, 9> n_bar;    // n_bar[0..8]
};

// Formula-bank h_j (j = 10..14) on the coefficients of H. The whitelisted h_14
// readings are applied unless `printed_only` is set.
Rational eval_appendix_hj(const HamiltonianModel& h, int j, bool printed_only = false);

// Needs h_6 < 0; hs must reach j = 14.
ChainCoefficients mu_chain(const HSeriesCoefficients& hs, const Rational& h6);

// The three closed forms of r~00, r~10, r~20 for a nilpotent saddle of order 2.
std::array<AlgebraicElement, 3> r_coefficients_closed(const HamiltonianModel& h, const std::array<Rational, 4>& sigma);

struct ChainEnvironment {
    const HamiltonianModel* hamiltonian = nullptr;
    const PerturbationPoly* perturbation = nullptr;
    const AlphaInputs* alpha = nullptr;
    std::map<std::string, AlgebraicElement> overrides;
};

// Evaluates any bank target over Q(sqrt2)[beta]. h_i_j, a_i_j, b_i_j come from the
// environment (absent terms are zero), hK from h_series, beta from h_6.
AlgebraicElement eval_formula_bank(const FormulaBank& bank, const std::string& target, const ChainEnvironment& env);

// Same with every symbol accepted by `keep` left as a variable.
SymbolicPoly eval_formula_bank_symbolic(const FormulaBank& bank, const std::string& target,
                                        const std::function<bool(const std::string&)>& keep);

} // namespace nilmel

#endif
