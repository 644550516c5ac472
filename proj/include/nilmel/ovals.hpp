#ifndef NILMEL_OVALS_HPP
#define NILMEL_OVALS_HPP

#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "nilmel/hamiltonian.hpp"
#include "nilmel/perturbation.hpp"
#include "nilmel/quadrature.hpp"
#include "nilmel/real.hpp"

namespace nilmel {

// InnerRight: L_h (h < 0, x > 0); InnerLeft: L~_h (h < 0, x < 0); Outer: L*_h (h > 0).
// At h = 0 the three sides name the loops L_0, L~_0 and the figure eight L*_0.
enum class Side { InnerRight, InnerLeft, Outer };
std::string to_string(Side s);
Side parse_side(const std::string& s);

class LevelOutOfRange : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class TopologyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class DivergentIntegral : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class SingularityOrderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Sparse polynomial in x, y.
using Poly2 = std::map<std::pair<int, int>, Rational>;
Real eval_poly2(const Poly2& g, const Real& x, const Real& y);
Poly2 divergence_poly(const PerturbationPoly& pq);

inline constexpr double kMinLevel = 1e-10;

// A component of H = h cut into x-intervals on which it has an upper and a lower
// branch. Endpoints where the two branches meet (turning points, the saddle at
// h = 0) are flagged; for h > 0 the outer oval is split at x = 0.
class LevelSet {
public:
    struct Piece {
        Real x0, x1;
        bool meet0 = false, meet1 = false;
        // separable H: Taylor coefficients of U(x_end + d) - U(x_end), d^1 upwards
        std::vector<Real> taylor0, taylor1;
    };

    LevelSet(const HamiltonianModel& H, const Real& h, Side side);

    const HamiltonianModel& hamiltonian() const { return *H_; }
    const Real& level() const { return h_; }
    Side side() const { return side_; }
    const std::vector<Piece>& pieces() const { return pieces_; }
    Real x_min() const { return pieces_.front().x0; }
    Real x_max() const { return pieces_.back().x1; }
    // Roots of the reduced function on either side of the saddle at h = 0.
    const Real& loop_right() const { return x_right_; }
    const Real& loop_left() const { return x_left_; }
    bool separable() const { return separable_; }

    // Upper and lower y at x = x0 + da = x1 - db of piece k.
    std::pair<Real, Real> branches(size_t k, const Real& x, const Real& da, const Real& db) const;
    // 2 (h - U(x)) near the piece ends, separable H only.
    Real w_value(size_t k, const Real& x, const Real& da, const Real& db) const;

    // y with H_y(x, y) = 0 and the reduced function H(x, psi(x)).
    Real critical_y(const Real& x) const;
    Real reduced(const Real& x) const;
    Real reduced_dx(const Real& x) const;

    // d^px/dx^px d^py/dy^py H at the working precision of construction
    Real partial(const Real& x, const Real& y, int px, int py) const;

private:
    Real U(const Real& x) const;
    Real find_root(const Real& lo, const Real& hi, const Real& target) const;
    Real find_min(const Real& lo, const Real& hi) const;
    void validate_double_loop();
    std::vector<Real> taylor_at(const Real& x) const;

    const HamiltonianModel* H_;
    Real h_;
    Side side_;
    bool separable_ = false;
    std::vector<Real> u_;  // U coefficients by power (separable)
    std::vector<std::tuple<int, int, Real>> hterms_;
    Real x_right_, x_left_;
    std::vector<Piece> pieces_;
};

enum class OvalRule {
    XBranch,   // weights integrate dx along each branch (separable H)
    ArcLength  // weights integrate ds along a continuation trace
};

struct OvalNode {
    Real x, y, weight;
    int branch = 1;  // +1 upper, -1 lower
};

struct Oval {
    HamiltonianModel H;
    Real h;
    Side side = Side::InnerRight;
    OvalRule rule = OvalRule::XBranch;
    Real x_min, x_max;
    std::vector<OvalNode> nodes;  // clockwise, first node repeated at the end
    bool clockwise = true;
    // max |H - h| over the nodes
    Real residual;
};

// |h| must lie in [1e-10, h_max]; h = 0 is rejected (use the loop integrals).
Oval trace_oval(const HamiltonianModel& H, const Real& h, Side side, int n_nodes);

// Node rule on a traced oval; converges as n_nodes grows.
Real melnikov_integral(const Oval& oval, const PerturbationPoly& pq);

// Adaptive value of the clockwise integral of q dx - p dy over the side's oval
// (h != 0) or loop (h = 0). Throws NonConvergence when tol is not reached.
QuadResult melnikov_value(const HamiltonianModel& H, const Real& h, Side side, const PerturbationPoly& pq,
                          const Real& tol);

// Integral of g dt along the flow over the oval or loop. At h = 0 the
// coefficient of y must vanish (DivergentIntegral) and every other monomial
// x^i y^j needs i + 3 j >= 3 (SingularityOrderError).
QuadResult time_integral(const HamiltonianModel& H, const Real& h, Side side, const Poly2& g, const Real& tol);

// p_x + q_y - sigma_0 - sigma_1 x - sigma_3 x^2
Poly2 c4_integrand(const PerturbationPoly& pq);

struct CIntegrals {
    Real c0, c0t, c41, c41t, c31s;
    Real error;  // largest quadrature error estimate
};

// c_0, c~_0 (loop Melnikov values), c_41, c~_41 (tanh-sinh in x on each loop)
// and c*_31 (Gauss-Legendre in an angle variable over the figure eight).
CIntegrals c_integrals(const HamiltonianModel& H, const PerturbationPoly& pq, const Real& tol);

// c*_31 alone, Gauss-Legendre panels in x = x_end sin(theta) on both lobes.
QuadResult figure_eight_time_integral(const HamiltonianModel& H, const Poly2& g, const Real& tol);

} // namespace nilmel

#endif
