#include "nilmel/ovals.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace nilmel {

namespace {

using Terms = std::vector<std::tuple<int, int, Real>>;

Terms to_terms(const Poly2& g) {
    Terms t;
    for (const auto& [ij, c] : g)
        if (sgn(c) != 0) t.emplace_back(ij.first, ij.second, to_real(c));
    return t;
}

Real eval_terms(const Terms& t, const Real& x, const Real& y) {
    Real s = 0;
    for (const auto& [i, j, c] : t) {
        Real v = c;
        if (i > 0) v *= pow(x, i);
        if (j > 0) v *= pow(y, j);
        s += v;
    }
    return s;
}

Real eps_real() { return pow(Real(10), -static_cast<int>(Real::default_precision())); }

Real horner(const std::vector<Real>& c, const Real& x) {
    Real s = 0;
    for (size_t k = c.size(); k-- > 0;) s = s * x + c[k];
    return s;
}

// sum_{k>=1} c[k-1] d^k
Real taylor_sum(const std::vector<Real>& c, const Real& d) { return horner(c, d) * d; }

// antiderivative in y of the divergence, G(x, y) = int_0^y div(x, s) ds
Poly2 divergence_antiderivative(const PerturbationPoly& pq) {
    Poly2 G;
    for (const auto& [ij, c] : divergence_poly(pq)) G[{ij.first, ij.second + 1}] += c / Rational(ij.second + 1);
    return G;
}

} // namespace

std::string to_string(Side s) {
    switch (s) {
    case Side::InnerRight: return "inner-right";
    case Side::InnerLeft: return "inner-left";
    case Side::Outer: return "outer";
    }
    return "?";
}

Side parse_side(const std::string& s) {
    if (s == "inner-right") return Side::InnerRight;
    if (s == "inner-left") return Side::InnerLeft;
    if (s == "outer") return Side::Outer;
    throw std::invalid_argument("unknown side: " + s);
}

Real eval_poly2(const Poly2& g, const Real& x, const Real& y) { return eval_terms(to_terms(g), x, y); }

Poly2 divergence_poly(const PerturbationPoly& pq) {
    Poly2 d;
    for (const auto& [ij, c] : pq.a)
        if (ij.first > 0) d[{ij.first - 1, ij.second}] += c * Rational(ij.first);
    for (const auto& [ij, c] : pq.b)
        if (ij.second > 0) d[{ij.first, ij.second - 1}] += c * Rational(ij.second);
    for (auto it = d.begin(); it != d.end();) it = sgn(it->second) == 0 ? d.erase(it) : std::next(it);
    return d;
}

Poly2 c4_integrand(const PerturbationPoly& pq) {
    Poly2 g = divergence_poly(pq);
    g.erase({0, 0});
    g.erase({1, 0});
    g.erase({2, 0});
    return g;
}

// ---------------------------------------------------------------- LevelSet

LevelSet::LevelSet(const HamiltonianModel& H, const Real& h, Side side) : H_(&H), h_(h), side_(side) {
    separable_ = H.separable();
    hterms_.emplace_back(0, 2, Real("0.5"));
    for (const auto& [ij, c] : H.terms()) hterms_.emplace_back(ij.first, ij.second, to_real(c));
    if (separable_) {
        for (const auto& [ij, c] : H.terms()) {
            if (static_cast<size_t>(ij.first) >= u_.size()) u_.resize(ij.first + 1, Real(0));
            u_[ij.first] = to_real(c);
        }
    }
    if (h != 0 && abs(h) < Real("1e-10")) throw LevelOutOfRange("|h| below 1e-10");
    validate_double_loop();

    auto piece = [&](const Real& a, const Real& b, bool m0, bool m1) {
        Piece p;
        p.x0 = a;
        p.x1 = b;
        p.meet0 = m0;
        p.meet1 = m1;
        if (separable_) {
            if (m0) p.taylor0 = taylor_at(a);
            if (m1) p.taylor1 = taylor_at(b);
        }
        pieces_.push_back(p);
    };

    if (h == 0) {
        if (side != Side::InnerRight) piece(x_left_, Real(0), true, true);
        if (side != Side::InnerLeft) piece(Real(0), x_right_, true, true);
        return;
    }
    if (h < 0) {
        if (side == Side::Outer) throw LevelOutOfRange("outer ovals need h > 0");
        const bool right = side == Side::InnerRight;
        const Real lo = right ? Real(0) : x_left_;
        const Real hi = right ? x_right_ : Real(0);
        const Real xc = find_min(lo, hi);
        if (h <= reduced(xc)) throw LevelOutOfRange("h below the center level");
        // two crossings only
        int changes = 0;
        const int n = 400;
        int prev = 0;
        for (int k = 0; k <= n; ++k) {
            const Real x = lo + (hi - lo) * k / n;
            const int s = reduced(x) - h > 0 ? 1 : -1;
            if (prev != 0 && s != prev) ++changes;
            prev = s;
        }
        if (changes != 2) throw TopologyError("level set is not a single oval on this side");
        piece(find_root(lo, xc, h), find_root(xc, hi, h), true, true);
        return;
    }
    if (side != Side::Outer) throw LevelOutOfRange("inner ovals need h < 0");
    auto outward = [&](const Real& start, int dir) {
        Real x = start;
        Real step = abs(start) * Real("0.01");
        for (int k = 0; k < 4000; ++k) {
            const Real nx = x + dir * step;
            if (reduced(nx) > h) return dir > 0 ? find_root(x, nx, h) : find_root(nx, x, h);
            x = nx;
            step *= Real("1.01");
        }
        throw LevelOutOfRange("no outer crossing found");
    };
    const Real xb = outward(x_right_, 1);
    const Real xa = outward(x_left_, -1);
    piece(xa, Real(0), true, false);
    piece(Real(0), xb, false, true);
}

Real LevelSet::U(const Real& x) const { return horner(u_, x); }

Real LevelSet::partial(const Real& x, const Real& y, int px, int py) const {
    Real sum = 0;
    for (const auto& [i, j, c] : hterms_) {
        if (i < px || j < py) continue;
        Real f = c;
        for (int k = 0; k < px; ++k) f *= (i - k);
        for (int k = 0; k < py; ++k) f *= (j - k);
        if (i > px) f *= pow(x, i - px);
        if (j > py) f *= pow(y, j - py);
        sum += f;
    }
    return sum;
}

Real LevelSet::critical_y(const Real& x) const {
    if (separable_) return Real(0);
    Real y = 0;
    const Real tol = eps_real() * 1000;
    for (int it = 0; it < 100; ++it) {
        const Real step = partial(x, y, 0, 1) / partial(x, y, 0, 2);
        y -= step;
        if (abs(step) <= tol * (1 + abs(y))) return y;
    }
    throw TopologyError("no critical point of H in y");
}

Real LevelSet::reduced(const Real& x) const {
    if (separable_) return U(x);
    return partial(x, critical_y(x), 0, 0);
}

// d/dx H(x, psi(x)) = H_x since H_y = 0 on psi
Real LevelSet::reduced_dx(const Real& x) const {
    if (separable_) {
        Real s = 0;
        for (size_t k = u_.size(); k-- > 1;) s = s * x + u_[k] * Real(static_cast<long>(k));
        return s;
    }
    return partial(x, critical_y(x), 1, 0);
}

Real LevelSet::find_root(const Real& lo0, const Real& hi0, const Real& target) const {
    Real lo = lo0, hi = hi0;
    const Real flo = reduced(lo) - target;
    const int slo = flo > 0 ? 1 : -1;
    if ((reduced(hi) - target > 0 ? 1 : -1) == slo) throw TopologyError("root not bracketed");
    for (int it = 0; it < 60; ++it) {
        const Real mid = (lo + hi) / 2;
        if ((reduced(mid) - target > 0 ? 1 : -1) == slo)
            lo = mid;
        else
            hi = mid;
    }
    Real x = (lo + hi) / 2;
    const Real tol = eps_real() * 100;
    for (int it = 0; it < 60; ++it) {
        const Real step = (reduced(x) - target) / reduced_dx(x);
        Real nx = x - step;
        if (nx < lo || nx > hi) break;
        x = nx;
        if (abs(step) <= tol * (abs(x) + 1)) break;
    }
    return x;
}

Real LevelSet::find_min(const Real& lo, const Real& hi) const {
    const int n = 400;
    Real best = lo + (hi - lo) / n;
    Real fbest = reduced(best);
    for (int k = 2; k < n; ++k) {
        const Real x = lo + (hi - lo) * k / n;
        const Real f = reduced(x);
        if (f < fbest) {
            fbest = f;
            best = x;
        }
    }
    // Newton on Phi' with Phi'' = H_xx - H_xy^2 / H_yy
    Real x = best;
    const Real tol = eps_real() * 100;
    for (int it = 0; it < 60; ++it) {
        const Real y = critical_y(x);
        const Real hyy = partial(x, y, 0, 2);
        const Real hxy = partial(x, y, 1, 1);
        const Real d2 = partial(x, y, 2, 0) - hxy * hxy / hyy;
        if (d2 <= 0) break;
        const Real step = reduced_dx(x) / d2;
        x -= step;
        if (abs(step) <= tol * (abs(x) + 1)) break;
    }
    if (x <= lo || x >= hi) throw TopologyError("center not found");
    return x;
}

void LevelSet::validate_double_loop() {
    auto scan = [&](int dir) {
        Real x = Real("1e-3") * dir;
        if (reduced(x) >= 0) throw TopologyError("H(x, psi(x)) is not negative next to the saddle");
        for (int k = 0; k < 2000; ++k) {
            const Real nx = x * Real("1.01");
            if (reduced(nx) >= 0) return dir > 0 ? find_root(x, nx, Real(0)) : find_root(nx, x, Real(0));
            x = nx;
        }
        throw TopologyError("loop does not close along the x-axis");
    };
    if (reduced(Real(0)) != 0) throw TopologyError("origin is not on H = 0");
    x_right_ = scan(1);
    x_left_ = scan(-1);
    if (reduced_dx(x_right_) <= 0 || reduced_dx(x_left_) >= 0)
        throw TopologyError("loop endpoints are not simple");
}

std::vector<Real> LevelSet::taylor_at(const Real& x) const {
    // coefficients of U(x + d) - U(x) for d^1, d^2, ...
    std::vector<Real> c(u_.begin(), u_.end());
    const size_t n = c.size();
    for (size_t i = 0; i + 1 < n; ++i)
        for (size_t k = n - 1; k > i; --k) c[k - 1] += x * c[k];
    if (!c.empty()) c.erase(c.begin());
    return c;
}

Real LevelSet::w_value(size_t k, const Real& x, const Real& da, const Real& db) const {
    const Piece& p = pieces_[k];
    Real w;
    if (p.meet0 && (da <= db || !p.meet1))
        w = -2 * taylor_sum(p.taylor0, da);
    else if (p.meet1 && (db < da || !p.meet0))
        w = -2 * taylor_sum(p.taylor1, -db);
    else
        w = 2 * (h_ - U(x));
    if (p.meet0 && p.meet1 && (da <= db ? da : db) > (p.x1 - p.x0) / 4) w = 2 * (h_ - U(x));
    return w < 0 ? Real(0) : w;
}

std::pair<Real, Real> LevelSet::branches(size_t k, const Real& x, const Real& da, const Real& db) const {
    if (separable_) {
        const Real s = sqrt(w_value(k, x, da, db));
        return {s, -s};
    }
    const Real psi = critical_y(x);
    Real delta = h_ - partial(x, psi, 0, 0);
    if (delta < 0) delta = 0;
    const Real d = sqrt(2 * delta / partial(x, psi, 0, 2));
    const Real tol = eps_real() * 1000;
    auto newton = [&](int sign) {
        Real y = psi + sign * d;
        const Real start = y;
        for (int it = 0; it < 80; ++it) {
            const Real hy = partial(x, y, 0, 1);
            if (hy == 0) break;
            const Real step = (partial(x, y, 0, 0) - h_) / hy;
            y -= step;
            if (abs(step) <= tol * (1 + abs(y))) break;
        }
        if (sign * (y - psi) < 0) return start;
        return y;
    };
    return {newton(1), newton(-1)};
}

// ---------------------------------------------------------------- integrands

namespace {

// (G(x, y_up) - G(x, y_lo)) on piece k
Real area_density(const LevelSet& ls, size_t k, const Terms& G, const Real& x, const Real& da, const Real& db) {
    auto [yu, yl] = ls.branches(k, x, da, db);
    return eval_terms(G, x, yu) - eval_terms(G, x, yl);
}

bool too_close_general(const LevelSet& ls, size_t k, const Real& da, const Real& db) {
    if (ls.separable()) return false;
    const auto& p = ls.pieces()[k];
    // Newton on the branches loses accuracy like eps / d next to a turning point
    const Real lim = pow(Real(10), -static_cast<int>(3 * Real::default_precision() / 4)) * (p.x1 - p.x0);
    return (p.meet0 && da < lim) || (p.meet1 && db < lim);
}

// g / |H_y| summed over both branches
Real time_density(const LevelSet& ls, size_t k, const Terms& g, const Real& x, const Real& da, const Real& db) {
    if (too_close_general(ls, k, da, db)) return Real(0);
    auto [yu, yl] = ls.branches(k, x, da, db);
    if (ls.separable()) {
        if (yu == 0) return Real(0);
        return (eval_terms(g, x, yu) + eval_terms(g, x, yl)) / yu;
    }
    const Real hu = abs(ls.partial(x, yu, 0, 1));
    const Real hl = abs(ls.partial(x, yl, 0, 1));
    if (hu == 0 || hl == 0) return Real(0);
    return eval_terms(g, x, yu) / hu + eval_terms(g, x, yl) / hl;
}

QuadResult over_pieces(const LevelSet& ls, const std::function<Real(size_t, const Real&, const Real&, const Real&)>& f,
                       const Real& tol) {
    QuadResult total;
    total.value = 0;
    total.error = 0;
    const size_t n = ls.pieces().size();
    for (size_t k = 0; k < n; ++k) {
        const auto& p = ls.pieces()[k];
        QuadResult r = tanh_sinh([&](const Real& x, const Real& da, const Real& db) { return f(k, x, da, db); }, p.x0,
                                 p.x1, tol / n, 12);
        total.value += r.value;
        total.error += r.error;
        total.levels = std::max(total.levels, r.levels);
        total.evaluations += r.evaluations;
    }
    if (!(total.error <= tol))
        throw NonConvergence("quadrature error " + to_decimal(total.error, 3) + " above " + to_decimal(tol, 3));
    return total;
}

void check_loop_integrand(const Poly2& g) {
    for (const auto& [ij, c] : g) {
        if (sgn(c) == 0) continue;
        if (ij == std::make_pair(0, 1)) throw DivergentIntegral("sigma_2 != 0: the loop time integral diverges");
        if (ij.first + 3 * ij.second < 3)
            throw SingularityOrderError("g does not vanish at the saddle to the needed order");
    }
}

} // namespace

QuadResult melnikov_value(const HamiltonianModel& H, const Real& h, Side side, const PerturbationPoly& pq,
                          const Real& tol) {
    const LevelSet ls(H, h, side);
    const Terms G = to_terms(divergence_antiderivative(pq));
    if (G.empty()) return QuadResult{Real(0), Real(0), 0, 0};
    return over_pieces(
        ls, [&](size_t k, const Real& x, const Real& da, const Real& db) { return area_density(ls, k, G, x, da, db); },
        tol);
}

QuadResult time_integral(const HamiltonianModel& H, const Real& h, Side side, const Poly2& g, const Real& tol) {
    if (h == 0) check_loop_integrand(g);
    const LevelSet ls(H, h, side);
    const Terms t = to_terms(g);
    if (t.empty()) return QuadResult{Real(0), Real(0), 0, 0};
    return over_pieces(
        ls, [&](size_t k, const Real& x, const Real& da, const Real& db) { return time_density(ls, k, t, x, da, db); },
        tol);
}

QuadResult figure_eight_time_integral(const HamiltonianModel& H, const Poly2& g, const Real& tol) {
    check_loop_integrand(g);
    const LevelSet ls(H, Real(0), Side::Outer);
    const Terms t = to_terms(g);
    if (t.empty()) return QuadResult{Real(0), Real(0), 0, 0};
    const Real hp = real_pi() / 2;

    // piece 0 is [x_left, 0], piece 1 is [0, x_right]; x = e sin(theta)
    auto lobe = [&](size_t k, int panels, int n) {
        const Real e = k == 0 ? ls.loop_left() : ls.loop_right();
        const Real ae = abs(e);
        std::vector<Real> nodes, weights;
        gauss_legendre(n, nodes, weights);
        Real sum = 0;
        for (int p = 0; p < panels; ++p) {
            const Real a = hp * p / panels;
            const Real b = hp * (p + 1) / panels;
            for (int i = 0; i < n; ++i) {
                const Real th = (a + b) / 2 + (b - a) / 2 * nodes[i];
                const Real st = sin(th);
                const Real half = (hp - th) / 2;
                const Real to_end = 2 * ae * sin(half) * sin(half);
                const Real to_saddle = ae * st;
                const Real x = e * st;
                const Real da = k == 0 ? to_end : to_saddle;
                const Real db = k == 0 ? to_saddle : to_end;
                sum += weights[i] * (b - a) / 2 * time_density(ls, k, t, x, da, db) * ae * cos(th);
            }
        }
        return sum;
    };
    const int n = 24;
    QuadResult r;
    Real prev = lobe(0, 2, n) + lobe(1, 2, n);
    for (int panels = 4; panels <= 512; panels *= 2) {
        const Real cur = lobe(0, panels, n) + lobe(1, panels, n);
        r.value = cur;
        r.error = abs(cur - prev);
        r.levels++;
        r.evaluations += 2L * panels * n;
        if (r.error <= tol) return r;
        prev = cur;
    }
    throw NonConvergence("figure-eight quadrature did not settle");
}

CIntegrals c_integrals(const HamiltonianModel& H, const PerturbationPoly& pq, const Real& tol) {
    CIntegrals c;
    if (sgn(pq.sigma()[2]) != 0) throw DivergentIntegral("sigma_2 != 0: the loop time integral diverges");
    const Poly2 g = c4_integrand(pq);
    const QuadResult m0 = melnikov_value(H, Real(0), Side::InnerRight, pq, tol);
    const QuadResult m0t = melnikov_value(H, Real(0), Side::InnerLeft, pq, tol);
    const QuadResult t41 = time_integral(H, Real(0), Side::InnerRight, g, tol);
    const QuadResult t41t = time_integral(H, Real(0), Side::InnerLeft, g, tol);
    const QuadResult t31 = figure_eight_time_integral(H, g, tol);
    c.c0 = m0.value;
    c.c0t = m0t.value;
    c.c41 = t41.value;
    c.c41t = t41t.value;
    c.c31s = t31.value;
    c.error = std::max({m0.error, m0t.error, t41.error, t41t.error, t31.error});
    return c;
}

// ---------------------------------------------------------------- tracing

namespace {

Oval trace_x_branch(const LevelSet& ls, int n_nodes) {
    Oval o;
    o.rule = OvalRule::XBranch;
    const Real xa = ls.x_min(), xb = ls.x_max();
    const Real r = (xb - xa) / 2;
    const Real pi = real_pi();
    const int m = std::max(4, n_nodes / 2);
    std::vector<Real> t, w;
    gauss_legendre(m, t, w);

    // branches at x given the distances to the oval ends
    auto at = [&](const Real& x, const Real& dmin, const Real& dmax) {
        const auto& ps = ls.pieces();
        if (ps.size() == 1) return ls.branches(0, x, dmin, dmax);
        if (x < 0) return ls.branches(0, x, dmin, -x);
        return ls.branches(1, x, x, dmax);
    };
    struct Sample {
        Real x, yu, yl, w;
    };
    std::vector<Sample> s;
    for (int i = 0; i < m; ++i) {
        const Real th = pi / 2 * (1 + t[i]);
        const Real sh = sin(th / 2), ch = cos(th / 2);
        const Real dmin = 2 * r * sh * sh;
        const Real dmax = 2 * r * ch * ch;
        const Real x = xa + dmin;
        auto [yu, yl] = at(x, dmin, dmax);
        s.push_back({x, yu, yl, w[i] * pi / 2 * r * sin(th)});
    }
    auto end_y = [&](const Real& x) { return ls.critical_y(x); };
    o.nodes.push_back({xa, end_y(xa), Real(0), 1});
    for (const auto& q : s) o.nodes.push_back({q.x, q.yu, q.w, 1});
    o.nodes.push_back({xb, end_y(xb), Real(0), -1});
    for (auto it = s.rbegin(); it != s.rend(); ++it) o.nodes.push_back({it->x, it->yl, it->w, -1});
    o.nodes.push_back(o.nodes.front());
    return o;
}

// arc-length continuation, clockwise: tangent (H_y, -H_x) / |grad H|
Oval trace_continuation(const LevelSet& ls, int n_nodes) {
        const Real h = ls.level();
    Oval o;
    o.rule = OvalRule::ArcLength;
    const Real tol = eps_real() * 1000;

    auto project = [&](Real& x, Real& y) {
        for (int it = 0; it < 60; ++it) {
            const Real gx = ls.partial(x, y, 1, 0), gy = ls.partial(x, y, 0, 1);
            const Real g2 = gx * gx + gy * gy;
            const Real f = ls.partial(x, y, 0, 0) - h;
            x -= f * gx / g2;
            y -= f * gy / g2;
            if (abs(f) <= tol * (1 + abs(h)) * Real("1e-3")) return;
        }
    };
    // local step limit from |grad H| / |Hess H|
    auto limit = [&](const Real& x, const Real& y) {
        const Real gx = ls.partial(x, y, 1, 0), gy = ls.partial(x, y, 0, 1);
        const Real hn = abs(ls.partial(x, y, 2, 0)) + 2 * abs(ls.partial(x, y, 1, 1)) + abs(ls.partial(x, y, 0, 2));
        return Real("0.05") * sqrt(gx * gx + gy * gy) / hn;
    };
    auto step = [&](Real& x, Real& y, const Real& ds) {
        // midpoint predictor, Newton corrector
        auto tangent = [&](const Real& px, const Real& py) {
            const Real gx = ls.partial(px, py, 1, 0), gy = ls.partial(px, py, 0, 1);
            const Real n = sqrt(gx * gx + gy * gy);
            return std::make_pair(gy / n, -gx / n);
        };
        auto [tx, ty] = tangent(x, y);
        Real mx = x + ds / 2 * tx, my = y + ds / 2 * ty;
        auto [ux, uy] = tangent(mx, my);
        x += ds * ux;
        y += ds * uy;
        project(x, y);
    };

    const Real x0 = ls.x_max();
    const Real y0 = ls.critical_y(x0);
    // first pass: perimeter
    const Real base = (ls.x_max() - ls.x_min()) / (8 * n_nodes);
    Real x = x0, y = y0, length = 0;
    bool left_start = false;
    for (long k = 0; k < 10000000; ++k) {
        Real ds = std::min(base, limit(x, y));
        const Real dist = sqrt((x - x0) * (x - x0) + (y - y0) * (y - y0));
        if (left_start && dist <= ds) {
            length += dist;
            break;
        }
        const Real px = x, py = y;
        step(x, y, ds);
        length += sqrt((x - px) * (x - px) + (y - py) * (y - py));
        if (dist > 4 * base) left_start = true;
        if (k == 9999999) throw NonConvergence("continuation did not close");
    }
    // second pass: nodes every length / n_nodes
    const Real spacing = length / n_nodes;
    x = x0;
    y = y0;
    o.nodes.push_back({x, y, Real(0), 1});
    for (int i = 1; i < n_nodes; ++i) {
        Real remaining = spacing;
        while (remaining > spacing * Real("1e-12")) {
            const Real ds = std::min(remaining, limit(x, y));
            const Real px = x, py = y;
            step(x, y, ds);
            remaining -= sqrt((x - px) * (x - px) + (y - py) * (y - py));
        }
        o.nodes.push_back({x, y, Real(0), ls.partial(x, y, 0, 1) >= 0 ? 1 : -1});
    }
    o.nodes.push_back(o.nodes.front());
    const size_t n = o.nodes.size();
    for (size_t i = 0; i + 1 < n; ++i) {
        const Real dx = o.nodes[i + 1].x - o.nodes[i].x, dy = o.nodes[i + 1].y - o.nodes[i].y;
        const Real half = sqrt(dx * dx + dy * dy) / 2;
        o.nodes[i].weight += half;
        o.nodes[i + 1 == n - 1 ? 0 : i + 1].weight += half;
    }
    o.nodes.back().weight = 0;
    return o;
}

} // namespace

Oval trace_oval(const HamiltonianModel& H, const Real& h, Side side, int n_nodes) {
    if (h == 0) throw LevelOutOfRange("h = 0 is the loop itself");
    if (n_nodes < 8) throw std::invalid_argument("need at least 8 nodes");
    const LevelSet ls(H, h, side);
    Oval o = ls.separable() ? trace_x_branch(ls, n_nodes) : trace_continuation(ls, n_nodes);
    o.H = H;
    o.h = h;
    o.side = side;
    o.x_min = ls.x_min();
    o.x_max = ls.x_max();
    o.residual = 0;
    for (const auto& nd : o.nodes) o.residual = std::max(o.residual, Real(abs(H.value(nd.x, nd.y) - h)));
    return o;
}

Real melnikov_integral(const Oval& oval, const PerturbationPoly& pq) {
    Real sum = 0;
    if (oval.rule == OvalRule::XBranch) {
        const Terms G = to_terms(divergence_antiderivative(pq));
        for (const auto& nd : oval.nodes)
            if (nd.weight != 0) sum += nd.branch * nd.weight * eval_terms(G, nd.x, nd.y);
        return sum;
    }
    // q dx - p dy = (q H_y + p H_x) / |grad H| ds
    for (const auto& nd : oval.nodes) {
        if (nd.weight == 0) continue;
        const Real gx = oval.H.dx(nd.x, nd.y), gy = oval.H.dy(nd.x, nd.y);
        sum += nd.weight * (pq.q(nd.x, nd.y) * gy + pq.p(nd.x, nd.y) * gx) / sqrt(gx * gx + gy * gy);
    }
    return sum;
}

} // namespace nilmel
