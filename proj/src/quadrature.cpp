#include "nilmel/quadrature.hpp"

#include <map>
#include <mutex>

namespace nilmel {

namespace {

Real half_pi() { return real_pi() / 2; }

// accumulated rounding of a sum whose absolute terms add up to `mass`
Real rounding_bound(const Real& mass) {
    return 10 * mass * pow(Real(10), -static_cast<int>(Real::default_precision()));
}

} // namespace

QuadResult tanh_sinh(const EndpointIntegrand& f, const Real& a, const Real& b, const Real& tol, int max_level) {
    const unsigned digits = Real::default_precision();
    const Real len = b - a;
    const Real mid = (a + b) / 2;
    const Real hp = half_pi();
    // far enough that (b - a) / (1 + e^{2s}) is below 10^{-4 digits}
    const Real t_max = asinh(Real(4 * digits) * log(Real(10)) / real_pi());
    const Real small = tol * Real("1e-12");

    QuadResult r;
    auto node = [&](const Real& t) -> Real {
        const Real s = hp * sinh(t);
        // the distance to the nearer end is formed directly, the other by subtraction
        Real da, db;
        if (t >= 0) {
            db = len / (1 + exp(2 * s));
            da = len - db;
        } else {
            da = len / (1 + exp(-2 * s));
            db = len - da;
        }
        if (db == 0 || da == 0) return Real(0);
        const Real x = t >= 0 ? b - db : a + da;
        const Real ch = cosh(s);
        const Real w = len / 2 * hp * cosh(t) / (ch * ch);
        ++r.evaluations;
        return w * f(x, da, db);
    };

    Real sum = node(Real(0));
    Real abs_sum = abs(sum);
    Real prev = 0;
    for (int level = 0; level <= max_level; ++level) {
        const Real h = ldexp(Real(1), -level);
        const int step = level == 0 ? 1 : 2;
        for (int dir = -1; dir <= 1; dir += 2) {
            int quiet = 0;
            for (long k = 1;; k += step) {
                const Real t = dir * h * k;
                if (abs(t) > t_max) break;
                const Real v = node(t);
                sum += v;
                abs_sum += abs(v);
                // smooth tails die double exponentially; stop after a run of negligible terms
                if (abs(t) > 1 && abs(v) < small) {
                    if (++quiet >= 4) break;
                } else {
                    quiet = 0;
                }
            }
        }
        const Real est = h * sum;
        r.levels = level;
        if (level > 0) {
            r.error = abs(est - prev) + rounding_bound(h * abs_sum);
            r.value = est;
            if (level >= 3 && r.error < tol) return r;
        }
        prev = est;
        r.value = est;
    }
    return r;
}

QuadResult exp_sinh(const std::function<Real(const Real& x)>& f, const Real& a, const Real& tol, int max_level) {
    const Real hp = half_pi();
    const Real t_max = 6;
    const Real small = tol * Real("1e-12");
    QuadResult r;
    auto node = [&](const Real& t) -> Real {
        const Real u = exp(hp * sinh(t));
        const Real w = hp * cosh(t) * u;
        ++r.evaluations;
        if (u == 0) return Real(0);
        return w * f(a + u);
    };
    Real sum = node(Real(0));
    Real abs_sum = abs(sum);
    Real prev = 0;
    for (int level = 0; level <= max_level; ++level) {
        const Real h = ldexp(Real(1), -level);
        const int step = level == 0 ? 1 : 2;
        for (int dir = -1; dir <= 1; dir += 2) {
            int quiet = 0;
            for (long k = 1;; k += step) {
                const Real t = dir * h * k;
                if (abs(t) > t_max) break;
                const Real v = node(t);
                sum += v;
                abs_sum += abs(v);
                if (abs(t) > 1 && abs(v) < small) {
                    if (++quiet >= 4) break;
                } else {
                    quiet = 0;
                }
            }
        }
        const Real est = h * sum;
        r.levels = level;
        r.value = est;
        if (level > 0) {
            r.error = abs(est - prev) + rounding_bound(h * abs_sum);
            if (level >= 3 && r.error < tol) return r;
        }
        prev = est;
    }
    return r;
}

void gauss_legendre(int n, std::vector<Real>& nodes, std::vector<Real>& weights) {
    static std::mutex mu;
    static std::map<std::pair<int, unsigned>, std::pair<std::vector<Real>, std::vector<Real>>> cache;
    const unsigned digits = Real::default_precision();
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, digits);
    if (auto it = cache.find(key); it != cache.end()) {
        nodes = it->second.first;
        weights = it->second.second;
        return;
    }
    nodes.assign(n, Real(0));
    weights.assign(n, Real(0));
    const Real pi = real_pi();
    const Real eps = pow(Real(10), -static_cast<int>(digits) + 2);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        Real x = cos(pi * (i + Real(0.75)) / (n + Real(0.5)));
        Real dp = 0;
        for (int it = 0; it < 100; ++it) {
            Real p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            const Real dx = p1 / dp;
            x -= dx;
            if (abs(dx) < eps) {
                // one more pass for the derivative at the final x
                p0 = 1;
                p1 = x;
                for (int k = 2; k <= n; ++k) {
                    Real p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1);
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2 / ((1 - x * x) * dp * dp);
    }
    cache[key] = {nodes, weights};
}

} // namespace nilmel
