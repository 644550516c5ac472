#include "nilmel/constants.hpp"

#include <mutex>

#include "nilmel/quadrature.hpp"

namespace nilmel {

namespace {

// 1 - v^6 from the distance to 1, without cancellation
Real one_minus_v6(const Real& v, const Real& d1) {
    return d1 * (1 + v * (1 + v * (1 + v * (1 + v * (1 + v)))));
}

} // namespace

std::vector<std::pair<std::string, Real>> UniversalConstants::named() const {
    return {{"A0t", A0t}, {"A1t", A1t}, {"A3t", A3t}, {"A4t", A4t}, {"A0b", A0b}, {"A2b", A2b}, {"D1", D1}, {"D2", D2}};
}

bool UniversalConstants::signs_ok() const {
    return A0t < 0 && A1t < 0 && A3t > 0 && A4t > 0 && A0b > 0 && A2b < 0 && D1 > 0 && D2 > 0;
}

UniversalConstants compute_constants(unsigned digits) {
    if (digits < 10) throw std::invalid_argument("constants need digits >= 10");
    PrecisionScope prec(digits + 10);
    const Real tol = pow(Real(10), -static_cast<int>(digits) - 3);
    UniversalConstants c;
    c.digits = digits;

    auto finite = [&](auto&& g) {
        return tanh_sinh([&](const Real& v, const Real&, const Real& d1) { return g(v, one_minus_v6(v, d1)); }, Real(0),
                         Real(1), tol);
    };
    const auto i0 = finite([](const Real& v, const Real& w) { return v / sqrt(w); });
    const auto i1 = finite([](const Real&, const Real& w) { return 1 / sqrt(w); });
    const auto i3 = finite([](const Real& v, const Real& w) {
        const Real s = sqrt(w);
        return pow(v, 4) / (s * (1 + s));
    });
    const auto i4 = finite([](const Real& v, const Real& w) {
        const Real s = sqrt(w);
        return pow(v, 3) / (s * (1 + s));
    });
    const auto j0 = exp_sinh([](const Real& v) { return 1 / sqrt(1 + pow(v, 6)); }, Real(0), tol);
    const auto j2 = exp_sinh(
        [](const Real& v) {
            const Real s = sqrt(1 + pow(v, 6));
            return v / (s * (pow(v, 3) + s));
        },
        Real(0), tol);

    c.A0t = -Real(3) / 4 * i0.value;
    c.A1t = -Real(3) / 5 * i1.value;
    c.A3t = -Real(3) / 7 * (i3.value - 1);
    c.A4t = -Real(3) / 8 * (i4.value - Real(1) / 2);
    c.A0b = Real(3) / 4 * j0.value;
    c.A2b = -Real(3) / 8 * j2.value;
    c.D1 = abs(c.A0b) / abs(c.A0t);
    c.D2 = abs(c.A2b) / abs(c.A4t);

    const Real e0 = Real(3) / 4 * i0.error, e1 = Real(3) / 5 * i1.error, e3 = Real(3) / 7 * i3.error,
               e4 = Real(3) / 8 * i4.error, eb0 = Real(3) / 4 * j0.error, eb2 = Real(3) / 8 * j2.error;
    c.errors = {e0, e1, e3, e4, eb0, eb2, c.D1 * (e0 / abs(c.A0t) + eb0 / abs(c.A0b)),
                c.D2 * (e4 / abs(c.A4t) + eb2 / abs(c.A2b))};
    const Real target = pow(Real(10), -static_cast<int>(digits));
    const auto values = c.named();
    for (size_t k = 0; k < values.size(); ++k)
        if (c.errors[k] > target * abs(values[k].second))
            throw PrecisionNotMet(values[k].first + ": achieved error " + to_decimal(c.errors[k], 3));
    return c;
}

const UniversalConstants& default_constants() {
    static std::once_flag once;
    static UniversalConstants c;
    std::call_once(once, [] {
        PrecisionScope prec(50);
        c = compute_constants(40);
    });
    return c;
}

} // namespace nilmel
