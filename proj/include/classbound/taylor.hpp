#ifndef CLASSBOUND_TAYLOR_HPP
#define CLASSBOUND_TAYLOR_HPP

// Truncated Taylor series with interval coefficients. Evaluated at an
// interval argument X, coefficient k encloses f^(k)(x)/k! for every x in X,
// which is what the Lagrange remainder needs.

#include <vector>

#include "classbound/error.hpp"
#include "classbound/mp.hpp"

namespace classbound::taylor {

using mp::Interval;
using Series = std::vector<Interval>;

/// The identity function expanded at x: [x, 1, 0, ...].
inline Series variable(const Interval& x, int order) {
    const mp::prec_t p = x.precision();
    Series s(order + 1, Interval(0L, p));
    s[0] = x;
    if (order >= 1) s[1] = Interval(1L, p);
    return s;
}

inline Series add(const Series& a, const Series& b) {
    Series r(a.size(), Interval(a[0].precision()));
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] + b[k];
    return r;
}

inline Series sub(const Series& a, const Series& b) {
    Series r(a.size(), Interval(a[0].precision()));
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] - b[k];
    return r;
}

inline Series scale(const Series& a, const Interval& s) {
    Series r(a.size(), Interval(a[0].precision()));
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] * s;
    return r;
}

inline Series mul(const Series& a, const Series& b) {
    const mp::prec_t p = a[0].precision();
    Series r(a.size(), Interval(0L, p));
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t j = 0; j <= k; ++j) r[k] += a[j] * b[k - j];
    return r;
}

/// a / b; b[0] must exclude zero.
inline Series div(const Series& a, const Series& b) {
    if (b[0].contains_zero()) throw arithmetic_error("series division by an interval containing zero");
    Series q(a.size(), Interval(a[0].precision()));
    for (std::size_t k = 0; k < a.size(); ++k) {
        Interval s = a[k];
        for (std::size_t j = 1; j <= k; ++j) s -= b[j] * q[k - j];
        q[k] = s / b[0];
    }
    return q;
}

/// exp(u) via e_k = (1/k) sum_{j=1..k} j u_j e_{k-j}.
inline Series exp(const Series& u) {
    const mp::prec_t p = u[0].precision();
    Series e(u.size(), Interval(0L, p));
    e[0] = exp(u[0]);
    for (std::size_t k = 1; k < u.size(); ++k) {
        Interval s(0L, p);
        for (std::size_t j = 1; j <= k; ++j) s += Interval(static_cast<long>(j), p) * u[j] * e[k - j];
        e[k] = s / Interval(static_cast<long>(k), p);
    }
    return e;
}

/// cosh(a x) and sinh(a x) expanded at x, for a scalar a.
inline std::pair<Series, Series> cosh_sinh_scaled(const Interval& x, const Interval& a, int order) {
    const mp::prec_t p = x.precision();
    const Interval ax = a * x;
    const Interval ch = cosh(ax), sh = sinh(ax);
    Series c(order + 1, Interval(p)), s(order + 1, Interval(p));
    Interval factor(1L, p); // a^k / k!
    for (int k = 0; k <= order; ++k) {
        if (k > 0) factor = factor * a / Interval(static_cast<long>(k), p);
        c[k] = factor * (k % 2 == 0 ? ch : sh);
        s[k] = factor * (k % 2 == 0 ? sh : ch);
    }
    return {c, s};
}

} // namespace classbound::taylor

#endif // CLASSBOUND_TAYLOR_HPP
