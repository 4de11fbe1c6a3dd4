#ifndef CLASSBOUND_ROOTS_HPP
#define CLASSBOUND_ROOTS_HPP

// Complex root isolation for integer polynomials.
//
// Approximations come from Aberth-Ehrlich iteration (double precision first,
// then MPFR). Each approximation z_i is certified with the Weierstrass
// inclusion disk of radius n |f(z_i)| / |lc(f) prod_{j != i} (z_i - z_j)|,
// evaluated in interval arithmetic. When the disks are pairwise disjoint each
// one contains exactly one root.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "classbound/error.hpp"
#include "classbound/mp.hpp"

namespace classbound {

/// One root, as a disk center + radius. Real roots have im == 0.
struct RootEnclosure {
    mp::Real re, im, radius;
    bool is_real = false;

    /// Axis-aligned box containing the disk.
    mp::ComplexInterval box(mp::prec_t prec) const {
        mp::ComplexInterval z(mp::Interval::ball(re, radius, prec), mp::Interval::ball(im, radius, prec));
        if (is_real) z.im = mp::Interval(0L, prec);
        return z;
    }
};

struct RootIsolation {
    std::vector<RootEnclosure> real_roots;    // ascending
    std::vector<RootEnclosure> complex_roots; // one per conjugate pair, Im > 0
    mp::prec_t precision = mp::default_precision;

    /// Largest certified radius.
    mp::Real max_radius() const {
        mp::Real m(precision);
        for (const auto* v : {&real_roots, &complex_roots})
            for (const auto& r : *v)
                if (r.radius > m) m = r.radius;
        return m;
    }
};

namespace detail {

struct Complex {
    mp::Real re, im;
    explicit Complex(mp::prec_t p) : re(p), im(p) {}
    Complex(mp::Real r, mp::Real i) : re(std::move(r)), im(std::move(i)) {}
};

inline Complex cmul(const Complex& a, const Complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline Complex cdiv(const Complex& a, const Complex& b) {
    mp::Real d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
inline Complex csub(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
inline Complex cadd(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }

/// f(z) and f'(z) by Horner.
inline void horner(const std::vector<mp::Real>& coeffs, const Complex& z, Complex& f, Complex& df) {
    const mp::prec_t p = z.re.precision();
    f = Complex(p);
    df = Complex(p);
    for (std::size_t k = coeffs.size(); k-- > 0;) {
        df = cadd(cmul(df, z), f);
        f = cmul(f, z);
        f.re += coeffs[k];
    }
}

inline std::vector<std::complex<double>> aberth_double(const std::vector<mpz_class>& poly) {
    const int n = static_cast<int>(poly.size()) - 1;
    std::vector<double> c(poly.size());
    for (std::size_t i = 0; i < poly.size(); ++i) c[i] = poly[i].get_d();
    // Start on a circle whose radius is the geometric mean root modulus.
    const double lead = std::abs(c[n]);
    const double r0 = std::max(std::pow(std::abs(c[0]) / lead, 1.0 / n), 0.5);
    std::vector<std::complex<double>> z(n);
    for (int k = 0; k < n; ++k)
        z[k] = std::polar(r0, 2 * std::numbers::pi * k / n + 0.4);
    for (int iter = 0; iter < 2000; ++iter) {
        double worst = 0;
        for (int i = 0; i < n; ++i) {
            std::complex<double> f = 0, df = 0;
            for (int k = n; k >= 0; --k) {
                df = df * z[i] + f;
                f = f * z[i] + c[k];
            }
            if (f == 0.0) continue;
            const std::complex<double> ratio = f / df;
            std::complex<double> s = 0;
            for (int j = 0; j < n; ++j)
                if (j != i) s += 1.0 / (z[i] - z[j]);
            const std::complex<double> w = ratio / (1.0 - ratio * s);
            if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) continue;
            z[i] -= w;
            worst = std::max(worst, std::abs(w) / std::max(1.0, std::abs(z[i])));
        }
        if (worst < 1e-14) break;
    }
    return z;
}

} // namespace detail

namespace detail {

/// Aberth sweeps at precision wp until each correction is below 2^-(wp-16)
/// relative, or stops shrinking (the evaluation noise floor).
inline void polish(const std::vector<mpz_class>& poly, std::vector<Complex>& z, mp::prec_t wp) {
    const int n = static_cast<int>(poly.size()) - 1;
    std::vector<mp::Real> coeffs;
    for (const auto& a : poly) coeffs.emplace_back(a, wp);
    for (auto& c : z) {
        c.re = c.re.with_precision(wp);
        c.im = c.im.with_precision(wp);
    }
    mp::Real tol(1L, wp), near(1L, wp);
    mpfr_mul_2si(tol.get(), tol.get(), -static_cast<long>(wp) + 16, MPFR_RNDN);
    mpfr_mul_2si(near.get(), near.get(), -static_cast<long>(wp) / 2, MPFR_RNDN);
    const mp::Real one(1L, wp);
    std::vector<char> frozen(n, 0);
    std::vector<mp::Real> last(n, mp::Real(wp));
    std::vector<int> stalls(n, 0);
    for (int iter = 0; iter < 200; ++iter) {
        bool active = false;
        for (int i = 0; i < n; ++i) {
            if (frozen[i]) continue;
            active = true;
            Complex f(wp), df(wp);
            horner(coeffs, z[i], f, df);
            if (f.re.is_zero() && f.im.is_zero()) { frozen[i] = 1; continue; }
            Complex ratio = cdiv(f, df);
            Complex s(wp);
            for (int j = 0; j < n; ++j) {
                if (j == i) continue;
                Complex d = csub(z[i], z[j]);
                mp::Real den = d.re * d.re + d.im * d.im;
                s.re += d.re / den;
                s.im -= d.im / den;
            }
            Complex w = cdiv(ratio, csub(Complex(one, mp::Real(wp)), cmul(ratio, s)));
            if (!w.re.is_finite() || !w.im.is_finite()) continue;
            z[i] = csub(z[i], w);
            mp::Real size = mp::sqrt(w.re * w.re + w.im * w.im);
            mp::Real scale = mp::sqrt(z[i].re * z[i].re + z[i].im * z[i].im);
            if (scale < one) scale = one;
            if (size < tol * scale) { frozen[i] = 1; continue; }
            if (iter > 0 && size < near * scale && size * mp::Real(2L, wp) > last[i]) {
                if (++stalls[i] >= 3) frozen[i] = 1;
            } else {
                stalls[i] = 0;
            }
            last[i] = size;
        }
        if (!active) break;
    }
}

/// Weierstrass radii for the given centers; empty when two centers coincide.
inline std::vector<mp::Real> inclusion_radii(const std::vector<mpz_class>& poly,
                                             const std::vector<mp::ComplexInterval>& centers, mp::prec_t wp) {
    const int n = static_cast<int>(poly.size()) - 1;
    std::vector<mp::Interval> coeff_iv;
    for (const auto& a : poly) coeff_iv.emplace_back(a, wp);
    const mp::Interval lead(poly.back(), wp);
    std::vector<mp::Real> radii;
    for (int i = 0; i < n; ++i) {
        mp::ComplexInterval f(wp);
        for (int k = n; k >= 0; --k) {
            f = f * centers[i];
            f.re = f.re + coeff_iv[k];
        }
        mp::ComplexInterval prod(lead, mp::Interval(0L, wp));
        for (int j = 0; j < n; ++j)
            if (j != i) prod = prod * (centers[i] - centers[j]);
        const mp::Interval pn = prod.norm_sqr();
        if (!pn.positive()) return {};
        const mp::Interval ratio = sqrt(f.norm_sqr() / pn);
        mp::Real r(wp);
        mpfr_mul_ui(r.get(), ratio.hi().get(), static_cast<unsigned long>(n), MPFR_RNDU);
        radii.push_back(std::move(r));
    }
    return radii;
}

} // namespace detail

/// Certified isolation of all complex roots of a squarefree integer
/// polynomial. Working precision is raised until every inclusion radius is
/// below 2^-prec (relative to max(1, |root|)); throws a precision error if
/// that fails or the disks cannot be separated. A zero cap means
/// max(8192, 4 * prec).
inline RootIsolation isolate_roots(const std::vector<mpz_class>& poly, mp::prec_t prec,
                                   mp::prec_t max_working_prec = 0) {
    using detail::Complex;
    const int n = static_cast<int>(poly.size()) - 1;
    if (n < 1 || poly.back() == 0) throw invalid_input("root isolation needs a polynomial of degree >= 1");

    std::vector<Complex> z;
    for (const auto& s : detail::aberth_double(poly)) z.emplace_back(mp::Real(s.real(), 64), mp::Real(s.imag(), 64));

    std::vector<RootEnclosure> roots(n);
    std::vector<mp::ComplexInterval> centers;
    // Centers carry a few guard bits beyond the target so that rounding them
    // does not by itself exhaust the radius budget.
    const mp::prec_t center_prec = prec + 32;
    if (max_working_prec == 0) max_working_prec = std::max<mp::prec_t>(8192, 4 * prec);
    mp::prec_t wp = prec + 64;
    for (;; wp *= 2) {
        if (wp > max_working_prec)
            throw precision_error("root isolation failed to reach " + std::to_string(prec) + "-bit radii");
        detail::polish(poly, z, wp);
        centers.clear();
        for (int i = 0; i < n; ++i) {
            roots[i].re = z[i].re.with_precision(center_prec);
            roots[i].im = z[i].im.with_precision(center_prec);
            centers.emplace_back(mp::Interval::point(roots[i].re, wp), mp::Interval::point(roots[i].im, wp));
        }
        auto radii = detail::inclusion_radii(poly, centers, wp);
        if (radii.empty()) continue;
        bool small = true;
        for (int i = 0; i < n; ++i) {
            mp::Real scale = mp::sqrt(roots[i].re * roots[i].re + roots[i].im * roots[i].im).with_precision(wp);
            if (scale < mp::Real(1L, wp)) scale = mp::Real(1L, wp);
            mpfr_mul_2si(scale.get(), scale.get(), -static_cast<long>(prec) + 2, MPFR_RNDN);
            if (radii[i] > scale) small = false;
            roots[i].radius = mp::Real(std::max<mp::prec_t>(prec, 53));
            mpfr_set(roots[i].radius.get(), radii[i].get(), MPFR_RNDU);
        }
        if (small) break;
    }

    // Pairwise disjointness.
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const mp::Interval d = sqrt((centers[i] - centers[j]).norm_sqr());
            mp::Real rsum(wp);
            mpfr_add(rsum.get(), roots[i].radius.get(), roots[j].radius.get(), MPFR_RNDU);
            if (!(d.lo() > rsum))
                throw precision_error("root inclusion disks overlap at " + std::to_string(prec) + " bits");
        }
    }

    // Classify: disks off the axis are complex; a disk touching the axis holds
    // a real root if its mirror image meets no other disk.
    RootIsolation out;
    out.precision = prec;
    int upper = 0, lower = 0;
    for (int i = 0; i < n; ++i) {
        auto& r = roots[i];
        mp::Real absim = mp::abs(r.im);
        if (absim > r.radius) {
            if (r.im.sign() > 0) {
                ++upper;
                out.complex_roots.push_back(r);
            } else {
                ++lower;
            }
            continue;
        }
        mp::ComplexInterval mirror(centers[i].re, -centers[i].im);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const mp::Interval d = sqrt((mirror - centers[j]).norm_sqr());
            mp::Real rsum(wp);
            mpfr_add(rsum.get(), roots[i].radius.get(), roots[j].radius.get(), MPFR_RNDU);
            if (!(d.lo() > rsum)) throw precision_error("cannot decide whether a root is real; raise precision");
        }
        // The root is real: fold |Im center| into the radius and drop it.
        mpfr_add(r.radius.get(), r.radius.get(), absim.get(), MPFR_RNDU);
        r.im = mp::Real(center_prec);
        r.is_real = true;
        out.real_roots.push_back(r);
    }
    if (upper != lower || static_cast<int>(out.real_roots.size()) + 2 * upper != n)
        throw precision_error("inconsistent conjugate pairing among isolated roots");

    std::sort(out.real_roots.begin(), out.real_roots.end(),
              [](const RootEnclosure& a, const RootEnclosure& b) { return a.re < b.re; });
    std::sort(out.complex_roots.begin(), out.complex_roots.end(), [](const RootEnclosure& a, const RootEnclosure& b) {
        if (!(a.re == b.re)) return a.re < b.re;
        return a.im < b.im;
    });
    return out;
}

} // namespace classbound

#endif // CLASSBOUND_ROOTS_HPP
