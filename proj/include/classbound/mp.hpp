#ifndef CLASSBOUND_MP_HPP
#define CLASSBOUND_MP_HPP

// Thin RAII layer over MPFR: a round-to-nearest Real for working-precision
// linear algebra, and an endpoint Interval with outward rounding for anything
// that has to be certified.

#include <mpfr.h>
#include <gmpxx.h>

#include <algorithm>
#include <cstdlib>
#include <ostream>
#include <string>
#include <utility>

#include "classbound/error.hpp"

namespace classbound::mp {

using prec_t = mpfr_prec_t;

inline constexpr prec_t default_precision = 128;

class Real {
public:
    explicit Real(prec_t prec = default_precision) {
        mpfr_init2(v_, prec);
        mpfr_set_zero(v_, 1);
    }
    Real(long x, prec_t prec) : Real(prec) { mpfr_set_si(v_, x, MPFR_RNDN); }
    Real(double x, prec_t prec) : Real(prec) { mpfr_set_d(v_, x, MPFR_RNDN); }
    Real(const mpz_class& x, prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN) : Real(prec) {
        mpfr_set_z(v_, x.get_mpz_t(), rnd);
    }
    Real(const mpq_class& x, prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN) : Real(prec) {
        mpfr_set_q(v_, x.get_mpq_t(), rnd);
    }
    Real(const Real& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Real(Real&& o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Real& operator=(Real&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Real() { mpfr_clear(v_); }

    static Real from_string(const std::string& s, prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN) {
        Real r(prec);
        if (mpfr_set_str(r.v_, s.c_str(), 10, rnd) != 0 && !mpfr_number_p(r.v_))
            throw invalid_input("not a decimal number: '" + s + "'");
        return r;
    }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    prec_t precision() const { return mpfr_get_prec(v_); }

    /// Re-round to a new precision (round to nearest).
    Real with_precision(prec_t prec, mpfr_rnd_t rnd = MPFR_RNDN) const {
        Real r(prec);
        mpfr_set(r.v_, v_, rnd);
        return r;
    }

    double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }
    mpz_class round_to_integer() const {
        mpz_class z;
        mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
        return z;
    }
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    /// Fixed-point decimal rendering, rounded in the requested direction.
    std::string to_fixed(int digits, mpfr_rnd_t rnd = MPFR_RNDN) const {
        char* buf = nullptr;
        const char* fmt = rnd == MPFR_RNDD ? "%.*RDf" : rnd == MPFR_RNDU ? "%.*RUf" : "%.*RNf";
        mpfr_asprintf(&buf, fmt, digits, v_);
        std::string s(buf);
        mpfr_free_str(buf);
        return s;
    }
    std::string to_sci(int digits, mpfr_rnd_t rnd = MPFR_RNDN) const {
        char* buf = nullptr;
        const char* fmt = rnd == MPFR_RNDD ? "%.*RDe" : rnd == MPFR_RNDU ? "%.*RUe" : "%.*RNe";
        mpfr_asprintf(&buf, fmt, digits, v_);
        std::string s(buf);
        mpfr_free_str(buf);
        return s;
    }

    Real& operator+=(const Real& o) { mpfr_add(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator-=(const Real& o) { mpfr_sub(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator*=(const Real& o) { mpfr_mul(v_, v_, o.v_, MPFR_RNDN); return *this; }
    Real& operator/=(const Real& o) { mpfr_div(v_, v_, o.v_, MPFR_RNDN); return *this; }

    /// this -= q * o, with q an exact integer.
    void submul(const mpz_class& q, const Real& o) {
        Real t(precision());
        mpfr_mul_z(t.v_, o.v_, q.get_mpz_t(), MPFR_RNDN);
        mpfr_sub(v_, v_, t.v_, MPFR_RNDN);
    }

    friend Real operator-(const Real& a) {
        Real r(a.precision());
        mpfr_neg(r.v_, a.v_, MPFR_RNDN);
        return r;
    }

#define CLASSBOUND_REAL_BINOP(op, fn)                                         \
    friend Real operator op(const Real& a, const Real& b) {                   \
        Real r(std::max(a.precision(), b.precision()));                       \
        fn(r.v_, a.v_, b.v_, MPFR_RNDN);                                      \
        return r;                                                             \
    }
    CLASSBOUND_REAL_BINOP(+, mpfr_add)
    CLASSBOUND_REAL_BINOP(-, mpfr_sub)
    CLASSBOUND_REAL_BINOP(*, mpfr_mul)
    CLASSBOUND_REAL_BINOP(/, mpfr_div)
#undef CLASSBOUND_REAL_BINOP

    friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_); }
    friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_); }
    friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_); }
    friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_); }
    friend bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.v_, b.v_); }

    friend std::ostream& operator<<(std::ostream& os, const Real& x) { return os << x.to_sci(20); }

private:
    mpfr_t v_;
};

inline Real abs(const Real& x) {
    Real r(x.precision());
    mpfr_abs(r.get(), x.get(), MPFR_RNDN);
    return r;
}
inline Real sqrt(const Real& x) {
    Real r(x.precision());
    mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
    return r;
}
inline Real sqr(const Real& x) {
    Real r(x.precision());
    mpfr_sqr(r.get(), x.get(), MPFR_RNDN);
    return r;
}
inline Real log2_abs(const Real& x) {
    Real r(x.precision());
    mpfr_abs(r.get(), x.get(), MPFR_RNDN);
    mpfr_log2(r.get(), r.get(), MPFR_RNDN);
    return r;
}

// ---------------------------------------------------------------------------

/// Closed interval [lo, hi] with outward-rounded arithmetic.
class Interval {
public:
    explicit Interval(prec_t prec = default_precision) : lo_(prec), hi_(prec) {}
    Interval(long x, prec_t prec) : lo_(x, prec), hi_(x, prec) {
        mpfr_set_si(lo_.get(), x, MPFR_RNDD);
        mpfr_set_si(hi_.get(), x, MPFR_RNDU);
    }
    Interval(const mpz_class& x, prec_t prec) : lo_(x, prec, MPFR_RNDD), hi_(x, prec, MPFR_RNDU) {}
    Interval(const mpq_class& x, prec_t prec) : lo_(x, prec, MPFR_RNDD), hi_(x, prec, MPFR_RNDU) {}

    /// Exact point (the Real is already representable).
    static Interval point(const Real& x, prec_t prec) {
        Interval r(prec);
        mpfr_set(r.lo_.get(), x.get(), MPFR_RNDD);
        mpfr_set(r.hi_.get(), x.get(), MPFR_RNDU);
        return r;
    }
    static Interval hull(const Real& lo, const Real& hi, prec_t prec) {
        Interval r(prec);
        mpfr_set(r.lo_.get(), lo.get(), MPFR_RNDD);
        mpfr_set(r.hi_.get(), hi.get(), MPFR_RNDU);
        if (r.hi_ < r.lo_) std::swap(r.lo_, r.hi_);
        return r;
    }
    /// Decimal literal, enclosed by directed parsing.
    static Interval from_decimal(const std::string& s, prec_t prec) {
        Interval r(prec);
        r.lo_ = Real::from_string(s, prec, MPFR_RNDD);
        r.hi_ = Real::from_string(s, prec, MPFR_RNDU);
        return r;
    }
    /// center +- radius
    static Interval ball(const Real& center, const Real& radius, prec_t prec) {
        Interval r(prec);
        mpfr_sub(r.lo_.get(), center.get(), radius.get(), MPFR_RNDD);
        mpfr_add(r.hi_.get(), center.get(), radius.get(), MPFR_RNDU);
        return r;
    }

    static Interval pi(prec_t prec) {
        Interval r(prec);
        mpfr_const_pi(r.lo_.get(), MPFR_RNDD);
        mpfr_const_pi(r.hi_.get(), MPFR_RNDU);
        return r;
    }
    static Interval euler_gamma(prec_t prec) {
        Interval r(prec);
        mpfr_const_euler(r.lo_.get(), MPFR_RNDD);
        mpfr_const_euler(r.hi_.get(), MPFR_RNDU);
        return r;
    }

    const Real& lo() const { return lo_; }
    const Real& hi() const { return hi_; }
    prec_t precision() const { return lo_.precision(); }

    Real width() const {
        Real w(precision());
        mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
        return w;
    }
    Real mid() const {
        Real m(precision() + 1);
        mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
        mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
        return m.with_precision(precision());
    }
    /// Upper bound on |x| over the interval.
    Real mag() const {
        Real a(precision()), b(precision());
        mpfr_abs(a.get(), lo_.get(), MPFR_RNDU);
        mpfr_abs(b.get(), hi_.get(), MPFR_RNDU);
        return a < b ? b : a;
    }
    /// Lower bound on |x| over the interval.
    Real mig() const {
        if (contains_zero()) return Real(precision());
        Real a(precision()), b(precision());
        mpfr_abs(a.get(), lo_.get(), MPFR_RNDD);
        mpfr_abs(b.get(), hi_.get(), MPFR_RNDD);
        return a < b ? a : b;
    }
    bool contains_zero() const { return lo_.sign() <= 0 && hi_.sign() >= 0; }
    bool contains(const Real& x) const { return lo_ <= x && x <= hi_; }
    bool contains(const Interval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
    bool is_finite() const { return lo_.is_finite() && hi_.is_finite(); }
    bool positive() const { return lo_.sign() > 0; }
    bool negative() const { return hi_.sign() < 0; }

    /// Widen by an absolute amount (upward rounded).
    Interval inflated(const Real& r) const {
        Interval out(precision());
        mpfr_sub(out.lo_.get(), lo_.get(), r.get(), MPFR_RNDD);
        mpfr_add(out.hi_.get(), hi_.get(), r.get(), MPFR_RNDU);
        return out;
    }
    Interval with_precision(prec_t prec) const {
        Interval r(prec);
        mpfr_set(r.lo_.get(), lo_.get(), MPFR_RNDD);
        mpfr_set(r.hi_.get(), hi_.get(), MPFR_RNDU);
        return r;
    }

    friend Interval operator+(const Interval& a, const Interval& b) {
        Interval r(std::max(a.precision(), b.precision()));
        mpfr_add(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
        mpfr_add(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
        return r;
    }
    friend Interval operator-(const Interval& a, const Interval& b) {
        Interval r(std::max(a.precision(), b.precision()));
        mpfr_sub(r.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
        mpfr_sub(r.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
        return r;
    }
    friend Interval operator-(const Interval& a) {
        Interval r(a.precision());
        mpfr_neg(r.lo_.get(), a.hi_.get(), MPFR_RNDD);
        mpfr_neg(r.hi_.get(), a.lo_.get(), MPFR_RNDU);
        return r;
    }
    friend Interval operator*(const Interval& a, const Interval& b) {
        const prec_t p = std::max(a.precision(), b.precision());
        Interval r(p);
        const mpfr_srcptr xs[2] = {a.lo_.get(), a.hi_.get()};
        const mpfr_srcptr ys[2] = {b.lo_.get(), b.hi_.get()};
        Real t(p);
        bool first = true;
        for (auto x : xs) {
            for (auto y : ys) {
                mpfr_mul(t.get(), x, y, MPFR_RNDD);
                if (first || t < r.lo_) mpfr_set(r.lo_.get(), t.get(), MPFR_RNDD);
                mpfr_mul(t.get(), x, y, MPFR_RNDU);
                if (first || t > r.hi_) mpfr_set(r.hi_.get(), t.get(), MPFR_RNDU);
                first = false;
            }
        }
        return r;
    }
    friend Interval operator/(const Interval& a, const Interval& b) {
        if (b.contains_zero()) throw arithmetic_error("interval division by an interval containing zero");
        const prec_t p = std::max(a.precision(), b.precision());
        Interval r(p);
        const mpfr_srcptr xs[2] = {a.lo_.get(), a.hi_.get()};
        const mpfr_srcptr ys[2] = {b.lo_.get(), b.hi_.get()};
        Real t(p);
        bool first = true;
        for (auto x : xs) {
            for (auto y : ys) {
                mpfr_div(t.get(), x, y, MPFR_RNDD);
                if (first || t < r.lo_) mpfr_set(r.lo_.get(), t.get(), MPFR_RNDD);
                mpfr_div(t.get(), x, y, MPFR_RNDU);
                if (first || t > r.hi_) mpfr_set(r.hi_.get(), t.get(), MPFR_RNDU);
                first = false;
            }
        }
        return r;
    }
    Interval& operator+=(const Interval& o) { return *this = *this + o; }
    Interval& operator-=(const Interval& o) { return *this = *this - o; }
    Interval& operator*=(const Interval& o) { return *this = *this * o; }

    /// Multiplication by a positive power of two (exact).
    Interval scaled_2exp(long e) const {
        Interval r(*this);
        mpfr_mul_2si(r.lo_.get(), lo_.get(), e, MPFR_RNDD);
        mpfr_mul_2si(r.hi_.get(), hi_.get(), e, MPFR_RNDU);
        return r;
    }

    friend Interval sqr(const Interval& a) {
        Interval r(a.precision());
        if (a.contains_zero()) {
            Real m = a.mag();
            mpfr_set_zero(r.lo_.get(), 1);
            mpfr_sqr(r.hi_.get(), m.get(), MPFR_RNDU);
        } else {
            Real lo = a.mig(), hi = a.mag();
            mpfr_sqr(r.lo_.get(), lo.get(), MPFR_RNDD);
            mpfr_sqr(r.hi_.get(), hi.get(), MPFR_RNDU);
        }
        return r;
    }
    friend Interval sqrt(const Interval& a) {
        if (a.lo_.sign() < 0) throw arithmetic_error("interval sqrt of a possibly negative value");
        Interval r(a.precision());
        mpfr_sqrt(r.lo_.get(), a.lo_.get(), MPFR_RNDD);
        mpfr_sqrt(r.hi_.get(), a.hi_.get(), MPFR_RNDU);
        return r;
    }
    friend Interval exp(const Interval& a) { return a.monotone(mpfr_exp); }
    friend Interval sinh(const Interval& a) { return a.monotone(mpfr_sinh); }
    friend Interval log(const Interval& a) {
        if (!a.positive()) throw arithmetic_error("interval log of a possibly nonpositive value");
        return a.monotone(mpfr_log);
    }
    friend Interval cosh(const Interval& a) {
        Interval r(a.precision());
        if (a.lo_.sign() >= 0) {
            mpfr_cosh(r.lo_.get(), a.lo_.get(), MPFR_RNDD);
            mpfr_cosh(r.hi_.get(), a.hi_.get(), MPFR_RNDU);
        } else if (a.hi_.sign() <= 0) {
            mpfr_cosh(r.lo_.get(), a.hi_.get(), MPFR_RNDD);
            mpfr_cosh(r.hi_.get(), a.lo_.get(), MPFR_RNDU);
        } else {
            Real m = a.mag();
            mpfr_set_ui(r.lo_.get(), 1, MPFR_RNDD);
            mpfr_cosh(r.hi_.get(), m.get(), MPFR_RNDU);
        }
        return r;
    }

    friend std::ostream& operator<<(std::ostream& os, const Interval& x) {
        return os << "[" << x.lo_.to_sci(17, MPFR_RNDD) << ", " << x.hi_.to_sci(17, MPFR_RNDU) << "]";
    }

private:
    template <class Fn>
    Interval monotone(Fn fn) const {
        Interval r(precision());
        fn(r.lo_.get(), lo_.get(), MPFR_RNDD);
        fn(r.hi_.get(), hi_.get(), MPFR_RNDU);
        return r;
    }

    Real lo_, hi_;
};

/// Rectangular complex enclosure.
struct ComplexInterval {
    Interval re, im;

    explicit ComplexInterval(prec_t prec = default_precision) : re(prec), im(prec) {}
    ComplexInterval(Interval r, Interval i) : re(std::move(r)), im(std::move(i)) {}

    prec_t precision() const { return re.precision(); }

    friend ComplexInterval operator+(const ComplexInterval& a, const ComplexInterval& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend ComplexInterval operator-(const ComplexInterval& a, const ComplexInterval& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend ComplexInterval operator*(const ComplexInterval& a, const ComplexInterval& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend ComplexInterval operator*(const Interval& a, const ComplexInterval& b) {
        return {a * b.re, a * b.im};
    }

    /// |z|^2
    Interval norm_sqr() const { return sqr(re) + sqr(im); }
};

} // namespace classbound::mp

#endif // CLASSBOUND_MP_HPP
