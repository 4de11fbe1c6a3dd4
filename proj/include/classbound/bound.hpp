#ifndef CLASSBOUND_BOUND_HPP
#define CLASSBOUND_BOUND_HPP

// Class-number upper bound from the explicit formula with the test function
// F(x) = exp(-(x/c)^2) / cosh(x/2):
//
//   B = gamma + log(8 pi) - log rd - G(F) + 2 sum_{p in S} sum_m log p p^{-f m/2} F(f m log p)
//   G(F) = int_0^inf (1 - F(x)) / (2 sinh(x/2)) dx
//   h < 2 c sqrt(pi) / (n B)   when B > 0.
//
// Every quantity is an interval; the reported bound uses the adverse end of
// each constituent.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "classbound/error.hpp"
#include "classbound/field.hpp"
#include "classbound/factor.hpp"
#include "classbound/mp.hpp"
#include "classbound/splitting.hpp"
#include "classbound/taylor.hpp"

namespace classbound {

using mp::Interval;

inline const std::string zero_sum_assumption =
    "The sum over zeta zeros is omitted: the real part of Phi(s) is nonnegative in the critical strip, "
    "so dropping it only lowers B.";

/// F(x) for interval arguments.
inline Interval f_enclosure(const Interval& x, const Interval& c) {
    return exp(-sqr(x / c)) / cosh(x.scaled_2exp(-1));
}

enum class Rounding { down, up };

/// F(x) rounded in the requested direction.
inline mp::Real f_eval(const mp::Real& x, const mp::Real& c, Rounding dir, mp::prec_t prec = mp::default_precision) {
    if (x.sign() < 0) throw invalid_input("F is evaluated on x >= 0");
    if (c.sign() <= 0) throw invalid_input("c must be positive");
    const Interval v = f_enclosure(Interval::point(x, prec), Interval::point(c, prec));
    return dir == Rounding::down ? v.lo() : v.hi();
}

namespace detail {

inline constexpr int taylor_order = 16; // even

/// (cosh(x/2) - exp(-(x/c)^2)) / sinh(x), expanded at x.
inline taylor::Series integrand_series(const Interval& x, const Interval& inv_c2, int order) {
    const mp::prec_t p = x.precision();
    const auto half = taylor::cosh_sinh_scaled(x, Interval(1L, p).scaled_2exp(-1), order);
    const auto one = taylor::cosh_sinh_scaled(x, Interval(1L, p), order);
    const taylor::Series t = taylor::variable(x, order);
    const taylor::Series u = taylor::scale(taylor::mul(t, t), -inv_c2);
    return taylor::div(taylor::sub(half.first, taylor::exp(u)), one.second);
}

/// Enclosure of the integrand's integral over [a, b] (0 < a < b) by a
/// Taylor model of order taylor_order around the midpoint.
inline Interval panel_integral(const mp::Real& a, const mp::Real& b, const Interval& inv_c2, mp::prec_t prec) {
    const Interval ia = Interval::point(a, prec), ib = Interval::point(b, prec);
    const mp::Real m = Interval::hull(a, b, prec).mid();
    const Interval im = Interval::point(m, prec);
    const Interval ta = ia - im, tb = ib - im;
    const int K = taylor_order;
    const auto at_mid = integrand_series(im, inv_c2, K - 1);
    const auto over = integrand_series(Interval::hull(a, b, prec), inv_c2, K);

    Interval sum(0L, prec);
    Interval pa = ta, pb = tb; // t^{k+1}
    for (int k = 0; k <= K; ++k) {
        const Interval moment = (pb - pa) / Interval(static_cast<long>(k + 1), prec);
        sum += (k < K ? at_mid[k] : over[K]) * moment;
        pa = pa * ta;
        pb = pb * tb;
    }
    return sum;
}

/// Integral over [0, x0] from the sandwich
///   x (1/8 + 1/c^2 - x0^2/(2c^4)) / cosh(x0) <= g(x) <= x (cosh(x0/2)/8 + 1/c^2).
inline Interval near_zero_integral(const mp::Real& x0, const Interval& inv_c2, mp::prec_t prec) {
    const Interval ix0 = Interval::point(x0, prec);
    const Interval eighth = Interval(1L, prec).scaled_2exp(-3);
    const Interval half_x02 = sqr(ix0).scaled_2exp(-1);
    const Interval upper = (cosh(ix0.scaled_2exp(-1)) * eighth + inv_c2) * half_x02;
    const Interval lower_rate = (eighth + inv_c2 - half_x02 * sqr(inv_c2)) / cosh(ix0);
    mp::Real lo = (lower_rate * half_x02).lo();
    if (lo.sign() < 0) lo = mp::Real(0L, prec);
    return Interval::hull(lo, upper.hi(), prec);
}

/// int_{xt}^inf (1 - F) / (2 sinh(x/2)) dx lies in [(1 - F(xt)) T, T],
/// T = log coth(xt/4).
inline Interval tail_integral(const mp::Real& xt, const Interval& c, mp::prec_t prec) {
    const Interval q = Interval::point(xt, prec).scaled_2exp(-2);
    const Interval t = log(cosh(q) / sinh(q));
    const Interval one_minus_f = Interval(1L, prec) - f_enclosure(Interval::point(xt, prec), c);
    mp::Real lo = (one_minus_f * Interval::point(t.lo(), prec)).lo();
    if (lo.sign() < 0) lo = mp::Real(0L, prec);
    return Interval::hull(lo, t.hi(), prec);
}

inline mp::Real dyadic(long mantissa, long exponent, mp::prec_t prec) {
    mp::Real r(mantissa, prec);
    mpfr_mul_2si(r.get(), r.get(), exponent, MPFR_RNDN);
    return r;
}

inline long floor_log2(double v) { return static_cast<long>(std::floor(std::log2(v))); }

} // namespace detail

/// Validated enclosure of G(F) of width <= tolerance.
inline Interval g_integral(const mp::Real& c, double tolerance, mp::prec_t prec = mp::default_precision) {
    if (c.sign() <= 0) throw invalid_input("c must be positive");
    if (!(tolerance > 0)) throw invalid_input("tolerance must be positive");
    const Interval ic = Interval::point(c, prec);
    const Interval inv_c2 = Interval(1L, prec) / sqr(ic);
    const double cd = c.to_double();

    // Tail cut: smallest integer x_T >= 4 with T(x_T) < tolerance / 2.
    long xt = 4;
    Interval tail = detail::tail_integral(mp::Real(xt, prec), ic, prec);
    while (!(tail.hi().to_double() < tolerance / 2)) {
        ++xt;
        if (xt > 4000) throw precision_error("tail bound does not reach the tolerance");
        tail = detail::tail_integral(mp::Real(xt, prec), ic, prec);
    }

    // Piece at the origin; x0 dyadic and small compared with c.
    long e0 = -10 + std::min(0L, detail::floor_log2(cd));
    Interval head = detail::near_zero_integral(detail::dyadic(1, e0, prec), inv_c2, prec);
    while (!(head.width().to_double() < tolerance / 8)) {
        if (--e0 < -200) throw precision_error("tolerance unachievable near the origin at " + std::to_string(prec) + " bits");
        head = detail::near_zero_integral(detail::dyadic(1, e0, prec), inv_c2, prec);
    }

    // Panels: geometric up to 1/2, then uniform of dyadic width min(1/2, c/2).
    std::vector<std::pair<mp::Real, mp::Real>> panels;
    for (long e = e0; e < -1; ++e) panels.emplace_back(detail::dyadic(1, e, prec), detail::dyadic(1, e + 1, prec));
    const long he = std::min(-1L, detail::floor_log2(cd / 2));
    const long steps = static_cast<long>(std::ceil((static_cast<double>(xt) - 0.5) / std::ldexp(1.0, he)));
    for (long i = 0; i < steps; ++i) {
        const mp::Real a = detail::dyadic(1, -1, prec) + detail::dyadic(i, he, prec);
        mp::Real b = detail::dyadic(1, -1, prec) + detail::dyadic(i + 1, he, prec);
        if (b > mp::Real(xt, prec)) b = mp::Real(xt, prec);
        if (a < b) panels.emplace_back(a, b);
    }

    const double budget_per_unit = tolerance / 4 / static_cast<double>(xt);
    Interval body(0L, prec);
    std::vector<std::pair<mp::Real, mp::Real>> work(panels.rbegin(), panels.rend());
    // Depth-first with a stack; order of summation is the fixed left-to-right
    // order of the final panels, so the result does not depend on scheduling.
    std::vector<std::pair<std::pair<mp::Real, mp::Real>, Interval>> accepted;
    while (!work.empty()) {
        auto [a, b] = work.back();
        work.pop_back();
        const double w = (b - a).to_double();
        const Interval piece = detail::panel_integral(a, b, inv_c2, prec);
        if (piece.is_finite() && piece.width().to_double() <= budget_per_unit * w) {
            accepted.push_back({{a, b}, piece});
            continue;
        }
        if (w < std::ldexp(1.0, -40))
            throw precision_error("tolerance unachievable at " + std::to_string(prec) + " bits");
        const mp::Real m = Interval::hull(a, b, prec).mid();
        work.emplace_back(m, b);
        work.emplace_back(a, m);
    }
    for (const auto& [ab, piece] : accepted) body += piece;
    return head + body + tail;
}

/// 2 sum_{(p, f) in S} sum_{m >= 1} log p p^{-f m / 2} F(f m log p). Terms are
/// summed until one falls below tail_tolerance / (4 |S|); the rest is bounded
/// by a geometric series and added to the upper end only.
inline Interval prime_sum(const std::vector<PrimeSetEntry>& primes, const mp::Real& c, double tail_tolerance,
                          mp::prec_t prec = mp::default_precision) {
    if (c.sign() <= 0) throw invalid_input("c must be positive");
    const Interval ic = Interval::point(c, prec);
    mp::Real lo(0L, prec), hi(0L, prec);
    const double threshold = tail_tolerance / (4.0 * static_cast<double>(std::max<std::size_t>(1, primes.size())));
    for (const auto& [p, f] : primes) {
        if (p < 2 || f < 1) throw invalid_input("prime set entries need p >= 2 and f >= 1");
        const Interval logp = log(Interval(mpz_class(static_cast<unsigned long>(p)), prec));
        const Interval fl = Interval(static_cast<long>(f), prec);
        const Interval ratio = exp(-(fl * logp).scaled_2exp(-1)); // p^{-f/2}
        Interval power = ratio;
        for (long m = 1;; ++m) {
            const Interval arg = Interval(m, prec) * fl * logp;
            const Interval term = logp * power * f_enclosure(arg, ic);
            mpfr_add(lo.get(), lo.get(), term.lo().get(), MPFR_RNDD);
            mpfr_add(hi.get(), hi.get(), term.hi().get(), MPFR_RNDU);
            power = power * ratio;
            if (term.hi().to_double() < threshold || m >= 10000) {
                const Interval next = Interval(m + 1, prec) * fl * logp;
                const Interval tail = logp * f_enclosure(next, ic) * power / (Interval(1L, prec) - ratio);
                mpfr_add(hi.get(), hi.get(), tail.hi().get(), MPFR_RNDU);
                break;
            }
        }
    }
    return Interval::hull(lo, hi, prec).scaled_2exp(1);
}

// ---------------------------------------------------------------------------

struct BoundInputs {
    int degree = 0;
    std::optional<mpz_class> discriminant;       // exact, sign ignored
    std::optional<std::string> root_discriminant; // decimal literal
    std::vector<PrimeSetEntry> primes;
    std::set<std::uint64_t> ramified_primes;
    double tolerance = 1e-6;
    mp::prec_t precision = mp::default_precision;
};

inline void validate(const BoundInputs& in) {
    if (in.degree < 2 || in.degree % 2 != 0) throw invalid_input("degree must be a positive even integer (totally complex field)");
    if (in.discriminant.has_value() == in.root_discriminant.has_value())
        throw invalid_input("give exactly one of discriminant and root_discriminant");
    if (in.discriminant && *in.discriminant == 0) throw invalid_input("discriminant must be nonzero");
    if (!(in.tolerance > 0)) throw invalid_input("tolerance must be positive");
    std::set<std::uint64_t> seen;
    for (const auto& [p, f] : in.primes) {
        if (!modular::is_prime_u64(p)) throw invalid_input(std::to_string(p) + " in the prime set is not prime");
        if (f < 1) throw invalid_input("residue degree of " + std::to_string(p) + " must be >= 1");
        if (!seen.insert(p).second) throw invalid_input("prime " + std::to_string(p) + " listed twice");
        if (in.ramified_primes.count(p) || (in.discriminant && modular::reduce(*in.discriminant, p) == 0))
            throw invalid_input("prime " + std::to_string(p) + " is ramified and cannot be used");
    }
}

inline Interval log_root_discriminant(const BoundInputs& in, mp::prec_t prec) {
    if (in.discriminant) {
        const mpz_class d = abs(*in.discriminant);
        return log(Interval(d, prec)) / Interval(static_cast<long>(in.degree), prec);
    }
    const Interval rd = Interval::from_decimal(*in.root_discriminant, prec);
    if (!rd.is_finite() || !rd.positive()) throw invalid_input("root discriminant must be a positive decimal");
    return log(rd);
}

enum class BoundOutcome { bound, no_bound };

struct BoundReport {
    std::string c_text;
    mp::Real c;
    int degree = 0;
    mp::prec_t precision = mp::default_precision;
    double tolerance = 0;
    Interval gamma, log_8pi, log_rd, integral, prime_sum, b;
    BoundOutcome outcome = BoundOutcome::no_bound;
    mp::Real h_bound;                // upper end of 2 c sqrt(pi) / (n B_lower)
    std::optional<long> conclusion;  // h <= conclusion
    std::string assumption = zero_sum_assumption;

    const mp::Real& b_lower() const { return b.lo(); }
};

/// B and its constituents.
inline BoundReport compute_b(const BoundInputs& in, const mp::Real& c, std::string c_text = {}) {
    validate(in);
    if (c.sign() <= 0) throw invalid_input("c must be positive");
    const mp::prec_t prec = in.precision;
    BoundReport r;
    r.c = c;
    r.c_text = c_text.empty() ? c.to_fixed(6) : std::move(c_text);
    r.degree = in.degree;
    r.precision = prec;
    r.tolerance = in.tolerance;
    r.gamma = Interval::euler_gamma(prec);
    r.log_8pi = log(Interval(8L, prec) * Interval::pi(prec));
    r.log_rd = log_root_discriminant(in, prec);
    r.integral = g_integral(c, in.tolerance, prec);
    r.prime_sum = prime_sum(in.primes, c, in.tolerance, prec);
    r.b = r.gamma + r.log_8pi - r.log_rd - r.integral + r.prime_sum;
    return r;
}

/// B plus the class-number bound h < 2 c sqrt(pi) / (n B_lower).
inline BoundReport class_bound(const BoundInputs& in, const mp::Real& c, std::string c_text = {}) {
    BoundReport r = compute_b(in, c, std::move(c_text));
    const mp::prec_t prec = in.precision;
    if (r.b_lower().sign() <= 0) {
        r.outcome = BoundOutcome::no_bound;
        return r;
    }
    const Interval num = Interval(2L, prec) * Interval::point(c, prec) * sqrt(Interval::pi(prec));
    const Interval den = Interval(static_cast<long>(in.degree), prec) * Interval::point(r.b_lower(), prec);
    r.h_bound = (num / Interval::point(den.lo(), prec)).hi();
    mpz_class ceil;
    mpfr_get_z(ceil.get_mpz_t(), r.h_bound.get(), MPFR_RNDU);
    r.outcome = BoundOutcome::bound;
    r.conclusion = mpz_class(ceil - 1).get_si();
    return r;
}

/// Best report over a grid of c values: smallest h_bound, NO_BOUND last,
/// ties to the smaller c.
inline BoundReport scan_c(const BoundInputs& in, const std::vector<std::pair<mp::Real, std::string>>& grid) {
    if (grid.empty()) throw invalid_input("c grid is empty");
    std::optional<BoundReport> best;
    for (const auto& [c, text] : grid) {
        BoundReport r = class_bound(in, c, text);
        if (!best) {
            best = std::move(r);
            continue;
        }
        const bool rb = r.outcome == BoundOutcome::bound, bb = best->outcome == BoundOutcome::bound;
        bool better = false;
        if (rb && !bb) better = true;
        else if (rb == bb) {
            if (rb && r.h_bound < best->h_bound) better = true;
            else if ((!rb || r.h_bound == best->h_bound) && r.c < best->c) better = true;
        }
        if (better) best = std::move(r);
    }
    return std::move(*best);
}

// ---------------------------------------------------------------------------
// Request and report files.

struct BoundRequest {
    BoundInputs inputs;
    std::vector<std::pair<mp::Real, std::string>> c_values;
    bool grid = false;
};

inline std::string decimal_text(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    if (j.is_number()) {
        std::ostringstream os;
        os.precision(17);
        os << j.get<double>();
        return os.str();
    }
    throw invalid_input("expected a number or decimal string");
}

inline mp::Real parse_positive_decimal(const std::string& s, mp::prec_t prec, const std::string& what) {
    mp::Real v = mp::Real::from_string(s, prec);
    if (!v.is_finite() || v.sign() <= 0) throw invalid_input(what + " must be a positive number, got '" + s + "'");
    return v;
}

/// The 'c' or 'c_grid' member of a request; second is true for a grid.
inline std::pair<std::vector<std::pair<mp::Real, std::string>>, bool> c_values_from_json(const json& j, mp::prec_t prec) {
    if (j.contains("c") == j.contains("c_grid")) throw invalid_input("need exactly one of 'c' and 'c_grid'");
    std::vector<std::pair<mp::Real, std::string>> out;
    if (j.contains("c")) {
        const auto t = decimal_text(j.at("c"));
        out.emplace_back(parse_positive_decimal(t, prec, "c"), t);
        return {out, false};
    }
    for (const auto& v : j.at("c_grid")) {
        const auto t = decimal_text(v);
        out.emplace_back(parse_positive_decimal(t, prec, "c"), t);
    }
    if (out.empty()) throw invalid_input("c_grid is empty");
    return {out, true};
}

inline BoundRequest bound_request_from_json(const json& j, mp::prec_t prec) {
    if (!j.is_object()) throw invalid_input("bound request must be a JSON object");
    if (j.value("format_version", 0) != 1) throw invalid_input("bound request: unsupported format_version");
    BoundRequest r;
    r.inputs.precision = prec;
    r.inputs.degree = j.at("degree").get<int>();
    if (j.contains("discriminant")) r.inputs.discriminant = parse_integer(j.at("discriminant"));
    if (j.contains("root_discriminant")) r.inputs.root_discriminant = decimal_text(j.at("root_discriminant"));
    for (const auto& e : j.value("primes", json::array())) r.inputs.primes.push_back({e.at("p").get<std::uint64_t>(), e.at("f").get<int>()});
    for (const auto& p : j.value("ramified_primes", json::array())) r.inputs.ramified_primes.insert(p.get<std::uint64_t>());
    if (j.contains("tolerance")) r.inputs.tolerance = std::stod(decimal_text(j.at("tolerance")));
    std::tie(r.c_values, r.grid) = c_values_from_json(j, prec);
    validate(r.inputs);
    return r;
}

inline json interval_to_json(const Interval& v, int digits = 25) {
    return {{"lo", v.lo().to_fixed(digits, MPFR_RNDD)}, {"hi", v.hi().to_fixed(digits, MPFR_RNDU)}};
}

inline json bound_report_to_json(const BoundReport& r) {
    json j;
    j["format_version"] = 1;
    j["c"] = r.c_text;
    j["degree"] = r.degree;
    j["precision_bits"] = r.precision;
    j["tolerance"] = r.tolerance;
    j["constants"] = {{"euler_gamma", interval_to_json(r.gamma)},
                      {"log_8pi", interval_to_json(r.log_8pi)},
                      {"log_root_discriminant", interval_to_json(r.log_rd)},
                      {"rounding", "B_lower uses gamma.lo + log_8pi.lo - log_root_discriminant.hi - integral.hi + prime_sum.lo"}};
    j["integral_enclosure"] = interval_to_json(r.integral);
    j["prime_sum"] = interval_to_json(r.prime_sum);
    j["prime_sum_lower"] = r.prime_sum.lo().to_fixed(25, MPFR_RNDD);
    j["B_lower"] = r.b_lower().to_fixed(25, MPFR_RNDD);
    j["outcome"] = r.outcome == BoundOutcome::bound ? "BOUND" : "NO_BOUND";
    if (r.outcome == BoundOutcome::bound) {
        j["h_bound"] = r.h_bound.to_fixed(25, MPFR_RNDU);
        j["conclusion"] = {{"class_number_at_most", *r.conclusion}};
    }
    j["assumption"] = r.assumption;
    return j;
}

/// The five-constant ledger: each value rounded in its adverse direction.
inline std::string bound_report_text(const BoundReport& r, int digits = 5) {
    std::ostringstream os;
    const auto dn = [&](const mp::Real& x) { return x.to_fixed(digits, MPFR_RNDD); };
    const auto up = [&](const mp::Real& x) { return x.to_fixed(digits, MPFR_RNDU); };
    os << "c = " << r.c_text << ", n = " << r.degree << ", " << r.precision << " bits\n";
    os << "  gamma                 >= " << dn(r.gamma.lo()) << "\n";
    os << "  log(8 pi)             >= " << dn(r.log_8pi.lo()) << "\n";
    os << "  log rd                <= " << up(r.log_rd.hi()) << "\n";
    os << "  int (1-F)/(2sinh)     <= " << up(r.integral.hi()) << "\n";
    os << "  2 sum log p ... F     >= " << dn(r.prime_sum.lo()) << "\n";
    os << "  B                     >= " << dn(r.b_lower()) << "\n";
    if (r.outcome == BoundOutcome::bound)
        os << "  h < " << up(r.h_bound) << ", so h <= " << *r.conclusion << "\n";
    else
        os << "  NO_BOUND (B is not positive)\n";
    return os.str();
}

} // namespace classbound

#endif // CLASSBOUND_BOUND_HPP
