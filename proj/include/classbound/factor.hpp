#ifndef CLASSBOUND_FACTOR_HPP
#define CLASSBOUND_FACTOR_HPP

// Factorization of norms: trial division, then seeded Brent-Pollard rho on
// what is left.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <random>
#include <string>

#include "classbound/error.hpp"
#include "classbound/modular.hpp"

namespace classbound {

struct Factorization {
    std::map<mpz_class, int> factors; // prime -> exponent
    mpz_class cofactor = 1;           // unfactored composite part (1 when complete)
    bool complete = true;

    mpz_class product() const {
        mpz_class r = cofactor;
        for (const auto& [p, e] : factors) {
            mpz_class pe;
            mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(e));
            r *= pe;
        }
        return r;
    }
    /// The single prime when the factorization is p^e.
    bool is_prime_power() const { return complete && factors.size() == 1; }

    std::string to_string() const {
        std::string s;
        for (const auto& [p, e] : factors) {
            if (!s.empty()) s += " * ";
            s += p.get_str();
            if (e > 1) s += "^" + std::to_string(e);
        }
        if (!complete) s += (s.empty() ? "" : " * ") + std::string("(") + cofactor.get_str() + ")";
        return s.empty() ? "1" : s;
    }
};

/// Deterministic below 2^64; 64 Miller-Rabin rounds (GMP) above.
inline bool is_prime(const mpz_class& n) {
    if (n < 2) return false;
    if (mpz_fits_ulong_p(n.get_mpz_t())) return modular::is_prime_u64(n.get_ui());
    return mpz_probab_prime_p(n.get_mpz_t(), 64) != 0;
}

namespace detail {

/// A nontrivial factor of odd composite n, or 0 if the attempt budget runs out.
inline mpz_class brent_rho(const mpz_class& n, std::mt19937_64& rng, int attempts = 32) {
    for (int a = 0; a < attempts; ++a) {
        mpz_class c = mpz_class(static_cast<unsigned long>(rng() % 1000000 + 1));
        mpz_class y = mpz_class(static_cast<unsigned long>(rng() % 1000000 + 2)), x, ys, q = 1, g = 1;
        const auto step = [&](mpz_class& v) {
            v = v * v + c;
            mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
        };
        for (unsigned long r = 1; g == 1 && r < (1ul << 26); r *= 2) {
            x = y;
            for (unsigned long i = 0; i < r; ++i) step(y);
            for (unsigned long k = 0; k < r && g == 1; k += 128) {
                ys = y;
                for (unsigned long i = 0; i < std::min(128ul, r - k); ++i) {
                    step(y);
                    mpz_class d = x - y;
                    q = q * abs(d);
                    mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
                }
                mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            }
        }
        if (g == n) {
            // Backtrack one step at a time from the saved point.
            do {
                step(ys);
                mpz_class d = x - ys;
                d = abs(d);
                mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
            } while (g == 1);
        }
        if (g != n && g != 1) return g;
    }
    return 0;
}

inline void split_into(Factorization& out, const mpz_class& n, const mpz_class& limit, std::mt19937_64& rng) {
    if (n == 1) return;
    if (is_prime(n)) {
        ++out.factors[n];
        return;
    }
    if (n > limit) {
        out.cofactor *= n;
        out.complete = false;
        return;
    }
    // Perfect powers defeat rho's cycle structure less often than one
    // would like; peel them first.
    mpz_class root;
    for (unsigned long k = 2; k <= mpz_sizeinbase(n.get_mpz_t(), 2); ++k) {
        if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k) != 0) {
            Factorization sub;
            split_into(sub, root, limit, rng);
            for (const auto& [p, e] : sub.factors) out.factors[p] += e * static_cast<int>(k);
            if (!sub.complete) {
                mpz_class c;
                mpz_pow_ui(c.get_mpz_t(), sub.cofactor.get_mpz_t(), k);
                out.cofactor *= c;
                out.complete = false;
            }
            return;
        }
    }
    const mpz_class d = brent_rho(n, rng);
    if (d == 0) {
        out.cofactor *= n;
        out.complete = false;
        return;
    }
    split_into(out, d, limit, rng);
    split_into(out, n / d, limit, rng);
}

} // namespace detail

inline constexpr unsigned long trial_division_bound = 100000;

/// Trial division to 10^5, then rho on composite cofactors up to `limit`.
/// Larger composite cofactors are left in `cofactor` with complete = false.
inline Factorization factor_norm(const mpz_class& n, const mpz_class& limit, std::uint64_t seed = 1) {
    if (n < 1) throw invalid_input("factor_norm needs N >= 1");
    Factorization out;
    mpz_class m = n;
    static const auto small = modular::primes_up_to(trial_division_bound);
    for (const auto p : small) {
        if (m == 1) break;
        if (mpz_class(static_cast<unsigned long>(p)) * p > m) break;
        int e = 0;
        while (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), p);
            ++e;
        }
        if (e > 0) out.factors[mpz_class(static_cast<unsigned long>(p))] = e;
    }
    std::mt19937_64 rng(seed);
    detail::split_into(out, m, limit, rng);
    return out;
}

} // namespace classbound

#endif // CLASSBOUND_FACTOR_HPP
