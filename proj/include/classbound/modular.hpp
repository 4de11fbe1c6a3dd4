#ifndef CLASSBOUND_MODULAR_HPP
#define CLASSBOUND_MODULAR_HPP

// Word-size modular arithmetic: primality for 64-bit integers, dense
// polynomials over F_p, and the multimodular machinery (resultants and
// determinants recovered by CRT) used for exact norms.

#include <gmpxx.h>

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "classbound/error.hpp"

namespace classbound::modular {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

inline u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }
inline u64 addmod(u64 a, u64 b, u64 m) { u64 s = a + b; return (s >= m || s < a) ? s - m : s; }
inline u64 submod(u64 a, u64 b, u64 m) { return a >= b ? a - b : a + (m - b); }

inline u64 powmod(u64 base, u64 e, u64 m) {
    u64 r = 1 % m;
    base %= m;
    while (e) {
        if (e & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        e >>= 1;
    }
    return r;
}

/// Inverse modulo a prime (Fermat).
inline u64 invmod(u64 a, u64 p) {
    if (a % p == 0) throw arithmetic_error("inverse of zero modulo p");
    return powmod(a, p - 2, p);
}

/// Deterministic Miller-Rabin for all n < 2^64 (first twelve prime bases).
inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    static constexpr u64 small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (u64 p : small) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (u64 a : small) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { composite = false; break; }
        }
        if (composite) return false;
    }
    return true;
}

inline u64 reduce(const mpz_class& x, u64 p) {
    mpz_class r;
    mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), p);
    return r.get_ui();
}

inline std::vector<u64> primes_up_to(u64 limit) {
    std::vector<bool> composite(limit + 1, false);
    std::vector<u64> out;
    for (u64 i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (u64 j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
}

/// Distinct primes just below 2^62, largest first.
class LargePrimes {
public:
    u64 at(std::size_t i) {
        while (primes_.size() <= i) {
            do { cursor_ -= 2; } while (!is_prime_u64(cursor_));
            primes_.push_back(cursor_);
        }
        return primes_[i];
    }

private:
    u64 cursor_ = (u64{1} << 62) + 1;
    std::vector<u64> primes_;
};

// ---------------------------------------------------------------------------
// Dense polynomials over F_p, constant term first, no trailing zeros.

using FpPoly = std::vector<u64>;

inline void trim(FpPoly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}
inline int degree(const FpPoly& a) { return static_cast<int>(a.size()) - 1; }

inline FpPoly reduce_poly(const std::vector<mpz_class>& f, u64 p) {
    FpPoly r(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) r[i] = reduce(f[i], p);
    trim(r);
    return r;
}

inline FpPoly sub(const FpPoly& a, const FpPoly& b, u64 p) {
    FpPoly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = submod(r[i], b[i], p);
    trim(r);
    return r;
}

inline FpPoly mul(const FpPoly& a, const FpPoly& b, u64 p) {
    if (a.empty() || b.empty()) return {};
    std::vector<u128> acc(a.size() + b.size() - 1, 0);
    FpPoly r(acc.size());
    // Accumulate in 128 bits and reduce lazily: fine while p < 2^62 and
    // fewer than 16 products land in one slot between reductions.
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            acc[i + j] += static_cast<u128>(a[i]) * b[j];
            if (acc[i + j] >= (static_cast<u128>(1) << 124)) acc[i + j] %= p;
        }
    }
    for (std::size_t k = 0; k < acc.size(); ++k) r[k] = static_cast<u64>(acc[k] % p);
    trim(r);
    return r;
}

/// Remainder of a modulo b (b nonzero).
inline FpPoly rem(FpPoly a, const FpPoly& b, u64 p) {
    if (b.empty()) throw arithmetic_error("polynomial division by zero mod p");
    const int db = degree(b);
    const u64 inv_lc = invmod(b.back(), p);
    for (int i = degree(a); i >= db; --i) {
        const u64 q = mulmod(a[i], inv_lc, p);
        if (q == 0) continue;
        for (int j = 0; j <= db; ++j) a[i - db + j] = submod(a[i - db + j], mulmod(q, b[j], p), p);
    }
    a.resize(std::min<std::size_t>(a.size(), db));
    trim(a);
    return a;
}

/// Quotient and remainder.
inline std::pair<FpPoly, FpPoly> divrem(FpPoly a, const FpPoly& b, u64 p) {
    if (b.empty()) throw arithmetic_error("polynomial division by zero mod p");
    const int db = degree(b);
    if (degree(a) < db) return {FpPoly{}, a};
    FpPoly q(a.size() - db, 0);
    const u64 inv_lc = invmod(b.back(), p);
    for (int i = degree(a); i >= db; --i) {
        const u64 c = mulmod(a[i], inv_lc, p);
        q[i - db] = c;
        if (c == 0) continue;
        for (int j = 0; j <= db; ++j) a[i - db + j] = submod(a[i - db + j], mulmod(c, b[j], p), p);
    }
    a.resize(db);
    trim(a);
    trim(q);
    return {q, a};
}

inline FpPoly make_monic(FpPoly a, u64 p) {
    if (a.empty()) return a;
    const u64 inv = invmod(a.back(), p);
    for (auto& c : a) c = mulmod(c, inv, p);
    return a;
}

inline FpPoly gcd(FpPoly a, FpPoly b, u64 p) {
    while (!b.empty()) {
        FpPoly r = rem(std::move(a), b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return make_monic(std::move(a), p);
}

inline FpPoly derivative(const FpPoly& a, u64 p) {
    if (a.size() <= 1) return {};
    FpPoly d(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) d[i - 1] = mulmod(a[i], i % p, p);
    trim(d);
    return d;
}

/// base^e mod (modulus, p) by repeated squaring.
inline FpPoly powmod(FpPoly base, u64 e, const FpPoly& modulus, u64 p) {
    FpPoly result{1 % p};
    trim(result);
    base = rem(std::move(base), modulus, p);
    while (e) {
        if (e & 1) result = rem(mul(result, base, p), modulus, p);
        e >>= 1;
        if (e) base = rem(mul(base, base, p), modulus, p);
    }
    return result;
}

/// Res(a, b) over F_p, normalised as lc(a)^deg(b) * prod_{a(x)=0} b(x).
inline u64 resultant(FpPoly a, FpPoly b, u64 p) {
    trim(a);
    trim(b);
    if (a.empty() || b.empty()) return 0;
    u64 result = 1;
    while (true) {
        const int da = degree(a), db = degree(b);
        if (db == 0) return mulmod(result, powmod(b[0], static_cast<u64>(da), p), p);
        if (da == 0) return mulmod(result, powmod(a[0], static_cast<u64>(db), p), p);
        if (da < db) {
            // Res(a, b) = (-1)^{da db} Res(b, a)
            if ((da & 1) && (db & 1)) result = submod(0, result, p);
            std::swap(a, b);
            continue;
        }
        FpPoly r = rem(a, b, p);
        if (r.empty()) return 0;
        // Res(a, b) = (-1)^{da db} lc(b)^{da - dr} Res(b, r)
        const int dr = degree(r);
        if ((da & 1) && (db & 1)) result = submod(0, result, p);
        result = mulmod(result, powmod(b.back(), static_cast<u64>(da - dr), p), p);
        a = std::move(b);
        b = std::move(r);
    }
}

/// Determinant of a square matrix over F_p by Gaussian elimination.
inline u64 determinant(std::vector<std::vector<u64>> m, u64 p) {
    const std::size_t n = m.size();
    u64 det = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && m[piv][col] == 0) ++piv;
        if (piv == n) return 0;
        if (piv != col) {
            std::swap(m[piv], m[col]);
            det = submod(0, det, p);
        }
        det = mulmod(det, m[col][col], p);
        const u64 inv = invmod(m[col][col], p);
        for (std::size_t r = col + 1; r < n; ++r) {
            if (m[r][col] == 0) continue;
            const u64 f = mulmod(m[r][col], inv, p);
            for (std::size_t c = col; c < n; ++c) m[r][c] = submod(m[r][c], mulmod(f, m[col][c], p), p);
        }
    }
    return det;
}

/// Incremental CRT over pairwise coprime word moduli; value in symmetric range.
class CrtAccumulator {
public:
    void add(u64 residue, u64 modulus) {
        if (modulus_ == 1) {
            value_ = residue;
            modulus_ = modulus;
            return;
        }
        // value += modulus_ * ((residue - value) * modulus_^{-1} mod modulus)
        const u64 cur = reduce(value_, modulus);
        const u64 inv = invmod(reduce(modulus_, modulus), modulus);
        const u64 t = mulmod(submod(residue, cur, modulus), inv, modulus);
        value_ += modulus_ * mpz_class(static_cast<unsigned long>(t));
        modulus_ *= mpz_class(static_cast<unsigned long>(modulus));
    }
    /// Representative in (-M/2, M/2].
    mpz_class symmetric() const {
        mpz_class half = modulus_ / 2;
        return value_ > half ? value_ - modulus_ : value_;
    }
    std::size_t bits() const { return mpz_sizeinbase(modulus_.get_mpz_t(), 2); }

private:
    mpz_class value_ = 0;
    mpz_class modulus_ = 1;
};

/// Exact integer determinant via CRT, sized by the Hadamard bound.
inline mpz_class determinant(const std::vector<std::vector<mpz_class>>& m) {
    const std::size_t n = m.size();
    if (n == 0) return 1;
    // log2 of Hadamard bound: sum over rows of log2 ||row||_2, plus slack.
    double bound_bits = 2;
    for (const auto& row : m) {
        if (row.size() != n) throw invalid_input("determinant of a non-square matrix");
        mpz_class s = 0;
        for (const auto& x : row) s += x * x;
        if (s == 0) return 0;
        bound_bits += 0.5 * static_cast<double>(mpz_sizeinbase(s.get_mpz_t(), 2)) + 0.5;
    }
    LargePrimes primes;
    CrtAccumulator crt;
    for (std::size_t i = 0; static_cast<double>(crt.bits()) < bound_bits + 2; ++i) {
        const u64 p = primes.at(i);
        std::vector<std::vector<u64>> mp(n, std::vector<u64>(n));
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) mp[r][c] = reduce(m[r][c], p);
        crt.add(determinant(std::move(mp), p), p);
    }
    return crt.symmetric();
}

} // namespace classbound::modular

#endif // CLASSBOUND_MODULAR_HPP
