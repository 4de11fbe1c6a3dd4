#ifndef CLASSBOUND_SPLITTING_HPP
#define CLASSBOUND_SPLITTING_HPP

// Factorization patterns of integer polynomials modulo a prime:
// squarefree decomposition followed by distinct-degree factorization.

#include <gmpxx.h>

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "classbound/error.hpp"
#include "classbound/modular.hpp"

namespace classbound {

using ZPoly = std::vector<mpz_class>; // constant term first

struct SplittingType {
    std::uint64_t prime = 0;
    std::vector<int> factor_degrees;   // with multiplicity, ascending
    bool squarefree_mod_p = false;
    std::optional<int> residue_degree; // lcm of degrees; only when squarefree

    bool totally_split() const {
        return squarefree_mod_p && residue_degree && *residue_degree == 1;
    }
};

/// A rational prime with the residue degree of the primes above it.
struct PrimeSetEntry {
    std::uint64_t p = 0;
    int f = 1;
    friend bool operator==(const PrimeSetEntry&, const PrimeSetEntry&) = default;
};

namespace detail {

using modular::FpPoly;
using modular::u64;

/// Degrees of the irreducible factors of a monic squarefree g.
inline std::vector<int> distinct_degree(FpPoly g, u64 p) {
    std::vector<int> degrees;
    const FpPoly x{0, 1};
    FpPoly h = modular::rem(x, g, p);
    for (int d = 1; modular::degree(g) >= 2 * d; ++d) {
        h = modular::powmod(h, p, g, p);
        FpPoly common = modular::gcd(g, modular::sub(h, x, p), p);
        const int dc = modular::degree(common);
        if (dc > 0) {
            for (int k = 0; k < dc / d; ++k) degrees.push_back(d);
            g = modular::divrem(g, common, p).first;
            h = modular::rem(h, g, p);
        }
    }
    if (modular::degree(g) > 0) degrees.push_back(modular::degree(g));
    return degrees;
}

/// Squarefree factorization of a monic polynomial: (factor, multiplicity).
inline std::vector<std::pair<FpPoly, int>> squarefree_parts(const FpPoly& f, u64 p) {
    std::vector<std::pair<FpPoly, int>> out;
    if (modular::degree(f) < 1) return out;
    FpPoly c = modular::gcd(f, modular::derivative(f, p), p);
    FpPoly w = modular::divrem(f, c, p).first;
    int i = 1;
    while (modular::degree(w) > 0) {
        FpPoly y = modular::gcd(w, c, p);
        FpPoly fac = modular::divrem(w, y, p).first;
        if (modular::degree(fac) > 0) out.emplace_back(modular::make_monic(fac, p), i);
        w = std::move(y);
        c = modular::divrem(c, w, p).first;
        ++i;
    }
    if (modular::degree(c) > 0) {
        // c is a p-th power: take the root coefficientwise (a^p = a in F_p).
        FpPoly root;
        for (std::size_t k = 0; k < c.size(); k += p) root.push_back(c[k]);
        modular::trim(root);
        for (auto& [g, m] : squarefree_parts(modular::make_monic(root, p), p))
            out.emplace_back(std::move(g), m * static_cast<int>(p));
    }
    return out;
}

inline FpPoly reduce_checked(const ZPoly& poly, u64 p) {
    if (poly.size() < 2) throw invalid_input("splitting type needs a polynomial of degree >= 1");
    if (!modular::is_prime_u64(p)) throw invalid_input(std::to_string(p) + " is not prime");
    if (poly.size() > 1 && modular::reduce(poly.back(), p) == 0)
        throw arithmetic_error(std::to_string(p) + " divides the leading coefficient");
    return modular::make_monic(modular::reduce_poly(poly, p), p);
}

} // namespace detail

/// Factorization pattern of `poly` mod p.
inline SplittingType splitting_type(const ZPoly& poly, std::uint64_t p) {
    const auto f = detail::reduce_checked(poly, p);
    SplittingType st;
    st.prime = p;
    const auto g = modular::gcd(f, modular::derivative(f, p), p);
    st.squarefree_mod_p = modular::degree(g) == 0;
    for (const auto& [part, mult] : detail::squarefree_parts(f, p)) {
        for (int d : detail::distinct_degree(part, p))
            for (int k = 0; k < mult; ++k) st.factor_degrees.push_back(d);
    }
    std::sort(st.factor_degrees.begin(), st.factor_degrees.end());
    if (st.squarefree_mod_p) {
        int l = 1;
        for (int d : st.factor_degrees) l = std::lcm(l, d);
        st.residue_degree = l;
    }
    return st;
}

/// True iff poly splits into distinct linear factors mod p. Throws when p
/// divides the discriminant; use splitting_type there.
inline bool is_totally_split(const ZPoly& poly, std::uint64_t p) {
    const auto f = detail::reduce_checked(poly, p);
    if (modular::degree(modular::gcd(f, modular::derivative(f, p), p)) != 0)
        throw arithmetic_error(std::to_string(p) + " divides the discriminant (ramified); use splitting_type");
    const modular::FpPoly x = modular::rem({0, 1}, f, p);
    return modular::powmod(x, p, f, p) == x;
}

} // namespace classbound

#endif // CLASSBOUND_SPLITTING_HPP
