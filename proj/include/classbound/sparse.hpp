#ifndef CLASSBOUND_SPARSE_HPP
#define CLASSBOUND_SPARSE_HPP

// Enumeration of sparse integer vectors: few nonzero coordinates drawn from a
// small coefficient set, one representative per {v, -v} pair.

#include <gmpxx.h>

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "classbound/error.hpp"

namespace classbound {

struct SparseCandidate {
    std::vector<int> support;       // ascending, 0-based basis indices
    std::vector<long> coefficients; // one per support index, nonzero

    friend bool operator==(const SparseCandidate&, const SparseCandidate&) = default;

    /// Display label with 1-based basis names, e.g. "c14 - c41".
    std::string label() const {
        std::string s;
        for (std::size_t i = 0; i < support.size(); ++i) {
            const long c = coefficients[i];
            const long a = std::labs(c);
            if (i == 0) s += c < 0 ? "-" : "";
            else s += c < 0 ? " - " : " + ";
            if (a != 1) s += std::to_string(a) + "*";
            s += "c" + std::to_string(support[i] + 1);
        }
        return s;
    }
};

/// Coefficient order used for enumeration: by magnitude, positive first.
inline std::vector<long> normalize_coefficients(std::vector<long> coeffs) {
    std::sort(coeffs.begin(), coeffs.end(), [](long a, long b) {
        if (std::labs(a) != std::labs(b)) return std::labs(a) < std::labs(b);
        return a > b;
    });
    coeffs.erase(std::unique(coeffs.begin(), coeffs.end()), coeffs.end());
    if (coeffs.empty()) throw invalid_input("coefficient set is empty");
    if (std::find(coeffs.begin(), coeffs.end(), 0L) != coeffs.end())
        throw invalid_input("coefficient set may not contain 0");
    return coeffs;
}

/// Coefficient patterns of length k in canonical form: a pattern is dropped
/// when its negation is also expressible and its first entry is negative.
inline std::vector<std::vector<long>> canonical_patterns(const std::vector<long>& coeffs, int k) {
    const std::set<long> members(coeffs.begin(), coeffs.end());
    std::vector<std::vector<long>> out;
    std::vector<std::size_t> idx(k, 0);
    while (true) {
        std::vector<long> pat(k);
        for (int i = 0; i < k; ++i) pat[i] = coeffs[idx[i]];
        bool negatable = true;
        for (long c : pat) negatable = negatable && members.count(-c);
        if (!(negatable && pat[0] < 0)) out.push_back(std::move(pat));
        int i = k - 1;
        while (i >= 0 && ++idx[i] == coeffs.size()) idx[i--] = 0;
        if (i < 0) break;
    }
    return out;
}

/// Calls `visit` for every canonical candidate with support size <= k_max,
/// ordered by support size, then support (lexicographic), then coefficient
/// pattern. `visit` returns false to stop early.
inline void enumerate_sparse(int n, int k_max, const std::vector<long>& coeff_set,
                             const std::function<bool(const SparseCandidate&)>& visit) {
    if (k_max < 1) throw invalid_input("k_max must be >= 1");
    const auto coeffs = normalize_coefficients(coeff_set);
    if (n <= 0) return;
    SparseCandidate cand;
    for (int k = 1; k <= std::min(k_max, n); ++k) {
        const auto patterns = canonical_patterns(coeffs, k);
        std::vector<int> s(k);
        for (int i = 0; i < k; ++i) s[i] = i;
        while (true) {
            cand.support = s;
            for (const auto& pat : patterns) {
                cand.coefficients = pat;
                if (!visit(cand)) return;
            }
            int i = k - 1;
            while (i >= 0 && s[i] == n - k + i) --i;
            if (i < 0) break;
            ++s[i];
            for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
        }
    }
}

inline std::vector<SparseCandidate> enumerate_sparse(int n, int k_max, const std::vector<long>& coeff_set) {
    std::vector<SparseCandidate> out;
    enumerate_sparse(n, k_max, coeff_set, [&](const SparseCandidate& c) {
        out.push_back(c);
        return true;
    });
    return out;
}

/// Closed form: sum over k of C(n, k) times the number of canonical patterns.
inline mpz_class sparse_count(int n, int k_max, const std::vector<long>& coeff_set) {
    const auto coeffs = normalize_coefficients(coeff_set);
    mpz_class total = 0;
    for (int k = 1; k <= std::min(k_max, n); ++k) {
        mpz_class binom;
        mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
        total += binom * static_cast<unsigned long>(canonical_patterns(coeffs, k).size());
    }
    return total;
}

} // namespace classbound

#endif // CLASSBOUND_SPARSE_HPP
