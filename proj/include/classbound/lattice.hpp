#ifndef CLASSBOUND_LATTICE_HPP
#define CLASSBOUND_LATTICE_HPP

// Minkowski embedding of an integral basis and LLL reduction with an exact
// unimodular transform carried alongside the floating-point basis.

#include <gmpxx.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "classbound/error.hpp"
#include "classbound/field.hpp"
#include "classbound/modular.hpp"
#include "classbound/mp.hpp"

namespace classbound {

using IntMatrix = std::vector<std::vector<mpz_class>>;
using RealMatrix = std::vector<std::vector<mp::Real>>;

struct EmbeddedBasis {
    RealMatrix vectors; // one row per basis element
    std::string source_basis;
    mp::prec_t precision_bits = mp::default_precision;

    std::size_t size() const { return vectors.size(); }
};

struct UnimodularTransform {
    IntMatrix matrix; // reduced rows = matrix * source rows
    int determinant = 1;
};

struct ReductionReport {
    int iterations = 0;
    std::vector<std::pair<double, double>> length_history; // (min, max) per round
    std::vector<double> best_max_history;                  // best max length after each round
    bool stalled = false;
};

inline IntMatrix identity_matrix(std::size_t n) {
    IntMatrix m(n, std::vector<mpz_class>(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
    const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    IntMatrix c(n, std::vector<mpz_class>(m, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            if (a[i][l] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
        }
    return c;
}

/// Exact determinant check; returns the determinant (+1 or -1) or throws.
inline int verify_unimodular(const IntMatrix& u) {
    const mpz_class d = modular::determinant(u);
    if (d == 1) return 1;
    if (d == -1) return -1;
    throw arithmetic_error("transform is not unimodular (det = " + d.get_str() + ")");
}

inline mp::Real squared_length(std::span<const mp::Real> v, mp::prec_t prec) {
    mp::Real s(prec);
    for (const auto& x : v) mpfr_fma(s.get(), x.get(), x.get(), s.get(), MPFR_RNDN);
    return s;
}

inline mp::Real length(std::span<const mp::Real> v, mp::prec_t prec) { return mp::sqrt(squared_length(v, prec)); }

inline std::vector<double> row_lengths(const EmbeddedBasis& b) {
    std::vector<double> out;
    for (const auto& r : b.vectors) out.push_back(length(r, b.precision_bits).to_double());
    return out;
}

/// prod_i (y_{2i-1}^2 + y_{2i}^2): |N(x)| when y is the embedding of x.
inline mp::Real multiplicative_norm_embedded(std::span<const mp::Real> v) {
    if (v.size() % 2 != 0) throw invalid_input("multiplicative norm needs an even dimension");
    const mp::prec_t prec = v.empty() ? mp::default_precision : v[0].precision();
    mp::Real n(1L, prec);
    for (std::size_t i = 0; i < v.size(); i += 2) n *= v[i] * v[i] + v[i + 1] * v[i + 1];
    return n;
}

/// Integer rows as an embedded basis (used for plain integer lattices).
inline EmbeddedBasis from_integer_rows(const IntMatrix& rows, mp::prec_t prec, std::string name = "integer") {
    EmbeddedBasis b;
    b.source_basis = std::move(name);
    b.precision_bits = prec;
    for (const auto& r : rows) {
        std::vector<mp::Real> v;
        for (const auto& x : r) v.emplace_back(x, prec);
        b.vectors.push_back(std::move(v));
    }
    return b;
}

namespace detail {

/// Gram-Schmidt data of the row at position k, recomputed from scratch
/// (Schnorr-Euchner r_kj recurrence).
struct GramSchmidt {
    RealMatrix mu, r;
    std::vector<mp::Real> bstar; // |b*_i|^2

    GramSchmidt(std::size_t n, mp::prec_t prec)
        : mu(n, std::vector<mp::Real>(n, mp::Real(prec))), r(n, std::vector<mp::Real>(n, mp::Real(prec))),
          bstar(n, mp::Real(prec)) {}

    void row(const RealMatrix& b, std::size_t k, mp::prec_t prec) {
        mp::Real s(prec), t(prec);
        for (std::size_t j = 0; j < k; ++j) {
            mpfr_set_zero(s.get(), 1);
            for (std::size_t c = 0; c < b[k].size(); ++c)
                mpfr_fma(s.get(), b[k][c].get(), b[j][c].get(), s.get(), MPFR_RNDN);
            mpfr_set_zero(t.get(), 1);
            for (std::size_t i = 0; i < j; ++i) mpfr_fma(t.get(), mu[j][i].get(), r[k][i].get(), t.get(), MPFR_RNDN);
            mpfr_sub(r[k][j].get(), s.get(), t.get(), MPFR_RNDN);
            mpfr_div(mu[k][j].get(), r[k][j].get(), bstar[j].get(), MPFR_RNDN);
        }
        s = squared_length(b[k], prec);
        mpfr_set_zero(t.get(), 1);
        for (std::size_t j = 0; j < k; ++j) mpfr_fma(t.get(), mu[k][j].get(), r[k][j].get(), t.get(), MPFR_RNDN);
        mpfr_sub(bstar[k].get(), s.get(), t.get(), MPFR_RNDN);
        mpfr_set(r[k][k].get(), bstar[k].get(), MPFR_RNDN);
    }

    /// Same as row(), from a Gram matrix of the rows.
    void row_from_gram(const RealMatrix& g, std::size_t k, mp::prec_t prec) {
        mp::Real t(prec);
        for (std::size_t j = 0; j < k; ++j) {
            mpfr_set_zero(t.get(), 1);
            for (std::size_t i = 0; i < j; ++i) mpfr_fma(t.get(), mu[j][i].get(), r[k][i].get(), t.get(), MPFR_RNDN);
            mpfr_sub(r[k][j].get(), g[k][j].get(), t.get(), MPFR_RNDN);
            mpfr_div(mu[k][j].get(), r[k][j].get(), bstar[j].get(), MPFR_RNDN);
        }
        mpfr_set_zero(t.get(), 1);
        for (std::size_t j = 0; j < k; ++j) mpfr_fma(t.get(), mu[k][j].get(), r[k][j].get(), t.get(), MPFR_RNDN);
        mpfr_sub(bstar[k].get(), g[k][k].get(), t.get(), MPFR_RNDN);
        mpfr_set(r[k][k].get(), bstar[k].get(), MPFR_RNDN);
    }
};

inline bool collapsed(const mp::Real& bstar, const mp::Real& len2, mp::prec_t prec) {
    if (bstar.sign() <= 0) return true;
    mp::Real floor = len2;
    mpfr_mul_2si(floor.get(), floor.get(), -static_cast<long>(prec) + 12, MPFR_RNDN);
    return bstar < floor;
}

/// Rows of U * B0 at the precision of B0 (accumulated with guard bits).
inline RealMatrix apply_transform(const IntMatrix& u, const RealMatrix& b0, mp::prec_t prec) {
    const mp::prec_t guard = prec + 64;
    RealMatrix out;
    for (const auto& urow : u) {
        std::vector<mp::Real> row;
        for (std::size_t t = 0; t < (b0.empty() ? 0 : b0[0].size()); ++t) {
            mp::Real s(guard), term(guard);
            for (std::size_t j = 0; j < urow.size(); ++j) {
                if (urow[j] == 0) continue;
                mpfr_mul_z(term.get(), b0[j][t].get(), urow[j].get_mpz_t(), MPFR_RNDN);
                s += term;
            }
            row.push_back(s.with_precision(prec));
        }
        out.push_back(std::move(row));
    }
    return out;
}

/// Gram matrix of the rows, both triangles filled.
inline RealMatrix gram(const RealMatrix& b, mp::prec_t prec) {
    const std::size_t n = b.size();
    RealMatrix g(n, std::vector<mp::Real>(n, mp::Real(prec)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            for (std::size_t t = 0; t < b[i].size(); ++t)
                mpfr_fma(g[i][j].get(), b[i][t].get(), b[j][t].get(), g[i][j].get(), MPFR_RNDN);
            mpfr_set(g[j][i].get(), g[i][j].get(), MPFR_RNDN);
        }
    return g;
}

/// One LLL pass on the rows U * B0, where `b` holds those rows on entry.
/// Works on an incrementally updated Gram matrix and only changes `u`; the
/// caller re-derives the rows from it.
inline void lll_pass(const RealMatrix& b, IntMatrix& u, const mp::Real& delta, mp::prec_t prec) {
    const std::size_t n = b.size();
    if (n == 0) return;
    const mp::prec_t gp = prec + 64;
    RealMatrix g = gram(b, gp);
    GramSchmidt gs(n, prec);
    const mp::Real half_plus(0.51, prec);
    mp::Real tmp(gp);
    mpz_class q2;

    gs.row_from_gram(g, 0, prec);
    if (detail::collapsed(gs.bstar[0], g[0][0], prec))
        throw precision_error("lattice rows are dependent at " + std::to_string(prec) + " bits");
    std::size_t k = 1;
    long long steps = 0;
    while (k < n) {
        if (++steps > 50'000'000) throw precision_error("LLL did not terminate; raise precision");
        // Size-reduce row k until a fresh Gram-Schmidt pass agrees.
        for (int sweep = 0;; ++sweep) {
            if (sweep > 200) throw precision_error("size reduction does not settle; raise precision");
            gs.row_from_gram(g, k, prec);
            bool changed = false;
            for (std::size_t jj = k; jj-- > 0;) {
                if (!(mp::abs(gs.mu[k][jj]) > half_plus)) continue;
                const mpz_class q = gs.mu[k][jj].round_to_integer();
                if (q == 0) continue;
                changed = true;
                // b_k -= q b_jj
                q2 = q * q;
                mpfr_mul_z(tmp.get(), g[k][jj].get(), q.get_mpz_t(), MPFR_RNDN);
                mpfr_mul_2ui(tmp.get(), tmp.get(), 1, MPFR_RNDN);
                mpfr_sub(g[k][k].get(), g[k][k].get(), tmp.get(), MPFR_RNDN);
                mpfr_mul_z(tmp.get(), g[jj][jj].get(), q2.get_mpz_t(), MPFR_RNDN);
                mpfr_add(g[k][k].get(), g[k][k].get(), tmp.get(), MPFR_RNDN);
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == k) continue;
                    mpfr_mul_z(tmp.get(), g[jj][i].get(), q.get_mpz_t(), MPFR_RNDN);
                    mpfr_sub(g[k][i].get(), g[k][i].get(), tmp.get(), MPFR_RNDN);
                    mpfr_set(g[i][k].get(), g[k][i].get(), MPFR_RNDN);
                }
                for (std::size_t t = 0; t < n; ++t) mpz_submul(u[k][t].get_mpz_t(), q.get_mpz_t(), u[jj][t].get_mpz_t());
                mp::Real qr(q, prec);
                for (std::size_t i = 0; i < jj; ++i) gs.mu[k][i] -= qr * gs.mu[jj][i];
                gs.mu[k][jj] -= qr;
            }
            if (!changed) break;
        }
        if (detail::collapsed(gs.bstar[k], g[k][k], prec))
            throw precision_error("Gram-Schmidt norm collapsed at " + std::to_string(prec) + " bits; raise precision");

        // Lovasz: delta |b*_{k-1}|^2 <= |b*_k|^2 + mu^2 |b*_{k-1}|^2
        const mp::Real lhs = delta * gs.bstar[k - 1];
        const mp::Real rhs = gs.bstar[k] + gs.mu[k][k - 1] * gs.mu[k][k - 1] * gs.bstar[k - 1];
        if (lhs > rhs) {
            std::swap(g[k], g[k - 1]);
            for (std::size_t i = 0; i < n; ++i) mpfr_swap(g[i][k].get(), g[i][k - 1].get());
            std::swap(u[k], u[k - 1]);
            if (k > 1) {
                --k;
            } else {
                gs.row_from_gram(g, 0, prec);
            }
        } else {
            ++k;
        }
    }
}

/// Max |mu| and worst Lovasz slack over the whole basis, recomputed fresh.
inline bool is_lll_reduced(const RealMatrix& b, const mp::Real& delta, mp::prec_t prec) {
    const std::size_t n = b.size();
    GramSchmidt gs(n, prec);
    const mp::Real half_plus(0.51, prec);
    for (std::size_t k = 0; k < n; ++k) {
        gs.row(b, k, prec);
        for (std::size_t j = 0; j < k; ++j)
            if (mp::abs(gs.mu[k][j]) > half_plus) return false;
        if (k > 0) {
            const mp::Real lhs = delta * gs.bstar[k - 1];
            const mp::Real rhs = gs.bstar[k] + gs.mu[k][k - 1] * gs.mu[k][k - 1] * gs.bstar[k - 1];
            if (lhs > rhs) return false;
        }
    }
    return true;
}

} // namespace detail

/// LLL with parameter delta in (1/4, 1). The returned transform is exactly
/// unimodular and maps input rows to output rows; output rows are re-derived
/// from it before returning.
inline std::pair<EmbeddedBasis, UnimodularTransform> lll(const EmbeddedBasis& basis, double delta = 0.99) {
    if (!(delta > 0.25 && delta < 1.0)) throw invalid_input("LLL delta must lie in (0.25, 1)");
    const mp::prec_t prec = basis.precision_bits;
    const std::size_t n = basis.size();
    for (const auto& r : basis.vectors)
        if (r.size() < n) throw invalid_input("LLL needs rows of dimension >= row count");

    RealMatrix b = basis.vectors;
    IntMatrix u = identity_matrix(n);
    const mp::Real d(delta, prec);
    for (int attempt = 0;; ++attempt) {
        detail::lll_pass(b, u, d, prec);
        b = detail::apply_transform(u, basis.vectors, prec);
        if (detail::is_lll_reduced(b, d, prec)) break;
        if (attempt >= 4) throw precision_error("LLL output drifts at " + std::to_string(prec) + " bits; raise precision");
    }
    EmbeddedBasis out{std::move(b), basis.source_basis, prec};
    UnimodularTransform t{std::move(u), 1};
    t.determinant = verify_unimodular(t.matrix);
    return {std::move(out), std::move(t)};
}

namespace detail {

/// Length profile: lengths sorted descending. Smaller is better, max first.
inline std::vector<mp::Real> profile(const EmbeddedBasis& b) {
    std::vector<mp::Real> p;
    for (const auto& r : b.vectors) p.push_back(squared_length(r, b.precision_bits));
    std::sort(p.begin(), p.end(), [](const mp::Real& x, const mp::Real& y) { return x > y; });
    return p;
}

inline bool better_profile(const std::vector<mp::Real>& a, const std::vector<mp::Real>& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

} // namespace detail

struct LoopOptions {
    int max_rounds = 1000;
    int stall_rounds = 5;
    double delta = 0.99;
};

/// Round 1 is plain LLL on the input order; later rounds sort rows by
/// ascending length (ties by current index) and run LLL again. The best basis
/// seen (smallest maximum length, then lexicographic length profile) is kept.
/// Stops at max_rounds, at a fixed point, or after stall_rounds rounds
/// without improvement.
inline std::tuple<EmbeddedBasis, UnimodularTransform, ReductionReport>
sort_reduce_loop(const EmbeddedBasis& basis, const LoopOptions& opt = {}) {
    if (opt.max_rounds < 1) throw invalid_input("max_rounds must be >= 1");
    if (opt.stall_rounds < 1) throw invalid_input("stall_rounds must be >= 1");
    const std::size_t n = basis.size();
    const mp::prec_t prec = basis.precision_bits;

    EmbeddedBasis cur = basis;
    IntMatrix total = identity_matrix(n);
    EmbeddedBasis best = basis;
    IntMatrix best_u = total;
    auto best_profile = detail::profile(best);
    ReductionReport report;
    int since_improvement = 0;

    for (int round = 1; round <= opt.max_rounds; ++round) {
        IntMatrix perm = identity_matrix(n);
        bool reordered = false;
        if (round > 1) {
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::vector<mp::Real> len2;
            for (const auto& r : cur.vectors) len2.push_back(squared_length(r, prec));
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return len2[a] < len2[b]; });
            RealMatrix sorted;
            for (std::size_t i = 0; i < n; ++i) {
                sorted.push_back(cur.vectors[order[i]]);
                if (order[i] != i) reordered = true;
                std::fill(perm[i].begin(), perm[i].end(), 0);
                perm[i][order[i]] = 1;
            }
            cur.vectors = std::move(sorted);
        }
        auto [reduced, t] = lll(cur, opt.delta);
        const bool fixed_point = !reordered && t.matrix == identity_matrix(n);
        total = multiply(t.matrix, multiply(perm, total));
        cur = std::move(reduced);

        const auto lens = row_lengths(cur);
        report.iterations = round;
        report.length_history.emplace_back(*std::min_element(lens.begin(), lens.end()),
                                           *std::max_element(lens.begin(), lens.end()));
        auto prof = detail::profile(cur);
        if (detail::better_profile(prof, best_profile)) {
            best = cur;
            best_u = total;
            best_profile = std::move(prof);
            since_improvement = 0;
        } else {
            ++since_improvement;
        }
        report.best_max_history.push_back(mp::sqrt(best_profile.front()).to_double());
        if (fixed_point || since_improvement >= opt.stall_rounds) {
            report.stalled = true;
            break;
        }
    }
    UnimodularTransform t{std::move(best_u), 1};
    t.determinant = verify_unimodular(t.matrix);
    return {std::move(best), std::move(t), std::move(report)};
}

// ---------------------------------------------------------------------------
// Embedding of algebraic bases.

/// Power-basis rows of the basis elements.
inline std::vector<QVector> basis_rows(const NumberField& field) {
    if (field.integral_basis) return field.integral_basis->elements;
    std::vector<QVector> rows(field.degree, QVector(field.degree, mpq_class(0)));
    for (int i = 0; i < field.degree; ++i) rows[i][i] = 1;
    return rows;
}

inline std::string basis_name(const NumberField& field) {
    return field.integral_basis ? field.integral_basis->name : power_basis_tag;
}

namespace detail {

/// Bits lost to cancellation when evaluating these coordinates at the roots:
/// coordinate height plus the growth of the powers of the largest root.
inline mp::prec_t evaluation_guard(const std::vector<QVector>& elements, const NumberField& k) {
    std::size_t height = 0;
    for (const auto& x : elements)
        for (const auto& q : x)
            height = std::max({height, mpz_sizeinbase(q.get_num_mpz_t(), 2), mpz_sizeinbase(q.get_den_mpz_t(), 2)});
    double r = 1;
    for (const auto* group : {&k.roots.real_roots, &k.roots.complex_roots})
        for (const auto& root : *group)
            r = std::max(r, std::abs(root.re.to_double()) + std::abs(root.im.to_double()));
    return static_cast<mp::prec_t>(height) + static_cast<mp::prec_t>(std::ceil(k.degree * std::log2(r))) + 64;
}

} // namespace detail

/// (Re s_1(x), Im s_1(x), ..., Re s_r2(x), Im s_r2(x)) for each element.
/// Each row is accurate to about `precision` bits relative to its length;
/// a precision error is raised when the evaluation cannot guarantee that.
inline EmbeddedBasis embed(const std::vector<QVector>& elements, const std::string& name, const NumberField& field,
                           mp::prec_t precision) {
    if (!field.totally_complex()) throw invalid_input("Minkowski embedding here needs a totally complex field");
    const NumberField& k = field;
    for (const auto& x : elements)
        if (static_cast<int>(x.size()) != k.degree) throw invalid_input("basis element has wrong coordinate count");
    const mp::prec_t eval_prec = precision + detail::evaluation_guard(elements, k);
    NumberField rescaled;
    const NumberField* use = &k;
    if (eval_prec > k.precision()) {
        rescaled = with_precision(k, eval_prec);
        use = &rescaled;
    }
    EmbeddedBasis out;
    out.source_basis = name;
    out.precision_bits = precision;
    for (const auto& x : elements) {
        std::vector<mp::Real> row;
        mp::Real len2(0L, eval_prec), err(0L, eval_prec);
        for (const auto& root : use->roots.complex_roots) {
            const auto v = evaluate_at_root(x, root, eval_prec + 32);
            for (const auto* part : {&v.re, &v.im}) {
                const mp::Real m = part->mid();
                len2 = len2 + m * m;
                err = std::max(err, part->width());
                row.push_back(m.with_precision(precision));
            }
        }
        // Enclosure width against the row length.
        mp::Real budget = len2;
        mpfr_mul_2si(budget.get(), budget.get(), -2 * static_cast<long>(precision) + 32, MPFR_RNDN);
        if (!(err * err <= budget))
            throw precision_error("embedding of '" + name + "' loses too much accuracy at " + std::to_string(precision) +
                                  " bits");
        out.vectors.push_back(std::move(row));
    }
    // Nonsingularity at this precision.
    detail::GramSchmidt gs(out.size(), precision);
    for (std::size_t i = 0; i < out.size(); ++i) {
        gs.row(out.vectors, i, precision);
        if (detail::collapsed(gs.bstar[i], squared_length(out.vectors[i], precision), precision))
            throw precision_error("embedded basis is numerically singular at " + std::to_string(precision) + " bits");
    }
    return out;
}

inline EmbeddedBasis embed(const NumberField& field, mp::prec_t precision) {
    return embed(basis_rows(field), basis_name(field), field, precision);
}

/// Power-basis rows of U * basis.
inline std::vector<QVector> combine_rows(const IntMatrix& u, const std::vector<QVector>& rows) {
    std::vector<QVector> out;
    for (const auto& urow : u) {
        QVector v(rows.empty() ? 0 : rows[0].size(), mpq_class(0));
        for (std::size_t j = 0; j < urow.size(); ++j) {
            if (urow[j] == 0) continue;
            for (std::size_t t = 0; t < v.size(); ++t) v[t] += urow[j] * rows[j][t];
        }
        out.push_back(std::move(v));
    }
    return out;
}

/// Embedding of the field's basis at the first precision, doubling from
/// `precision`, at which it is accurate and numerically nonsingular.
inline EmbeddedBasis embed_escalating(const NumberField& field, mp::prec_t precision, mp::prec_t max_precision = 4096) {
    for (mp::prec_t p = precision;; p *= 2) {
        try {
            return embed(field, p);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::precision || p * 2 > max_precision) throw;
        }
    }
}

/// Full reduction with precision escalation: on a precision failure the
/// basis is re-embedded at twice the precision, up to `max_precision`.
inline std::tuple<EmbeddedBasis, UnimodularTransform, ReductionReport>
reduce_field_basis(const NumberField& field, mp::prec_t precision, const LoopOptions& opt,
                   mp::prec_t max_precision = 4096) {
    for (mp::prec_t p = precision;; p *= 2) {
        try {
            auto basis = embed_escalating(field, p, max_precision);
            p = basis.precision_bits;
            return sort_reduce_loop(basis, opt);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::precision || p * 2 > max_precision) throw;
        }
    }
}

// ---------------------------------------------------------------------------
// Reduced-basis file.

struct ReducedBasisFile {
    std::string source_basis;
    IntMatrix transform;
    std::vector<std::string> lengths;
    int rounds = 0;
    mp::prec_t precision_bits = mp::default_precision;
    std::vector<QVector> source_elements; // empty: the field's own basis
};

inline json qvector_to_json(const QVector& v) {
    json row = json::array();
    for (const auto& q : v) {
        if (q.get_den() == 1) row.push_back(integer_to_json(q.get_num()));
        else row.push_back(q.get_str());
    }
    return row;
}

/// `source_elements`, when given, are stored so the file is usable without
/// the basis it was computed from.
inline json reduced_basis_to_json(const EmbeddedBasis& b, const UnimodularTransform& t, const ReductionReport& r,
                                  const std::vector<QVector>* source_elements = nullptr) {
    json j;
    j["format_version"] = 1;
    j["source_basis"] = b.source_basis;
    json m = json::array();
    for (const auto& row : t.matrix) {
        json jr = json::array();
        for (const auto& x : row) jr.push_back(integer_to_json(x));
        m.push_back(std::move(jr));
    }
    j["transform"] = std::move(m);
    json lens = json::array();
    for (const auto& row : b.vectors) lens.push_back(length(row, b.precision_bits).to_fixed(6));
    j["lengths"] = std::move(lens);
    j["rounds"] = r.iterations;
    j["precision_bits"] = b.precision_bits;
    if (source_elements) {
        json rows = json::array();
        for (const auto& v : *source_elements) rows.push_back(qvector_to_json(v));
        j["source_elements"] = std::move(rows);
    }
    return j;
}

inline ReducedBasisFile reduced_basis_from_json(const json& j) {
    if (j.value("format_version", 0) != 1) throw invalid_input("reduced-basis file: unsupported format_version");
    ReducedBasisFile f;
    f.source_basis = j.at("source_basis").get<std::string>();
    for (const auto& row : j.at("transform")) {
        std::vector<mpz_class> r;
        for (const auto& x : row) r.push_back(parse_integer(x));
        f.transform.push_back(std::move(r));
    }
    for (const auto& row : f.transform)
        if (row.size() != f.transform.size()) throw invalid_input("reduced-basis transform is not square");
    if (j.contains("lengths"))
        for (const auto& l : j.at("lengths")) f.lengths.push_back(l.get<std::string>());
    f.rounds = j.value("rounds", 0);
    f.precision_bits = j.value("precision_bits", static_cast<long>(mp::default_precision));
    if (j.contains("source_elements")) {
        for (const auto& row : j.at("source_elements")) {
            QVector v;
            for (const auto& x : row) v.push_back(parse_rational(x));
            if (v.size() != f.transform.size()) throw invalid_input("source_elements row has the wrong length");
            f.source_elements.push_back(std::move(v));
        }
        if (f.source_elements.size() != f.transform.size()) throw invalid_input("source_elements has the wrong row count");
    }
    verify_unimodular(f.transform);
    return f;
}

} // namespace classbound

#endif // CLASSBOUND_LATTICE_HPP
