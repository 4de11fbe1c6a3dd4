#ifndef CLASSBOUND_SEARCH_HPP
#define CLASSBOUND_SEARCH_HPP

// Norms of sparse combinations of a (reduced) integral basis.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <thread>
#include <vector>

#include "classbound/error.hpp"
#include "classbound/factor.hpp"
#include "classbound/field.hpp"
#include "classbound/lattice.hpp"
#include "classbound/sparse.hpp"

namespace classbound {

struct NormedElement {
    SparseCandidate candidate;
    mpz_class norm;
    Factorization factorization;

    bool complete() const { return factorization.complete; }
};

struct SearchOptions {
    int k_max = 3;
    std::vector<long> coefficients{-1, 1};
    mpz_class norm_limit{"10000000000"};
    mpz_class smoothness_limit{100000};
    unsigned threads = 1;
    std::uint64_t seed = 1;
};

namespace detail {

struct EmbeddedRows {
    // values[row][root]
    std::vector<std::vector<mp::ComplexInterval>> exact;
    std::vector<std::vector<std::complex<double>>> approx;
    std::size_t real_count = 0; // leading roots that are real
};

inline EmbeddedRows embed_rows(const std::vector<QVector>& rows, const NumberField& field) {
    EmbeddedRows e;
    const mp::prec_t prec = field.precision();
    const mp::prec_t eval_prec = prec + evaluation_guard(rows, field);
    NumberField rescaled;
    const NumberField* use = &field;
    if (eval_prec > field.precision()) {
        rescaled = with_precision(field, eval_prec);
        use = &rescaled;
    }
    e.real_count = use->roots.real_roots.size();
    for (const auto& x : rows) {
        std::vector<mp::ComplexInterval> ex;
        std::vector<std::complex<double>> ap;
        for (const auto* group : {&use->roots.real_roots, &use->roots.complex_roots})
            for (const auto& root : *group) {
                const auto v = evaluate_at_root(x, root, eval_prec);
                ap.emplace_back(v.re.mid().to_double(), v.im.mid().to_double());
                ex.emplace_back(v.re.with_precision(prec), v.im.with_precision(prec));
            }
        e.exact.push_back(std::move(ex));
        e.approx.push_back(std::move(ap));
    }
    return e;
}

inline double approx_log_norm(const EmbeddedRows& e, const SparseCandidate& c) {
    double s = 0;
    const std::size_t roots = e.approx.empty() ? 0 : e.approx[0].size();
    for (std::size_t r = 0; r < roots; ++r) {
        std::complex<double> z = 0;
        for (std::size_t i = 0; i < c.support.size(); ++i)
            z += static_cast<double>(c.coefficients[i]) * e.approx[c.support[i]][r];
        s += r < e.real_count ? std::log(std::abs(z)) : std::log(std::norm(z));
    }
    return s;
}

inline mp::Interval norm_enclosure(const EmbeddedRows& e, const SparseCandidate& c, mp::prec_t prec) {
    mp::Interval n(1L, prec);
    const std::size_t roots = e.exact.empty() ? 0 : e.exact[0].size();
    for (std::size_t r = 0; r < roots; ++r) {
        mp::ComplexInterval z(prec);
        for (std::size_t i = 0; i < c.support.size(); ++i)
            z = z + mp::Interval(c.coefficients[i], prec) * e.exact[c.support[i]][r];
        n = n * (r < e.real_count ? sqrt(sqr(z.re)) : z.norm_sqr());
    }
    return n;
}

inline QVector combination(const std::vector<QVector>& rows, const SparseCandidate& c) {
    QVector v(rows.empty() ? 0 : rows[0].size(), mpq_class(0));
    for (std::size_t i = 0; i < c.support.size(); ++i)
        for (std::size_t t = 0; t < v.size(); ++t) v[t] += c.coefficients[i] * rows[c.support[i]][t];
    return v;
}

} // namespace detail

/// Certified norm of a sparse combination of `rows` (power-basis
/// coordinates), with the exact resultant as fallback.
inline mpz_class candidate_norm(const std::vector<QVector>& rows, const SparseCandidate& c, const NumberField& field) {
    const mpq_class q = norm_exact(AlgebraicInteger{detail::combination(rows, c), power_basis_tag}, field);
    if (q.get_den() != 1) throw arithmetic_error("norm of " + c.label() + " is not an integer; basis is not integral");
    return q.get_num();
}

/// Every canonical sparse combination of `rows` with 1 < |N| <= norm_limit
/// whose norm is a prime power or smooth below smoothness_limit. Elements
/// whose norm could not be fully factored are kept with complete() false.
/// Results are sorted by norm, ties in enumeration order.
inline std::vector<NormedElement> search(const NumberField& field, const std::vector<QVector>& rows,
                                         const SearchOptions& opt = {}) {
    if (static_cast<int>(rows.size()) != field.degree) throw invalid_input("search basis must have one row per degree");
    if (opt.norm_limit < 2) throw invalid_input("norm_limit must be >= 2");
    const auto emb = detail::embed_rows(rows, field);
    const double log_limit = std::log(opt.norm_limit.get_d()) + 1.0;
    const unsigned threads = std::max(1u, opt.threads);

    struct Hit {
        std::size_t index;
        NormedElement element;
    };
    std::vector<std::vector<Hit>> found(threads);
    std::vector<std::exception_ptr> errors(threads);

    const auto worker = [&](unsigned t) {
        try {
            std::size_t index = 0;
            enumerate_sparse(field.degree, opt.k_max, opt.coefficients, [&](const SparseCandidate& c) {
                const std::size_t i = index++;
                if (i % threads != t) return true;
                if (detail::approx_log_norm(emb, c) > log_limit) return true;
                mpz_class norm;
                if (auto z = unique_integer(detail::norm_enclosure(emb, c, field.precision()))) {
                    norm = *z;
                } else {
                    norm = candidate_norm(rows, c, field);
                }
                if (norm <= 1 || norm > opt.norm_limit) return true;
                Factorization fac = factor_norm(norm, opt.norm_limit, opt.seed);
                bool keep = !fac.complete || fac.factors.size() == 1;
                if (!keep) keep = std::prev(fac.factors.end())->first <= opt.smoothness_limit;
                if (keep) found[t].push_back({i, NormedElement{c, norm, std::move(fac)}});
                return true;
            });
        } catch (...) {
            errors[t] = std::current_exception();
        }
    };
    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<Hit> all;
    for (auto& v : found)
        for (auto& h : v) all.push_back(std::move(h));
    std::sort(all.begin(), all.end(), [](const Hit& a, const Hit& b) {
        if (a.element.norm != b.element.norm) return a.element.norm < b.element.norm;
        return a.index < b.index;
    });
    std::vector<NormedElement> out;
    for (auto& h : all) out.push_back(std::move(h.element));
    return out;
}

/// Search over U * (source basis): the basis stored in the file, or else
/// the field's own basis, which must then carry the recorded name.
inline std::vector<NormedElement> search(const NumberField& field, const ReducedBasisFile& reduced,
                                         const SearchOptions& opt = {}) {
    if (static_cast<int>(reduced.transform.size()) != field.degree)
        throw invalid_input("reduced-basis transform size does not match the field degree");
    if (!reduced.source_elements.empty())
        return search(field, combine_rows(reduced.transform, reduced.source_elements), opt);
    if (reduced.source_basis != basis_name(field))
        throw invalid_input("reduced basis was computed from basis '" + reduced.source_basis + "' but the field provides '" +
                            basis_name(field) + "'");
    return search(field, combine_rows(reduced.transform, basis_rows(field)), opt);
}

inline json factorization_to_json(const Factorization& f) {
    json j = json::object();
    for (const auto& [p, e] : f.factors) j[p.get_str()] = e;
    return j;
}

inline json normed_element_to_json(const NormedElement& e) {
    json j;
    j["element"] = {{"support", e.candidate.support}, {"coefficients", e.candidate.coefficients},
                    {"label", e.candidate.label()}};
    j["norm"] = e.norm.get_str();
    j["factorization"] = factorization_to_json(e.factorization);
    j["complete"] = e.complete();
    if (!e.complete()) j["cofactor"] = e.factorization.cofactor.get_str();
    return j;
}

} // namespace classbound

#endif // CLASSBOUND_SEARCH_HPP
