#ifndef CLASSBOUND_LEDGER_HPP
#define CLASSBOUND_LEDGER_HPP

// Bookkeeping of which rational primes are known to factor into principal
// prime ideals, derived from elements with known norm factorizations.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "classbound/error.hpp"
#include "classbound/factor.hpp"
#include "classbound/field.hpp"
#include "classbound/search.hpp"

namespace classbound {

enum class PrimeStatus { unknown, principal };

inline const char* to_string(PrimeStatus s) { return s == PrimeStatus::principal ? "PRINCIPAL" : "UNKNOWN"; }

struct LedgerEntry {
    int residue_degree = 0;
    PrimeStatus status = PrimeStatus::unknown;
    std::string rule;                  // "A" or "B" once principal
    std::vector<std::string> evidence; // relation ids, deciding relation first
};

struct Relation {
    std::string id;
    std::optional<SparseCandidate> element;
    mpz_class norm;
    Factorization factorization;
};

/// Outcome of examining one relation.
enum class RelationState { pending, used, uninformative };

struct PrincipalityLedger {
    std::map<std::uint64_t, LedgerEntry> entries;
    std::vector<Relation> relations;
    std::map<std::string, RelationState> states;
    std::set<std::uint64_t> ramified;

    const LedgerEntry* find(std::uint64_t p) const {
        auto it = entries.find(p);
        return it == entries.end() ? nullptr : &it->second;
    }
    bool principal(std::uint64_t p) const {
        const auto* e = find(p);
        return e && e->status == PrimeStatus::principal;
    }
    std::vector<std::string> pending() const {
        std::vector<std::string> out;
        for (const auto& r : relations)
            if (states.at(r.id) == RelationState::pending) out.push_back(r.id);
        return out;
    }
};

/// Residue degree of p, or nullopt when unknown (e.g. p ramified).
using DegreeLookup = std::function<std::optional<int>(std::uint64_t)>;

inline DegreeLookup degrees_from_splitting_poly(const ZPoly& g) {
    return [g](std::uint64_t p) { return splitting_type(g, p).residue_degree; };
}

inline DegreeLookup degrees_from_field(const NumberField& field) {
    return [&field](std::uint64_t p) { return residue_degree(field, p); };
}

inline Relation make_relation(const NormedElement& e) {
    return Relation{e.candidate.label(), e.candidate, e.norm, e.factorization};
}

namespace detail {

inline std::uint64_t small_prime(const mpz_class& p) {
    if (!mpz_fits_ulong_p(p.get_mpz_t())) throw unsupported("prime " + p.get_str() + " does not fit in 64 bits");
    return p.get_ui();
}

/// Apply RULE A / RULE B to one relation; returns its new state.
inline RelationState examine(PrincipalityLedger& ledger, const Relation& rel) {
    std::vector<std::uint64_t> unknown;
    bool exact_degrees = true;
    for (const auto& [pz, a] : rel.factorization.factors) {
        const std::uint64_t p = small_prime(pz);
        const LedgerEntry& e = ledger.entries.at(p);
        if (a != e.residue_degree) exact_degrees = false;
        if (e.status == PrimeStatus::unknown) unknown.push_back(p);
    }
    if (!exact_degrees) return unknown.empty() ? RelationState::uninformative : RelationState::pending;
    if (unknown.empty()) return RelationState::uninformative;
    if (unknown.size() > 1) return RelationState::pending;

    LedgerEntry& target = ledger.entries.at(unknown.front());
    target.status = PrimeStatus::principal;
    target.rule = rel.factorization.factors.size() == 1 ? "A" : "B";
    target.evidence = {rel.id};
    for (const auto& [pz, a] : rel.factorization.factors) {
        const std::uint64_t p = small_prime(pz);
        if (p == unknown.front()) continue;
        for (const auto& id : ledger.entries.at(p).evidence)
            if (std::find(target.evidence.begin(), target.evidence.end(), id) == target.evidence.end())
                target.evidence.push_back(id);
    }
    return RelationState::used;
}

} // namespace detail

/// Record `relation` and re-examine pending relations until nothing changes.
/// Throws when the factorization is incomplete, a residue degree is missing,
/// or an exponent is not a multiple of the residue degree.
inline PrincipalityLedger deduce(PrincipalityLedger ledger, const Relation& relation, const DegreeLookup& degrees) {
    if (!relation.factorization.complete) throw invalid_input("relation " + relation.id + " has an incomplete factorization");
    if (relation.factorization.product() != relation.norm)
        throw invalid_input("relation " + relation.id + ": factorization does not multiply to the norm");
    if (ledger.states.count(relation.id)) {
        for (const auto& r : ledger.relations)
            if (r.id == relation.id && (r.norm != relation.norm || r.factorization.factors != relation.factorization.factors))
                throw invalid_input("relation id " + relation.id + " reused with different data");
        return ledger;
    }
    for (const auto& [pz, a] : relation.factorization.factors) {
        const std::uint64_t p = detail::small_prime(pz);
        if (!ledger.entries.count(p)) {
            const auto f = degrees(p);
            if (!f) throw invalid_input("residue degree of " + pz.get_str() + " is unknown (relation " + relation.id + ")");
            ledger.entries[p].residue_degree = *f;
        }
        const int f = ledger.entries.at(p).residue_degree;
        if (a % f != 0)
            throw arithmetic_error("relation " + relation.id + ": exponent " + std::to_string(a) + " of " + pz.get_str() +
                                   " is not a multiple of its residue degree " + std::to_string(f));
    }
    ledger.relations.push_back(relation);
    ledger.states[relation.id] = RelationState::pending;

    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& r : ledger.relations) {
            if (ledger.states.at(r.id) != RelationState::pending) continue;
            const RelationState s = detail::examine(ledger, r);
            if (s != RelationState::pending) {
                ledger.states[r.id] = s;
                changed = changed || s == RelationState::used;
            }
        }
    }
    return ledger;
}

/// Ledger obtained by feeding `relations` in order to an empty ledger.
inline PrincipalityLedger replay(const std::vector<Relation>& relations, const DegreeLookup& degrees,
                                 const std::set<std::uint64_t>& ramified = {}) {
    PrincipalityLedger ledger;
    ledger.ramified = ramified;
    for (const auto& r : relations) ledger = deduce(std::move(ledger), r, degrees);
    return ledger;
}

/// Every PRINCIPAL entry's evidence is a chain of recorded relations whose
/// deciding relation is either a pure prime power of exponent f (rule A), or
/// exact-degree with every other prime itself principal through evidence
/// already in the chain (rule B).
inline bool evidence_is_sound(const PrincipalityLedger& ledger) {
    std::map<std::string, const Relation*> by_id;
    for (const auto& r : ledger.relations) by_id[r.id] = &r;
    std::function<bool(std::uint64_t, std::set<std::uint64_t>&)> sound = [&](std::uint64_t p, std::set<std::uint64_t>& visiting) {
        const auto* e = ledger.find(p);
        if (!e || e->status != PrimeStatus::principal || e->evidence.empty()) return false;
        if (!visiting.insert(p).second) return false; // cycle
        auto it = by_id.find(e->evidence.front());
        if (it == by_id.end()) return false;
        const Relation& r = *it->second;
        bool ok = true;
        for (const auto& [qz, a] : r.factorization.factors) {
            const std::uint64_t q = qz.get_ui();
            const auto* eq = ledger.find(q);
            if (!eq || a != eq->residue_degree) return false;
            if (q != p) ok = ok && sound(q, visiting);
        }
        visiting.erase(p);
        return ok && r.factorization.factors.count(mpz_class(static_cast<unsigned long>(p)));
    };
    for (const auto& [p, e] : ledger.entries) {
        if (e.status != PrimeStatus::principal) continue;
        std::set<std::uint64_t> visiting;
        if (!sound(p, visiting)) return false;
    }
    return true;
}

/// PRINCIPAL primes with their residue degrees, ramified primes excluded,
/// ascending by p.
inline std::vector<PrimeSetEntry> build_prime_set(const PrincipalityLedger& ledger) {
    std::vector<PrimeSetEntry> out;
    for (const auto& [p, e] : ledger.entries)
        if (e.status == PrimeStatus::principal && !ledger.ramified.count(p)) out.push_back({p, e.residue_degree});
    return out;
}

/// Counts of PRINCIPAL primes by residue degree (ramified excluded).
inline std::map<int, int> principal_counts(const PrincipalityLedger& ledger) {
    std::map<int, int> c;
    for (const auto& e : build_prime_set(ledger)) ++c[e.f];
    return c;
}

// ---------------------------------------------------------------------------
// Files.

inline const char* to_string(RelationState s) {
    switch (s) {
    case RelationState::pending: return "PENDING";
    case RelationState::used: return "USED";
    case RelationState::uninformative: return "UNINFORMATIVE";
    }
    return "?";
}

inline Factorization factorization_from_json(const json& j) {
    Factorization f;
    for (const auto& [k, v] : j.items()) {
        const mpz_class p(k);
        if (!is_prime(p)) throw invalid_input("factorization lists non-prime " + k);
        f.factors[p] = v.get<int>();
    }
    return f;
}

inline json relation_to_json(const Relation& r, RelationState state) {
    json j;
    j["id"] = r.id;
    if (r.element)
        j["element"] = {{"support", r.element->support}, {"coefficients", r.element->coefficients},
                        {"label", r.element->label()}};
    j["norm"] = r.norm.get_str();
    j["factorization"] = factorization_to_json(r.factorization);
    j["state"] = to_string(state);
    return j;
}

inline Relation relation_from_json(const json& j) {
    Relation r;
    if (j.contains("element")) {
        SparseCandidate c;
        c.support = j.at("element").at("support").get<std::vector<int>>();
        c.coefficients = j.at("element").at("coefficients").get<std::vector<long>>();
        if (c.support.size() != c.coefficients.size() || c.support.empty())
            throw invalid_input("relation element needs matching nonempty support and coefficients");
        r.element = c;
    }
    r.norm = parse_integer(j.at("norm"));
    r.factorization = factorization_from_json(j.at("factorization"));
    if (j.contains("id")) r.id = j.at("id").get<std::string>();
    else if (r.element) r.id = r.element->label();
    else r.id = "N=" + r.norm.get_str();
    return r;
}

inline json ledger_to_json(const PrincipalityLedger& ledger) {
    json j;
    j["format_version"] = 1;
    json rels = json::array();
    for (const auto& r : ledger.relations) rels.push_back(relation_to_json(r, ledger.states.at(r.id)));
    j["relations"] = std::move(rels);
    json st = json::array();
    for (const auto& [p, e] : ledger.entries) {
        json s = {{"p", p}, {"residue_degree", e.residue_degree}, {"status", to_string(e.status)}, {"evidence", e.evidence}};
        if (!e.rule.empty()) s["rule"] = e.rule;
        if (ledger.ramified.count(p)) s["ramified"] = true;
        st.push_back(std::move(s));
    }
    j["statuses"] = std::move(st);
    j["ramified_primes"] = std::vector<std::uint64_t>(ledger.ramified.begin(), ledger.ramified.end());
    return j;
}

/// Relations of a ledger or relations file (statuses are re-derived, never trusted).
inline std::vector<Relation> relations_from_json(const json& j) {
    if (j.value("format_version", 0) != 1) throw invalid_input("ledger file: unsupported format_version");
    std::vector<Relation> out;
    for (const auto& r : j.at("relations")) out.push_back(relation_from_json(r));
    return out;
}

/// Aligned text table of relations.
inline std::string relations_table(const PrincipalityLedger& ledger) {
    std::size_t w1 = 7, w2 = 4;
    for (const auto& r : ledger.relations) {
        w1 = std::max(w1, r.id.size());
        w2 = std::max(w2, r.factorization.to_string().size());
    }
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(w1)) << "Element" << "  " << std::setw(static_cast<int>(w2)) << "Norm"
       << "  State\n";
    for (const auto& r : ledger.relations)
        os << std::setw(static_cast<int>(w1)) << r.id << "  " << std::setw(static_cast<int>(w2))
           << r.factorization.to_string() << "  " << to_string(ledger.states.at(r.id)) << "\n";
    return os.str();
}

} // namespace classbound

#endif // CLASSBOUND_LEDGER_HPP
