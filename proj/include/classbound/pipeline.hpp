#ifndef CLASSBOUND_PIPELINE_HPP
#define CLASSBOUND_PIPELINE_HPP

// End-to-end driver: field -> reduced basis -> search -> ledger -> prime set
// -> bound -> certification report.

#include <fcntl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "classbound/bound.hpp"
#include "classbound/error.hpp"
#include "classbound/field.hpp"
#include "classbound/lattice.hpp"
#include "classbound/ledger.hpp"
#include "classbound/search.hpp"

namespace classbound {

inline constexpr const char* tool_version = "0.3.0";

struct ThresholdRule {
    long bound_strictly_less_than = 0;
    long conclude_class_number = 0;
    std::string justification;
};

struct PipelineConfig {
    std::string field_file;
    std::optional<std::string> basis_file;  // reduced-basis file; skips reduction
    std::optional<std::string> ledger_file; // relations; skips search
    std::optional<std::vector<PrimeSetEntry>> prime_set; // skips search and deduction
    mp::prec_t precision_bits = mp::default_precision;
    std::uint64_t seed = 1;
    LoopOptions reduce;
    SearchOptions search;
    std::vector<std::pair<mp::Real, std::string>> c_values;
    double tolerance = 1e-6;
    std::optional<ThresholdRule> threshold_rule;
};

struct ThresholdConclusion {
    bool applies = false;
    long class_number = 0;
    std::string statement;
    std::string justification;
};

struct CertificationReport {
    json field_summary;
    json ledger_summary;
    BoundReport bound;
    std::optional<ThresholdConclusion> conclusion;
    json provenance;
    std::vector<std::string> stages;
};

// ---------------------------------------------------------------------------

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw io_error("SHA-256 computation failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

/// Exclusive `<path>.lock`, removed on destruction.
class LockFile {
public:
    explicit LockFile(std::string target) : path_(std::move(target) + ".lock") {
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) {
            if (errno == EEXIST) throw io_error("output is locked by another run: " + path_);
            throw io_error("cannot create lock " + path_ + ": " + std::strerror(errno));
        }
    }
    LockFile(const LockFile&) = delete;
    LockFile& operator=(const LockFile&) = delete;
    ~LockFile() {
        ::close(fd_);
        ::unlink(path_.c_str());
    }

private:
    std::string path_;
    int fd_ = -1;
};

/// Write through a temporary file and rename, so readers never see half a file.
inline void write_text_file(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw io_error("cannot write " + path);
        out << text;
        if (!out) throw io_error("write failed for " + path);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw io_error("cannot move " + tmp + " to " + path + ": " + ec.message());
}

inline void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------

inline std::vector<PrimeSetEntry> prime_set_from_json(const json& j) {
    std::vector<PrimeSetEntry> out;
    for (const auto& e : j) out.push_back({e.at("p").get<std::uint64_t>(), e.at("f").get<int>()});
    return out;
}

inline ThresholdRule threshold_rule_from_json(const json& j) {
    ThresholdRule r;
    r.bound_strictly_less_than = j.at("bound_strictly_less_than").get<long>();
    r.conclude_class_number = j.at("conclude_class_number").get<long>();
    r.justification = j.value("justification", std::string());
    if (r.justification.find_first_not_of(" \t\r\n") == std::string::npos)
        throw invalid_input("threshold_rule needs a nonempty justification");
    if (r.conclude_class_number < 1 || r.conclude_class_number >= r.bound_strictly_less_than)
        throw invalid_input("threshold_rule: conclude_class_number must be >= 1 and below the threshold");
    return r;
}

/// Pipeline configuration file; relative paths are resolved against its directory.
inline PipelineConfig pipeline_config_from_json(const json& j, const std::string& base_dir,
                                                mp::prec_t default_precision = mp::default_precision) {
    if (!j.is_object() || j.value("format_version", 0) != 1)
        throw invalid_input("pipeline config: missing or unsupported format_version");
    const auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() || base_dir.empty() ? p : (std::filesystem::path(base_dir) / fp).string();
    };
    PipelineConfig c;
    if (!j.contains("field")) throw invalid_input("pipeline config needs 'field'");
    c.field_file = resolve(j.at("field").get<std::string>());
    if (j.contains("basis")) c.basis_file = resolve(j.at("basis").get<std::string>());
    if (j.contains("ledger")) c.ledger_file = resolve(j.at("ledger").get<std::string>());
    if (j.contains("prime_set")) c.prime_set = prime_set_from_json(j.at("prime_set"));
    c.precision_bits = j.value("precision_bits", static_cast<long>(default_precision));
    c.seed = j.value("seed", std::uint64_t{1});
    if (j.contains("reduce")) {
        const auto& r = j.at("reduce");
        c.reduce.max_rounds = r.value("max_rounds", c.reduce.max_rounds);
        c.reduce.stall_rounds = r.value("stall_rounds", c.reduce.stall_rounds);
        c.reduce.delta = r.value("delta", c.reduce.delta);
    }
    if (j.contains("search")) {
        const auto& s = j.at("search");
        c.search.k_max = s.value("k_max", c.search.k_max);
        if (s.contains("coefficients")) c.search.coefficients = s.at("coefficients").get<std::vector<long>>();
        if (s.contains("norm_limit")) c.search.norm_limit = parse_integer(s.at("norm_limit"));
        if (s.contains("smoothness_limit")) c.search.smoothness_limit = parse_integer(s.at("smoothness_limit"));
        c.search.threads = s.value("threads", 1u);
    }
    c.search.seed = c.seed;
    if (j.contains("bound")) {
        const auto& b = j.at("bound");
        c.c_values = c_values_from_json(b, c.precision_bits).first;
        if (b.contains("tolerance")) c.tolerance = std::stod(decimal_text(b.at("tolerance")));
        if (!(c.tolerance > 0)) throw invalid_input("tolerance must be positive");
    } else {
        throw invalid_input("pipeline config needs a 'bound' section with c or c_grid");
    }
    if (j.contains("threshold_rule")) c.threshold_rule = threshold_rule_from_json(j.at("threshold_rule"));
    return c;
}

namespace detail {

template <class F>
auto stage(const std::string& name, F&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.kind(), "stage " + name + ": " + e.what());
    } catch (const json::exception& e) {
        throw invalid_input("stage " + name + ": " + e.what());
    }
}

inline void hash_input(json& inputs, const std::string& role, const std::string& path) {
    inputs.push_back({{"role", role}, {"path", path}, {"sha256", sha256_hex(read_text_file(path))}});
}

} // namespace detail

/// Bound inputs for a loaded field and prime set.
inline BoundInputs bound_inputs_for(const NumberField& field, const std::vector<PrimeSetEntry>& primes, double tolerance,
                                    mp::prec_t prec) {
    if (!field.totally_complex()) throw invalid_input("the bound needs a totally complex field");
    if (!field.discriminant) throw invalid_input("the field description needs 'discriminant' for the bound");
    BoundInputs in;
    in.degree = field.degree;
    in.discriminant = *field.discriminant;
    in.primes = primes;
    if (field.ramified_primes) in.ramified_primes.insert(field.ramified_primes->begin(), field.ramified_primes->end());
    in.tolerance = tolerance;
    in.precision = prec;
    return in;
}

/// Relations usable for deduction: complete factorizations avoiding
/// possibly ramified primes.
inline std::vector<Relation> usable_relations(const std::vector<Relation>& all, const NumberField& field) {
    std::vector<Relation> out;
    for (const auto& r : all) {
        if (!r.factorization.complete) continue;
        bool ok = true;
        for (const auto& [p, e] : r.factorization.factors)
            ok = ok && mpz_fits_ulong_p(p.get_mpz_t()) && !field.possibly_ramified(p.get_ui());
        if (ok) out.push_back(r);
    }
    return out;
}

inline PrincipalityLedger ledger_for(const std::vector<Relation>& relations, const NumberField& field) {
    std::set<std::uint64_t> ramified;
    if (field.ramified_primes) ramified.insert(field.ramified_primes->begin(), field.ramified_primes->end());
    return replay(usable_relations(relations, field), degrees_from_field(field), ramified);
}

inline json ledger_summary(const PrincipalityLedger& ledger) {
    json counts = json::object();
    for (const auto& [f, n] : principal_counts(ledger)) counts[std::to_string(f)] = n;
    return {{"relations", ledger.relations.size()},
            {"pending", ledger.pending().size()},
            {"principal_by_degree", counts}};
}

inline CertificationReport run_pipeline(const PipelineConfig& cfg) {
    CertificationReport rep;
    json inputs = json::array();
    if (!std::filesystem::exists(cfg.field_file)) throw io_error("field file not found: " + cfg.field_file);
    const NumberField field = detail::stage("field", [&] {
        detail::hash_input(inputs, "field", cfg.field_file);
        return load_field_file(cfg.field_file, {cfg.precision_bits});
    });
    rep.stages.push_back("field");
    rep.field_summary = {{"degree", field.degree},
                         {"signature", {field.num_real, field.num_complex_pairs}},
                         {"galois_group", field.galois_group.value_or("")},
                         {"basis", basis_name(field)}};

    std::vector<PrimeSetEntry> primes;
    if (cfg.prime_set) {
        primes = detail::stage("prime_set", [&] {
            for (const auto& [p, f] : *cfg.prime_set) {
                if (field.possibly_ramified(p)) throw invalid_input("prime " + std::to_string(p) + " is ramified");
                if (field.splitting_poly) {
                    const auto fp = residue_degree(field, p);
                    if (!fp || *fp != f)
                        throw invalid_input("prime " + std::to_string(p) + " listed with degree " + std::to_string(f) +
                                            " but its residue degree is " + (fp ? std::to_string(*fp) : "undetermined"));
                }
            }
            return *cfg.prime_set;
        });
        rep.stages.push_back("prime_set");
        std::map<int, int> counts;
        for (const auto& e : primes) ++counts[e.f];
        json c = json::object();
        for (const auto& [f, n] : counts) c[std::to_string(f)] = n;
        rep.ledger_summary = {{"source", "supplied prime set"}, {"principal_by_degree", c}};
    } else {
        std::vector<Relation> relations;
        if (cfg.ledger_file) {
            relations = detail::stage("ledger", [&] {
                detail::hash_input(inputs, "ledger", *cfg.ledger_file);
                return relations_from_json(read_json_file(*cfg.ledger_file));
            });
            rep.stages.push_back("ledger");
        } else {
            ReducedBasisFile reduced;
            if (cfg.basis_file) {
                reduced = detail::stage("basis", [&] {
                    detail::hash_input(inputs, "basis", *cfg.basis_file);
                    return reduced_basis_from_json(read_json_file(*cfg.basis_file));
                });
                rep.stages.push_back("basis");
            } else {
                reduced = detail::stage("reduce", [&] {
                    auto [b, t, r] = reduce_field_basis(field, cfg.precision_bits, cfg.reduce);
                    return reduced_basis_from_json(reduced_basis_to_json(b, t, r));
                });
                rep.stages.push_back("reduce");
            }
            const auto found = detail::stage("search", [&] { return search(field, reduced, cfg.search); });
            rep.stages.push_back("search");
            for (const auto& e : found) relations.push_back(make_relation(e));
        }
        const auto ledger = detail::stage("deduce", [&] { return ledger_for(relations, field); });
        rep.stages.push_back("deduce");
        primes = build_prime_set(ledger);
        rep.ledger_summary = ledger_summary(ledger);
        rep.ledger_summary["source"] = cfg.ledger_file ? "ledger file" : "search";
    }

    rep.bound = detail::stage("bound", [&] {
        const auto in = bound_inputs_for(field, primes, cfg.tolerance, cfg.precision_bits);
        if (cfg.c_values.empty()) throw invalid_input("no value of c given");
        return scan_c(in, cfg.c_values);
    });
    rep.stages.push_back("bound");

    if (cfg.threshold_rule) {
        ThresholdConclusion t;
        const auto& rule = *cfg.threshold_rule;
        t.justification = rule.justification;
        const mp::Real limit(rule.bound_strictly_less_than, rep.bound.h_bound.precision());
        t.applies = rep.bound.outcome == BoundOutcome::bound && rep.bound.h_bound < limit;
        if (t.applies) {
            t.class_number = rule.conclude_class_number;
            t.statement = "h < " + std::to_string(rule.bound_strictly_less_than) + ", so h = " +
                          std::to_string(rule.conclude_class_number);
        } else {
            t.statement = "no conclusion: h_bound is not below " + std::to_string(rule.bound_strictly_less_than);
        }
        rep.conclusion = t;
    }

    rep.provenance = {{"tool_version", tool_version},
                      {"precision_bits", cfg.precision_bits},
                      {"seed", cfg.seed},
                      {"inputs", inputs}};
    return rep;
}

inline json certification_report_to_json(const CertificationReport& r) {
    json j;
    j["format_version"] = 1;
    j["field"] = r.field_summary;
    j["ledger"] = r.ledger_summary;
    j["bound"] = bound_report_to_json(r.bound);
    j["stages"] = r.stages;
    if (r.conclusion) {
        j["threshold_conclusion"] = {{"applies", r.conclusion->applies},
                                     {"statement", r.conclusion->statement},
                                     {"justification", r.conclusion->justification}};
        if (r.conclusion->applies) j["threshold_conclusion"]["class_number"] = r.conclusion->class_number;
    }
    j["provenance"] = r.provenance;
    return j;
}

inline std::string certification_report_text(const CertificationReport& r) {
    std::ostringstream os;
    os << "field: degree " << r.field_summary.at("degree").get<int>() << ", signature "
       << r.field_summary.at("signature").dump() << "\n";
    os << "principal primes by residue degree: " << r.ledger_summary.at("principal_by_degree").dump() << "\n";
    os << bound_report_text(r.bound);
    if (r.conclusion) os << r.conclusion->statement << "\n";
    return os.str();
}

} // namespace classbound

#endif // CLASSBOUND_PIPELINE_HPP
