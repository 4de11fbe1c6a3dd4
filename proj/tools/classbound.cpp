// classbound: command-line front end.
//
//   classbound split   --poly P.json --primes 13,19,653
//   classbound bound   --request R.json [--c 24.5 | --c-grid 10,24.5,40]
//   classbound reduce  --field F.json [--basis B.json] --out reduced.json
//   classbound search  --field F.json --basis reduced.json --out ledger.json
//   classbound certify --config C.json [--out report.json]

#include <CLI/CLI.hpp>

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "classbound.hpp"

namespace cb = classbound;

namespace {

cb::mp::prec_t default_precision() {
    if (const char* env = std::getenv("CLASSBOUND_PRECISION_BITS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 53 || v > 65536)
            throw cb::invalid_input("CLASSBOUND_PRECISION_BITS must be an integer in [53, 65536]");
        return v;
    }
    return cb::mp::default_precision;
}

std::vector<std::uint64_t> parse_prime_list(const std::string& s) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != item.size()) throw cb::invalid_input("not an integer: '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw cb::invalid_input("empty prime list");
    return out;
}

std::vector<long> parse_long_list(const std::string& s) {
    std::vector<long> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        long v = 0;
        try {
            v = std::stol(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (item.empty() || pos != item.size()) throw cb::invalid_input("not an integer: '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<std::pair<cb::mp::Real, std::string>> parse_c_list(const std::string& s, cb::mp::prec_t prec) {
    std::vector<std::pair<cb::mp::Real, std::string>> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.emplace_back(cb::parse_positive_decimal(item, prec, "c"), item);
    if (out.empty()) throw cb::invalid_input("empty c grid");
    return out;
}

cb::NumberField load_field_with_basis(const std::string& field_path, const std::string& basis_path,
                                      cb::mp::prec_t prec) {
    cb::NumberField k = cb::load_field_file(field_path, {prec});
    if (!basis_path.empty()) k.integral_basis = cb::integral_basis_from_json(cb::read_json_file(basis_path), k.degree);
    return k;
}

void emit(const std::string& out, const cb::json& j) {
    if (out.empty()) return;
    cb::LockFile lock(out);
    cb::write_json_file(out, j);
}

// ---------------------------------------------------------------------------

struct SplitArgs {
    std::string poly, primes, out;
};

int run_split(const SplitArgs& a) {
    const cb::json doc = cb::read_json_file(a.poly);
    cb::ZPoly g;
    for (const char* key : {"polynomial", "is_splitting_field_of", "defining_polynomial"})
        if (doc.contains(key)) {
            g = cb::parse_poly(doc.at(key));
            break;
        }
    if (g.empty()) throw cb::invalid_input(a.poly + ": no polynomial found");
    std::set<std::uint64_t> ramified;
    for (const auto& p : doc.value("ramified_primes", cb::json::array())) ramified.insert(p.get<std::uint64_t>());

    cb::json rows = cb::json::array();
    std::cout << std::left << std::setw(10) << "p" << std::setw(16) << "residue degree" << "factor degrees\n";
    for (const auto p : parse_prime_list(a.primes)) {
        const auto st = cb::splitting_type(g, p);
        std::string degree;
        if (st.residue_degree) degree = std::to_string(*st.residue_degree);
        else if (ramified.count(p)) degree = "RAMIFIED";
        else degree = "NOT SQUAREFREE";
        std::string factors;
        for (int d : st.factor_degrees) factors += (factors.empty() ? "" : " ") + std::to_string(d);
        std::cout << std::setw(10) << p << std::setw(16) << degree << factors << "\n";
        cb::json r = {{"p", p}, {"factor_degrees", st.factor_degrees}, {"squarefree_mod_p", st.squarefree_mod_p}};
        if (st.residue_degree) r["residue_degree"] = *st.residue_degree;
        else r["status"] = degree;
        rows.push_back(std::move(r));
    }
    emit(a.out, {{"format_version", 1}, {"polynomial", cb::poly_to_json(g)}, {"primes", rows}});
    return 0;
}

struct BoundArgs {
    std::string request, out, c, c_grid;
    double tolerance = 0;
    long precision = 0;
};

int run_bound(const BoundArgs& a) {
    const cb::mp::prec_t prec = a.precision > 0 ? a.precision : default_precision();
    cb::BoundRequest req = cb::bound_request_from_json(cb::read_json_file(a.request), prec);
    if (!a.c.empty()) req.c_values = parse_c_list(a.c, prec);
    if (!a.c_grid.empty()) req.c_values = parse_c_list(a.c_grid, prec);
    if (a.tolerance > 0) req.inputs.tolerance = a.tolerance;
    const cb::BoundReport r = req.c_values.size() == 1 ? cb::class_bound(req.inputs, req.c_values[0].first, req.c_values[0].second)
                                                       : cb::scan_c(req.inputs, req.c_values);
    std::cout << cb::bound_report_text(r);
    emit(a.out, cb::bound_report_to_json(r));
    return 0;
}

struct ReduceArgs {
    std::string field, basis, out;
    int max_rounds = 1000, stall_rounds = 5;
    long precision = 0;
};

int run_reduce(const ReduceArgs& a) {
    if (a.max_rounds < 1) throw cb::invalid_input("--max-rounds must be >= 1");
    if (a.stall_rounds < 1) throw cb::invalid_input("--stall-rounds must be >= 1");
    if (a.field.empty()) throw cb::invalid_input("reduce needs --field");
    const cb::mp::prec_t prec = a.precision > 0 ? a.precision : default_precision();
    const cb::NumberField k = load_field_with_basis(a.field, a.basis, prec);
    auto [b, t, r] = cb::reduce_field_basis(k, prec, {a.max_rounds, a.stall_rounds, 0.99});
    const auto lens = cb::row_lengths(b);
    std::cout << "rounds " << r.iterations << (r.stalled ? " (stalled)" : "") << ", lengths "
              << *std::min_element(lens.begin(), lens.end()) << " .. " << *std::max_element(lens.begin(), lens.end())
              << " at " << b.precision_bits << " bits\n";
    const auto rows = cb::basis_rows(k);
    emit(a.out, cb::reduced_basis_to_json(b, t, r, k.integral_basis ? &rows : nullptr));
    return 0;
}

struct SearchArgs {
    std::string field, basis, out, coeffs = "-1,1", max_norm = "10000000000", smooth = "100000";
    int k_max = 3;
    unsigned threads = 1;
    std::uint64_t seed = 1;
    long precision = 0;
};

int run_search(const SearchArgs& a) {
    if (a.field.empty() || a.basis.empty()) throw cb::invalid_input("search needs --field and --basis");
    const cb::mp::prec_t prec = a.precision > 0 ? a.precision : default_precision();
    const cb::NumberField k = cb::load_field_file(a.field, {prec});
    const auto reduced = cb::reduced_basis_from_json(cb::read_json_file(a.basis));
    cb::SearchOptions opt;
    opt.k_max = a.k_max;
    opt.coefficients = parse_long_list(a.coeffs);
    opt.norm_limit = cb::parse_integer(cb::json(a.max_norm));
    opt.smoothness_limit = cb::parse_integer(cb::json(a.smooth));
    opt.threads = a.threads;
    opt.seed = a.seed;
    const auto found = cb::search(k, reduced, opt);
    std::vector<cb::Relation> relations;
    for (const auto& e : found) relations.push_back(cb::make_relation(e));
    const auto ledger = cb::ledger_for(relations, k);
    std::cout << found.size() << " elements kept, " << ledger.relations.size() << " usable relations\n";
    std::cout << cb::relations_table(ledger);
    cb::json j = cb::ledger_to_json(ledger);
    cb::json all = cb::json::array();
    for (const auto& e : found) all.push_back(cb::normed_element_to_json(e));
    j["search_results"] = std::move(all);
    emit(a.out, j);
    return 0;
}

struct CertifyArgs {
    std::string config, field, basis, ledger, out;
    long precision = 0;
    std::uint64_t seed = 0;
};

int run_certify(const CertifyArgs& a) {
    const auto dir = std::filesystem::path(a.config).parent_path().string();
    cb::PipelineConfig cfg = cb::pipeline_config_from_json(cb::read_json_file(a.config), dir, default_precision());
    if (!a.field.empty()) cfg.field_file = a.field;
    if (!a.basis.empty()) cfg.basis_file = a.basis;
    if (!a.ledger.empty()) cfg.ledger_file = a.ledger;
    if (a.precision > 0) cfg.precision_bits = a.precision;
    if (a.seed > 0) cfg.seed = cfg.search.seed = a.seed;
    std::optional<cb::LockFile> lock;
    if (!a.out.empty()) lock.emplace(a.out);
    const auto report = cb::run_pipeline(cfg);
    std::cout << cb::certification_report_text(report);
    if (!a.out.empty()) cb::write_json_file(a.out, cb::certification_report_to_json(report));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified class-number upper bounds for totally complex Galois fields"};
    app.require_subcommand(1);

    SplitArgs split;
    auto* s = app.add_subcommand("split", "factorization pattern of a polynomial modulo primes");
    s->add_option("--poly", split.poly, "JSON file with 'polynomial'")->required();
    s->add_option("--primes", split.primes, "comma-separated primes")->required();
    s->add_option("--out", split.out, "JSON output");

    BoundArgs bound;
    auto* b = app.add_subcommand("bound", "class-number bound from a prime set");
    b->add_option("--request", bound.request, "bound request JSON")->required();
    auto* bc = b->add_option("--c", bound.c, "Gaussian width c");
    b->add_option("--c-grid", bound.c_grid, "comma-separated c values to scan")->excludes(bc);
    b->add_option("--tolerance", bound.tolerance, "quadrature tolerance");
    b->add_option("--precision-bits", bound.precision, "working precision");
    b->add_option("--out", bound.out, "JSON report");

    ReduceArgs reduce;
    auto* r = app.add_subcommand("reduce", "sort-and-reduce loop on the embedded integral basis");
    r->add_option("--field", reduce.field, "field description JSON");
    r->add_option("--basis", reduce.basis, "integral-basis JSON (overrides the field's)");
    r->add_option("--max-rounds", reduce.max_rounds, "round cap (>= 1)");
    r->add_option("--stall-rounds", reduce.stall_rounds, "rounds without improvement before stopping");
    r->add_option("--precision-bits", reduce.precision, "initial working precision");
    r->add_option("--out", reduce.out, "reduced-basis JSON");

    SearchArgs search;
    auto* se = app.add_subcommand("search", "sparse-vector norm search and principality ledger");
    se->add_option("--field", search.field, "field description JSON");
    se->add_option("--basis", search.basis, "reduced-basis JSON");
    se->add_option("--k-max", search.k_max, "maximum support size");
    se->add_option("--coeffs", search.coeffs, "comma-separated coefficient set");
    se->add_option("--max-norm", search.max_norm, "largest norm kept");
    se->add_option("--smooth", search.smooth, "smoothness limit for composite norms");
    se->add_option("--threads", search.threads, "worker threads");
    se->add_option("--seed", search.seed, "factoring seed");
    se->add_option("--precision-bits", search.precision, "working precision");
    se->add_option("--out", search.out, "ledger JSON");

    CertifyArgs certify;
    auto* c = app.add_subcommand("certify", "run the whole pipeline from a config file");
    c->add_option("--config", certify.config, "pipeline config JSON")->required();
    c->add_option("--field", certify.field, "field description JSON (overrides the config)");
    c->add_option("--basis", certify.basis, "reduced-basis JSON; skips the reduce stage");
    c->add_option("--ledger", certify.ledger, "ledger JSON; skips the search stage");
    c->add_option("--precision-bits", certify.precision, "working precision");
    c->add_option("--seed", certify.seed, "seed");
    c->add_option("--out", certify.out, "certification report JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : cb::exit_code(cb::ErrorKind::invalid_input);
    }

    try {
        if (*s) return run_split(split);
        if (*b) return run_bound(bound);
        if (*r) return run_reduce(reduce);
        if (*se) return run_search(search);
        if (*c) return run_certify(certify);
    } catch (const cb::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return cb::exit_code(e.kind());
    } catch (const cb::json::exception& e) {
        std::cerr << "error: malformed JSON: " << e.what() << "\n";
        return cb::exit_code(cb::ErrorKind::invalid_input);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
