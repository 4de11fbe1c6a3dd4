// One PASS / FAIL / SKIPPED line per acceptance criterion. Exit status is
// nonzero iff some criterion fails. Criterion 8 needs an integral basis for
// KL, given as argv[1] or in CLASSBOUND_KL_BASIS.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "classbound.hpp"
#include "oracles.hpp"

namespace cb = classbound;
namespace mp = classbound::mp;
using oracle::Big;

namespace {

const std::string data_dir = CLASSBOUND_DATA_DIR;

struct Outcome {
    enum { pass, fail, skipped } state = pass;
    std::string detail;
};

struct Checker {
    Outcome out;
    void require(bool ok, const std::string& what) {
        if (!ok && out.state == Outcome::pass) {
            out.state = Outcome::fail;
            out.detail = what;
        }
    }
};

const std::vector<std::uint64_t> degree_one = {
    3571,  5477,  6361,  7499,  8867,  10753, 11681, 12619, 15679, 16561, 17203,  19963,  20047,  23431,  23531,  25343,  31477,  32309,
    33403, 34613, 35537, 41621, 43787, 44879, 45361, 46271, 48179, 48341, 54311, 56359, 58601, 95327, 111611, 113081, 137927, 139999};
const std::vector<std::uint64_t> degree_two = {13, 19, 83, 89, 109, 137, 227, 229, 251, 383, 433};
const std::vector<std::uint64_t> degree_three = {7, 11, 23};

cb::ZPoly eq2() { return cb::parse_poly(cb::read_json_file(data_dir + "/eq2_poly.json").at("polynomial")); }

std::string fmt(double v, int digits = 5) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

// ---------------------------------------------------------------------------

Outcome paper_bound() {
    Checker c;
    cb::BoundInputs in;
    in.degree = 120;
    in.root_discriminant = std::nullopt;
    mpz_class d = 653;
    mpz_pow_ui(d.get_mpz_t(), d.get_mpz_t(), 60);
    in.discriminant = d;
    for (auto p : degree_one) in.primes.push_back({p, 1});
    for (auto p : degree_two) in.primes.push_back({p, 2});
    for (auto p : degree_three) in.primes.push_back({p, 3});
    const auto r = cb::class_bound(in, mp::Real::from_string("24.5", in.precision), "24.5");
    const double g = r.integral.hi().to_double(), ps = r.prime_sum.lo().to_double(), b = r.b_lower().to_double();
    c.require(in.primes.size() == 50, "prime set is not 36 + 11 + 3");
    c.require(g <= 0.70010 && std::abs(g - 0.70010) <= 1e-5, "integral upper bound " + fmt(g, 8));
    c.require(ps > 0.18797 && std::abs(ps - 0.18797) <= 1e-5, "prime-sum lower bound " + fmt(ps, 8));
    c.require(std::abs(r.gamma.lo().to_double() - 0.57721) <= 1e-5, "gamma");
    c.require(std::abs(r.log_8pi.lo().to_double() - 3.22417) <= 1e-5, "log 8 pi");
    c.require(std::abs(r.log_rd.hi().to_double() - 3.24079) <= 1e-5, "log rd");
    c.require(b >= 0.04846, "B_lower " + fmt(b, 8));
    c.require(r.outcome == cb::BoundOutcome::bound && r.h_bound.to_double() < 14.94, "h_bound " + fmt(r.h_bound.to_double()));
    c.require(r.conclusion == 14, "conclusion is not h <= 14");
    if (c.out.state == Outcome::pass)
        c.out.detail = "G <= " + r.integral.hi().to_fixed(5, MPFR_RNDU) + ", prime sum > " +
                       r.prime_sum.lo().to_fixed(5, MPFR_RNDD) + ", B >= " + r.b_lower().to_fixed(5, MPFR_RNDD) +
                       ", h < " + r.h_bound.to_fixed(5, MPFR_RNDU) + ", h <= 14";
    return c.out;
}

Outcome splitting_types() {
    Checker c;
    const auto f = eq2();
    const auto check = [&](const std::vector<std::uint64_t>& ps, int f_expected) {
        for (auto p : ps) {
            const auto st = cb::splitting_type(f, p);
            c.require(st.residue_degree == f_expected, "residue degree of " + std::to_string(p));
        }
    };
    check(degree_one, 1);
    check(degree_two, 2);
    check(degree_three, 3);
    for (auto p : degree_one) c.require(cb::is_totally_split(f, p), std::to_string(p) + " not totally split");
    const auto ram = cb::splitting_type(f, 653);
    c.require(!ram.squarefree_mod_p && !ram.residue_degree, "653 does not show as ramified");
    if (c.out.state == Outcome::pass) c.out.detail = "36 x f=1, 11 x f=2, 3 x f=3, 653 ramified";
    return c.out;
}

Outcome galois_orders() {
    Checker c;
    const auto f = eq2();
    const std::set<int> allowed = {1, 2, 3, 5, 6, 10};
    int tested = 0;
    std::vector<std::uint64_t> skipped;
    for (auto p : cb::modular::primes_up_to(1999)) {
        if (p == 653) continue;
        const auto st = cb::splitting_type(f, p);
        if (!st.squarefree_mod_p) {
            // Unramified in KL but dividing the index of Z[x]/(f): the
            // factorization mod p does not determine Frobenius.
            skipped.push_back(p);
            continue;
        }
        ++tested;
        c.require(allowed.count(*st.residue_degree) > 0,
                  "residue degree " + std::to_string(*st.residue_degree) + " at " + std::to_string(p));
    }
    c.require(skipped.size() <= 1 && (skipped.empty() || skipped[0] == 2), "unexpected index divisors");
    if (c.out.state == Outcome::pass) {
        c.out.detail = std::to_string(tested) + " primes checked";
        if (!skipped.empty()) c.out.detail += "; p = 2 skipped (index divisor of the polynomial)";
    }
    return c.out;
}

Outcome known_class_numbers() {
    Checker c;
    const auto cfg = [](const std::string& name) {
        return cb::pipeline_config_from_json(cb::read_json_file(data_dir + "/" + name), data_dir);
    };
    const auto qi = cfg("qi_certify.json");
    c.require(qi.search.k_max == 2 && qi.search.coefficients == std::vector<long>{-2, -1, 1, 2} && qi.c_values.size() == 3,
              "Q(i) config is not the specified one");
    const auto rep = cb::run_pipeline(qi);
    c.require(rep.conclusion && rep.conclusion->applies && rep.conclusion->class_number == 1, "Q(i) does not conclude h = 1");

    const auto m5 = cfg("q_sqrt_m5_certify.json");
    const auto rep5 = cb::run_pipeline(m5);
    c.require(rep5.conclusion && !rep5.conclusion->applies, "Q(sqrt -5) produced a conclusion");
    // Every c on the grid, not only the best one.
    const auto field = cb::load_field_file(m5.field_file);
    const auto reduced = [&] {
        auto [b, t, r] = cb::reduce_field_basis(field, m5.precision_bits, m5.reduce);
        return cb::reduced_basis_from_json(cb::reduced_basis_to_json(b, t, r));
    }();
    std::vector<cb::Relation> rels;
    for (const auto& e : cb::search(field, reduced, m5.search)) rels.push_back(cb::make_relation(e));
    const auto ledger = cb::ledger_for(rels, field);
    const auto in = cb::bound_inputs_for(field, cb::build_prime_set(ledger), m5.tolerance, m5.precision_bits);
    for (const auto& [cv, text] : m5.c_values) {
        const auto r = cb::class_bound(in, cv, text);
        c.require(r.outcome == cb::BoundOutcome::no_bound || (r.conclusion && *r.conclusion >= 2),
                  "Q(sqrt -5) gives h <= 1 at c = " + text);
    }
    if (c.out.state == Outcome::pass)
        c.out.detail = "Q(i): h < " + rep.bound.h_bound.to_fixed(5, MPFR_RNDU) + " at c = " + rep.bound.c_text +
                       "; Q(sqrt -5): best h < " + rep5.bound.h_bound.to_fixed(5, MPFR_RNDU);
    return c.out;
}

cb::IntMatrix random_lattice(std::mt19937_64& rng, std::size_t n, long bound) {
    std::uniform_int_distribution<long> d(-bound, bound);
    while (true) {
        cb::IntMatrix m(n, std::vector<mpz_class>(n));
        for (auto& r : m)
            for (auto& x : r) x = d(rng);
        if (oracle::bareiss_det(m) != 0) return m;
    }
}

double max_length(const cb::IntMatrix& rows) {
    double m = 0;
    for (const auto& r : rows) {
        mpz_class s = 0;
        for (const auto& x : r) s += x * x;
        m = std::max(m, std::sqrt(s.get_d()));
    }
    return m;
}

Outcome lattice_suite() {
    Checker c;
    std::mt19937_64 rng(31337);
    for (int trial = 0; trial < 200 && c.out.state == Outcome::pass; ++trial) {
        const std::size_t n = 2 + trial % 19;
        const auto m = random_lattice(rng, n, trial % 2 ? 100 : 5000);
        const auto basis = cb::from_integer_rows(m, 128);
        const auto [red, t] = cb::lll(basis, 0.99);
        const auto rows = cb::multiply(t.matrix, m);
        const std::string tag = " (lattice " + std::to_string(trial) + ")";
        c.require(abs(oracle::bareiss_det(t.matrix)) == 1, "transform not unimodular" + tag);
        c.require(abs(oracle::bareiss_det(rows)) == abs(oracle::bareiss_det(m)), "|det| changed" + tag);
        const auto gs = oracle::gram_schmidt(rows);
        for (std::size_t k = 1; k < n; ++k) {
            const double lhs = gs.b[k].get_d();
            const double rhs = mpq_class((mpq_class(99, 100) - gs.mu[k][k - 1] * gs.mu[k][k - 1]) * gs.b[k - 1]).get_d();
            c.require(lhs >= rhs * (1 - 1e-9), "Lovasz condition fails" + tag);
        }
        const auto [best, tl, report] = cb::sort_reduce_loop(basis, {});
        c.require(max_length(cb::multiply(tl.matrix, m)) <= max_length(rows) * (1 + 1e-12), "loop worse than one LLL" + tag);
        c.require(!report.best_max_history.empty() && report.best_max_history.front() <= max_length(rows) * (1 + 1e-12),
                  "best max history exceeds single pass" + tag);
    }
    if (c.out.state == Outcome::pass) c.out.detail = "200 lattices, dimensions 2..20";
    return c.out;
}

std::set<std::vector<long>> brute_force(int n, int k_max, const std::vector<long>& coeffs) {
    std::vector<long> choices = {0};
    choices.insert(choices.end(), coeffs.begin(), coeffs.end());
    const std::set<long> cs(coeffs.begin(), coeffs.end());
    std::set<std::vector<long>> out;
    std::vector<long> v(n, 0);
    std::vector<std::size_t> idx(n, 0);
    while (true) {
        int nz = 0;
        for (int i = 0; i < n; ++i) nz += (v[i] = choices[idx[i]]) != 0;
        if (nz >= 1 && nz <= k_max) {
            auto neg = v;
            bool negatable = true;
            for (auto& x : neg) negatable = negatable && ((x = -x) == 0 || cs.count(x));
            if (!negatable || !out.count(neg)) out.insert(v);
        }
        int i = n - 1;
        while (i >= 0 && ++idx[i] == choices.size()) idx[i--] = 0;
        if (i < 0) break;
    }
    return out;
}

Outcome enumeration_and_ledger() {
    Checker c;
    for (const auto& coeffs : std::vector<std::vector<long>>{{-1, 1}, {1}, {-2, -1, 1, 2}})
        for (int n = 1; n <= 10; ++n)
            for (int k = 1; k <= 3; ++k) {
                if (coeffs.size() > 2 && n > 7) continue;
                const auto expect = brute_force(n, k, coeffs).size();
                const auto got = cb::enumerate_sparse(n, k, coeffs).size();
                c.require(got == expect && cb::sparse_count(n, k, coeffs) == expect,
                          "count mismatch at n=" + std::to_string(n) + " k=" + std::to_string(k));
            }
    c.require(cb::sparse_count(120, 3, {-1, 1}) == 1137760, "closed form at n = 120");

    const auto degrees = cb::degrees_from_splitting_poly(eq2());
    auto rels = cb::relations_from_json(cb::read_json_file(data_dir + "/kl_relations.json"));
    const auto status = [](const cb::PrincipalityLedger& l) {
        std::map<std::uint64_t, cb::PrimeStatus> m;
        for (const auto& [p, e] : l.entries) m[p] = e.status;
        return m;
    };
    const auto base = cb::replay(rels, degrees);
    auto again = base;
    for (const auto& r : rels) again = cb::deduce(again, r, degrees);
    c.require(status(again) == status(base), "replay is not idempotent");
    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
        std::shuffle(rels.begin(), rels.end(), rng);
        c.require(status(cb::replay(rels, degrees)) == status(base), "replay depends on order");
    }
    c.require(cb::evidence_is_sound(base), "unsound evidence chain");
    cb::Relation gap;
    gap.id = "c80";
    gap.factorization.factors = {{31147, 1}, {33403, 1}};
    gap.norm = gap.factorization.product();
    c.require(!cb::replay({gap}, degrees).principal(33403), "31147 * 33403 alone certified 33403");
    c.require(!base.principal(33403), "published relations certified 33403");
    if (c.out.state == Outcome::pass)
        c.out.detail = "brute force n <= 10, 1137760 at n = 120, replay stable, 33403 stays unknown";
    return c.out;
}

Big lower(const mp::Interval& v) { return Big(v.lo().to_sci(45, MPFR_RNDD)); }
Big upper(const mp::Interval& v) { return Big(v.hi().to_sci(45, MPFR_RNDU)); }

Outcome rigor_suite() {
    Checker c;
    std::vector<cb::PrimeSetEntry> paper;
    for (auto p : degree_one) paper.push_back({p, 1});
    for (auto p : degree_two) paper.push_back({p, 2});
    for (auto p : degree_three) paper.push_back({p, 3});
    const std::vector<cb::PrimeSetEntry> small = {{5, 1}, {13, 1}, {17, 1}, {29, 1}};
    const std::vector<cb::PrimeSetEntry> mixed = {{2, 1}, {3, 2}, {7, 3}, {11, 5}, {1000003, 1}};
    const std::vector<cb::PrimeSetEntry> two(paper.begin() + 36, paper.begin() + 47);
    const std::vector<std::pair<std::string, std::vector<cb::PrimeSetEntry>>> grid = {
        {"0.1", small}, {"0.25", mixed}, {"0.5", {}},    {"1", small},     {"1.5", two},     {"2", {{5, 1}}},  {"3.25", mixed},
        {"5", small},   {"7.5", paper},  {"10", two},    {"12", mixed},    {"16", paper},    {"20", small},    {"24.5", paper},
        {"24.5", two},  {"30", {}},      {"40", mixed},  {"64", paper},    {"100", small},   {"1000", {{2, 1}}}};
    const Big slack("1e-40");
    int enclosures = 0;
    for (const auto& [cs, primes] : grid) {
        const mp::Real c1 = mp::Real::from_string(cs, 128), c2 = mp::Real::from_string(cs, 256);
        const Big bc(c1.to_sci(45));
        const Big g_ref = oracle::g_reference(bc);
        std::vector<std::pair<std::uint64_t, int>> pf;
        for (const auto& e : primes) pf.emplace_back(e.p, e.f);
        const Big ps_ref = oracle::prime_sum_reference(pf, bc);
        const auto inside = [&](const mp::Interval& v, const Big& ref, const std::string& what) {
            ++enclosures;
            c.require(lower(v) <= ref + slack && ref - slack <= upper(v), what + " misses the reference at c = " + cs);
        };
        const auto g1 = cb::g_integral(c1, 1e-6, 128), g2 = cb::g_integral(c2, 1e-6, 256);
        const auto s1 = cb::prime_sum(primes, c1, 1e-6, 128), s2 = cb::prime_sum(primes, c2, 1e-6, 256);
        inside(g1, g_ref, "integral");
        inside(g2, g_ref, "integral (256 bits)");
        inside(s1, ps_ref, "prime sum");
        inside(s2, ps_ref, "prime sum (256 bits)");
        c.require(!(g2.width() > g1.width()), "integral widens with precision at c = " + cs);
        c.require(!(s2.width() > s1.width()), "prime sum widens with precision at c = " + cs);
    }
    if (c.out.state == Outcome::pass)
        c.out.detail = "20 configurations, " + std::to_string(enclosures) + " enclosures against 266-bit references";
    return c.out;
}

Outcome kl_basis(const std::string& path) {
    Checker c;
    auto doc = cb::read_json_file(data_dir + "/kl_field.json");
    const auto basis = cb::integral_basis_from_json(cb::read_json_file(path), 120);
    auto field = cb::load_field(doc);
    field.integral_basis = basis;

    const auto emb = cb::embed_escalating(field, 256);
    const mp::prec_t prec = emb.precision_bits;
    const mp::Real len = cb::length(emb.vectors[0], prec);
    const mp::Real target = mp::sqrt(mp::Real(60L, prec));
    c.require(mp::abs(len - target) < mp::Real(1e-30, prec), "|b_1| = " + len.to_fixed(12) + ", expected sqrt 60");

    const auto [red, t, report] = cb::sort_reduce_loop(emb, {});
    c.require(!report.best_max_history.empty() && report.best_max_history.front() <= 64.51,
              "max length after the first pass " + fmt(report.best_max_history.front(), 3));
    c.require(report.best_max_history.back() <= 16.0, "max length after the loop " + fmt(report.best_max_history.back(), 3));

    cb::SearchOptions opt;
    opt.k_max = 3;
    opt.coefficients = {-1, 1};
    opt.threads = std::max(1u, std::thread::hardware_concurrency());
    const auto rows = cb::combine_rows(t.matrix, basis.elements);
    std::set<mpz_class> norms;
    for (const auto& e : cb::search(field, rows, opt)) norms.insert(e.norm);
    for (const char* n : {"7499", "46271", "61009"})
        c.require(norms.count(mpz_class(n)) > 0, std::string("norm ") + n + " not found");
    if (c.out.state == Outcome::pass)
        c.out.detail = "first pass max " + fmt(report.best_max_history.front(), 3) + ", final max " +
                       fmt(report.best_max_history.back(), 3) + ", " + std::to_string(report.iterations) + " rounds at " +
                       std::to_string(prec) + " bits";
    return c.out;
}

} // namespace

int main(int argc, char** argv) {
    std::string kl_basis_path;
    if (argc > 1) kl_basis_path = argv[1];
    else if (const char* env = std::getenv("CLASSBOUND_KL_BASIS")) kl_basis_path = env;

    struct Criterion {
        std::string name;
        double seconds; // time budget
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"KL bound at c = 24.5 with the published prime set", 10, paper_bound},
        {"splitting types of the degree-12 polynomial", 30, splitting_types},
        {"residue degrees below 2000 are element orders of A5 x C2", 120, galois_orders},
        {"Q(i) concludes h = 1, Q(sqrt -5) never below 2", 60, known_class_numbers},
        {"LLL and sort-reduce loop properties", 120, lattice_suite},
        {"sparse enumeration counts and ledger replay", 60, enumeration_and_ledger},
        {"enclosures contain high-precision references", 300, rigor_suite},
        {"KL integral basis: lengths and recovered norms", 3600,
         [&] { return kl_basis_path.empty() ? Outcome{Outcome::skipped, "no KL integral-basis file given"} : kl_basis(kl_basis_path); }},
    };

    bool failed = false;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {Outcome::fail, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.state == Outcome::pass && secs > criteria[i].seconds)
            o = {Outcome::fail, "took longer than " + fmt(criteria[i].seconds, 0) + " s"};
        const char* word = o.state == Outcome::pass ? "PASS" : o.state == Outcome::fail ? "FAIL" : "SKIPPED";
        failed = failed || o.state == Outcome::fail;
        std::cout << "criterion " << i + 1 << ": " << word << "  " << criteria[i].name << " [" << fmt(secs, 1) << " s]";
        if (!o.detail.empty()) std::cout << " -- " << o.detail;
        std::cout << std::endl;
    }
    return failed ? 1 : 0;
}
