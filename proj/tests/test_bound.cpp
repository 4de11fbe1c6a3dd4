#include <gtest/gtest.h>

#include <boost/math/constants/constants.hpp>

#include "classbound/bound.hpp"
#include "oracles.hpp"

namespace cb = classbound;
namespace mp = classbound::mp;
using oracle::Big;

namespace {

const std::string data_dir = CLASSBOUND_DATA_DIR;

Big lower(const mp::Interval& v) { return Big(v.lo().to_sci(45, MPFR_RNDD)); }
Big upper(const mp::Interval& v) { return Big(v.hi().to_sci(45, MPFR_RNDU)); }

::testing::AssertionResult encloses(const mp::Interval& v, const Big& ref, const Big& slack) {
    if (lower(v) <= ref + slack && ref - slack <= upper(v)) return ::testing::AssertionSuccess();
    return ::testing::AssertionFailure() << v << " does not contain " << ref.str(30);
}

std::vector<cb::PrimeSetEntry> paper_set() {
    return cb::bound_request_from_json(cb::read_json_file(data_dir + "/kl_bound.json"), 128).inputs.primes;
}

std::vector<std::pair<std::uint64_t, int>> pairs(const std::vector<cb::PrimeSetEntry>& s) {
    std::vector<std::pair<std::uint64_t, int>> out;
    for (const auto& e : s) out.emplace_back(e.p, e.f);
    return out;
}

struct Config {
    std::string c;
    std::vector<cb::PrimeSetEntry> primes;
};

std::vector<Config> rigor_grid() {
    const auto paper = paper_set();
    const std::vector<cb::PrimeSetEntry> degree_two(paper.begin() + 36, paper.begin() + 47);
    const std::vector<cb::PrimeSetEntry> small = {{5, 1}, {13, 1}, {17, 1}, {29, 1}};
    const std::vector<cb::PrimeSetEntry> mixed = {{2, 1}, {3, 2}, {7, 3}, {11, 5}, {1000003, 1}};
    return {
        {"0.1", small},   {"0.25", mixed},     {"0.5", {}},          {"1", small},         {"1.5", degree_two},
        {"2", {{5, 1}}},  {"3.25", mixed},     {"5", small},         {"7.5", paper},       {"10", degree_two},
        {"12", mixed},    {"16", paper},       {"20", small},        {"24.5", paper},      {"24.5", degree_two},
        {"30", {}},       {"40", mixed},       {"64", paper},        {"100", small},       {"1000", {{2, 1}}},
    };
}

} // namespace

TEST(Bound, FEnclosureIsRigorous) {
    for (const char* cs : {"0.5", "2", "24.5"})
        for (const char* xs : {"0", "0.001", "1", "3.7", "40", "200"}) {
            const mp::Real x = mp::Real::from_string(xs, 128), c = mp::Real::from_string(cs, 128);
            const Big bx(x.to_sci(45)), bc(c.to_sci(45));
            const Big ref = exp(-(bx / bc) * (bx / bc)) / cosh(bx / 2);
            EXPECT_LE(Big(cb::f_eval(x, c, cb::Rounding::down).to_sci(45, MPFR_RNDD)), ref * (1 + Big("1e-40")));
            EXPECT_GE(Big(cb::f_eval(x, c, cb::Rounding::up).to_sci(45, MPFR_RNDU)), ref * (1 - Big("1e-40")));
        }
    EXPECT_THROW(cb::f_eval(mp::Real(-1L, 128), mp::Real(1L, 128), cb::Rounding::up), cb::Error);
}

TEST(Bound, IntegralKnownValues) {
    const std::vector<std::pair<const char*, const char*>> known = {
        {"0.1", "3.978"}, {"2", "1.22372"}, {"5", "0.83305"}, {"10", "0.73302"}, {"1000", "0.69315"}};
    for (const auto& [c, v] : known) {
        const auto g = cb::g_integral(mp::Real::from_string(c, 128), 1e-6);
        EXPECT_NEAR(g.mid().to_double(), std::stod(v), 6e-4) << c;
        EXPECT_LE(g.width().to_double(), 1e-6);
    }
}

TEST(Bound, RigorGrid) {
    const Big slack("1e-40");
    for (const auto& cfg : rigor_grid()) {
        SCOPED_TRACE("c = " + cfg.c);
        const mp::Real c128 = mp::Real::from_string(cfg.c, 128);
        const Big bc(c128.to_sci(45));
        const Big g_ref = oracle::g_reference(bc);
        const Big ps_ref = oracle::prime_sum_reference(pairs(cfg.primes), bc);

        const auto g1 = cb::g_integral(c128, 1e-6, 128);
        const auto g2 = cb::g_integral(mp::Real::from_string(cfg.c, 256), 1e-6, 256);
        EXPECT_TRUE(encloses(g1, g_ref, slack));
        EXPECT_TRUE(encloses(g2, g_ref, slack));
        EXPECT_LE(g2.width(), g1.width());

        const auto s1 = cb::prime_sum(cfg.primes, c128, 1e-6, 128);
        const auto s2 = cb::prime_sum(cfg.primes, mp::Real::from_string(cfg.c, 256), 1e-6, 256);
        EXPECT_TRUE(encloses(s1, ps_ref, slack));
        EXPECT_TRUE(encloses(s2, ps_ref, slack));
        EXPECT_LE(s2.width(), s1.width());

        cb::BoundInputs in;
        in.degree = 120;
        in.discriminant = mpz_class(653);
        mpz_pow_ui(in.discriminant->get_mpz_t(), in.discriminant->get_mpz_t(), 60);
        in.primes = cfg.primes;
        const auto r1 = cb::compute_b(in, c128, cfg.c);
        in.precision = 256;
        const auto r2 = cb::compute_b(in, mp::Real::from_string(cfg.c, 256), cfg.c);
        const Big b_ref = boost::math::constants::euler<Big>() + log(8 * boost::math::constants::pi<Big>()) -
                          log(Big(653)) / 2 - g_ref + ps_ref;
        EXPECT_TRUE(encloses(r1.b, b_ref, slack));
        EXPECT_TRUE(encloses(r2.b, b_ref, slack));
        EXPECT_LE(r2.b.width(), r1.b.width());
    }
}

TEST(Bound, TighterToleranceStillContainsReference) {
    const mp::Real c = mp::Real::from_string("24.5", 192);
    const auto g = cb::g_integral(c, 1e-12, 192);
    EXPECT_LE(g.width().to_double(), 1e-12);
    EXPECT_TRUE(encloses(g, oracle::g_reference(Big("24.5")), Big("1e-40")));
}

TEST(Bound, PrimeSumSingleTerm) {
    const auto s = cb::prime_sum({{3571, 1}}, mp::Real::from_string("24.5", 128), 1e-9);
    EXPECT_NEAR(s.mid().to_double(), 8.19598340422e-3, 1e-13);
}

TEST(Bound, GaussianIntegers) {
    cb::BoundInputs in;
    in.degree = 2;
    in.discriminant = -4;
    in.primes = {{5, 1}};
    const auto r = cb::class_bound(in, mp::Real(2L, 128), "2");
    ASSERT_EQ(r.outcome, cb::BoundOutcome::bound);
    EXPECT_NEAR(r.h_bound.to_double(), 1.43825, 1e-4);
    EXPECT_EQ(r.conclusion, 1);
}

TEST(Bound, KlPaperBound) {
    const auto req = cb::bound_request_from_json(cb::read_json_file(data_dir + "/kl_bound.json"), 128);
    const auto r = cb::class_bound(req.inputs, req.c_values.front().first, req.c_values.front().second);
    EXPECT_LE(r.integral.hi().to_double(), 0.70010);
    EXPECT_GT(r.prime_sum.lo().to_double(), 0.18797);
    EXPECT_GE(r.b_lower().to_double(), 0.04846);
    EXPECT_LT(r.h_bound.to_double(), 14.94);
    EXPECT_EQ(r.conclusion, 14);
}

TEST(Bound, NoBoundWhenBIsNegative) {
    cb::BoundInputs in;
    in.degree = 120;
    in.root_discriminant = "100";
    const auto r = cb::class_bound(in, mp::Real(10L, 128));
    EXPECT_EQ(r.outcome, cb::BoundOutcome::no_bound);
    EXPECT_FALSE(r.conclusion);
}

TEST(Bound, ScanPicksSmallestBound) {
    cb::BoundInputs in;
    in.degree = 2;
    in.discriminant = -4;
    in.primes = {{5, 1}, {13, 1}};
    std::vector<std::pair<mp::Real, std::string>> grid;
    for (const char* c : {"10", "2", "5"}) grid.emplace_back(mp::Real::from_string(c, 128), c);
    const auto best = cb::scan_c(in, grid);
    for (const auto& [c, t] : grid) EXPECT_LE(best.h_bound, cb::class_bound(in, c, t).h_bound);
    EXPECT_THROW(cb::scan_c(in, {}), cb::Error);
}

TEST(Bound, InputValidation) {
    cb::BoundInputs in;
    in.degree = 3;
    in.root_discriminant = "2";
    EXPECT_THROW(cb::validate(in), cb::Error);
    in.degree = 4;
    in.discriminant = 5;
    EXPECT_THROW(cb::validate(in), cb::Error);
    in.root_discriminant.reset();
    in.primes = {{5, 1}};
    EXPECT_THROW(cb::validate(in), cb::Error);
    in.primes = {{7, 1}, {7, 1}};
    EXPECT_THROW(cb::validate(in), cb::Error);
    in.primes = {{9, 1}};
    EXPECT_THROW(cb::validate(in), cb::Error);
    in.primes = {{7, 0}};
    EXPECT_THROW(cb::validate(in), cb::Error);
    in.primes = {{7, 1}};
    EXPECT_NO_THROW(cb::validate(in));
    EXPECT_THROW(cb::compute_b(in, mp::Real(0L, 128)), cb::Error);
}

TEST(Bound, RequestParsing) {
    EXPECT_THROW(cb::bound_request_from_json(cb::json::parse(R"({"degree": 2, "discriminant": -4, "c": 2})"), 128),
                 cb::Error);
    const auto ok = cb::bound_request_from_json(
        cb::json::parse(R"({"format_version": 1, "degree": 2, "discriminant": -4, "primes": [{"p": 5, "f": 1}],
                            "c_grid": [2, 5]})"),
        128);
    EXPECT_TRUE(ok.grid);
    EXPECT_EQ(ok.c_values.size(), 2u);
}
