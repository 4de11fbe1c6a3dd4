#include <gtest/gtest.h>

#include <random>

#include "classbound/lattice.hpp"
#include "oracles.hpp"

namespace cb = classbound;

namespace {

cb::IntMatrix random_lattice(std::mt19937_64& rng, std::size_t n, long bound) {
    std::uniform_int_distribution<long> d(-bound, bound);
    while (true) {
        cb::IntMatrix m(n, std::vector<mpz_class>(n));
        for (auto& r : m)
            for (auto& x : r) x = d(rng);
        if (oracle::bareiss_det(m) != 0) return m;
    }
}

cb::IntMatrix integer_rows(const cb::IntMatrix& u, const cb::IntMatrix& b) { return cb::multiply(u, b); }

// Size reduction |mu| <= 1/2 + eps and Lovasz with tolerance, checked over Q.
::testing::AssertionResult lll_reduced_exactly(const cb::IntMatrix& rows, double delta, double tol) {
    const auto g = oracle::gram_schmidt(rows);
    const mpq_class eta = mpq_class(1, 2) + mpq_class(1, 100);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (abs(g.mu[i][j]) > eta) return ::testing::AssertionFailure() << "mu[" << i << "][" << j << "] too large";
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const mpq_class lhs = g.b[k];
        const mpq_class rhs = (mpq_class(delta) - g.mu[k][k - 1] * g.mu[k][k - 1]) * g.b[k - 1];
        if (lhs.get_d() < rhs.get_d() * (1 - tol)) return ::testing::AssertionFailure() << "Lovasz fails at " << k;
    }
    return ::testing::AssertionSuccess();
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

} // namespace

TEST(Lattice, IdentityIsAlreadyReduced) {
    const auto b = cb::from_integer_rows(cb::identity_matrix(4), 128);
    const auto [red, t] = cb::lll(b);
    EXPECT_EQ(t.matrix, cb::identity_matrix(4));
}

TEST(Lattice, KnownTwoDimensionalReduction) {
    const cb::IntMatrix m = {{1, 0}, {1000, 1}};
    const auto [red, t] = cb::lll(cb::from_integer_rows(m, 128));
    const auto rows = integer_rows(t.matrix, m);
    EXPECT_EQ(max_length(rows), 1.0);
}

TEST(Lattice, RandomLatticesProperties) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 19;
        const auto m = random_lattice(rng, n, trial % 3 == 0 ? 1000 : 50);
        const auto [red, t] = cb::lll(cb::from_integer_rows(m, 128), 0.99);
        ASSERT_EQ(std::abs(t.determinant), 1);
        EXPECT_EQ(abs(oracle::bareiss_det(t.matrix)), 1) << trial;
        const auto rows = integer_rows(t.matrix, m);
        EXPECT_EQ(abs(oracle::bareiss_det(rows)), abs(oracle::bareiss_det(m))) << trial;
        EXPECT_TRUE(lll_reduced_exactly(rows, 0.99, 1e-9)) << trial;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                EXPECT_NEAR(red.vectors[i][j].to_double(), rows[i][j].get_d(), 1e-9 * (1 + std::abs(rows[i][j].get_d())));
    }
}

TEST(Lattice, LoopNeverWorseThanSinglePass) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 3 + trial % 14;
        const auto m = random_lattice(rng, n, 200);
        const auto basis = cb::from_integer_rows(m, 128);
        const auto [once, t1] = cb::lll(basis);
        const auto [best, t, report] = cb::sort_reduce_loop(basis, {});
        const double single = max_length(integer_rows(t1.matrix, m));
        const double looped = max_length(integer_rows(t.matrix, m));
        EXPECT_LE(looped, single * (1 + 1e-12)) << trial;
        ASSERT_FALSE(report.best_max_history.empty());
        EXPECT_LE(report.best_max_history.front(), single * (1 + 1e-12));
        for (std::size_t i = 1; i < report.best_max_history.size(); ++i)
            EXPECT_LE(report.best_max_history[i], report.best_max_history[i - 1]);
        EXPECT_EQ(abs(oracle::bareiss_det(t.matrix)), 1);
        EXPECT_LE(report.iterations, 1000);
    }
}

TEST(Lattice, LoopRespectsRoundLimits) {
    std::mt19937_64 rng(5);
    const auto basis = cb::from_integer_rows(random_lattice(rng, 10, 100), 128);
    const auto [b, t, r] = cb::sort_reduce_loop(basis, {.max_rounds = 1});
    EXPECT_EQ(r.iterations, 1);
    EXPECT_THROW(cb::sort_reduce_loop(basis, {.max_rounds = 0}), cb::Error);
    EXPECT_THROW(cb::sort_reduce_loop(basis, {.stall_rounds = 0}), cb::Error);
}

TEST(Lattice, DependentRowsAreReported) {
    const cb::IntMatrix m = {{1, 2, 3}, {2, 4, 6}, {0, 1, 1}};
    EXPECT_THROW(cb::lll(cb::from_integer_rows(m, 128)), cb::Error);
}

TEST(Lattice, VerifyUnimodular) {
    EXPECT_EQ(cb::verify_unimodular({{2, 1}, {1, 1}}), 1);
    EXPECT_EQ(cb::verify_unimodular({{0, 1}, {1, 0}}), -1);
    EXPECT_THROW(cb::verify_unimodular({{2, 0}, {0, 1}}), cb::Error);
}

TEST(Lattice, GaussianIntegerEmbedding) {
    cb::ZPoly f = {1, 0, 1};
    const auto k = cb::make_field(f);
    const auto e = cb::embed(k, 128);
    ASSERT_EQ(e.size(), 2u);
    for (const auto& row : e.vectors) EXPECT_NEAR(cb::length(row, 128).to_double(), 1.0, 1e-30);
    // |N(x)| equals the product of squared pair magnitudes.
    const cb::QVector x = {3, 2};
    const auto ex = cb::embed({x}, "x", k, 128);
    EXPECT_NEAR(cb::multiplicative_norm_embedded(ex.vectors[0]).to_double(), 13.0, 1e-20);
}

TEST(Lattice, ReducedBasisFileRoundTrip) {
    const auto k = cb::make_field(cb::ZPoly{1, 1, 1, 1, 1});
    const auto [b, t, r] = cb::reduce_field_basis(k, 128, {});
    const auto j = cb::reduced_basis_to_json(b, t, r);
    const auto back = cb::reduced_basis_from_json(j);
    EXPECT_EQ(back.transform, t.matrix);
    EXPECT_EQ(back.source_basis, "power");
    auto bad = j;
    bad["transform"][0][0] = 7;
    EXPECT_THROW(cb::reduced_basis_from_json(bad), cb::Error);
}

TEST(Lattice, EmbeddingOfLargeCoordinatesIsAccurate) {
    auto k = cb::make_field(cb::ZPoly{1, 1, 1, 1, 1});
    const int n = k.degree;
    // Unimodular U with entries of a few hundred bits.
    std::mt19937_64 rng(17);
    cb::IntMatrix u = cb::identity_matrix(n);
    for (int step = 0; step < 24; ++step) {
        const int i = static_cast<int>(rng() % n), j = static_cast<int>((i + 1 + rng() % (n - 1)) % n);
        mpz_class q = static_cast<unsigned long>(rng() % 1000 + 1);
        mpz_mul_2exp(q.get_mpz_t(), q.get_mpz_t(), 20);
        for (int t = 0; t < n; ++t) u[i][t] += q * u[j][t];
    }
    ASSERT_EQ(abs(oracle::bareiss_det(u)), 1);
    std::size_t bits = 0;
    for (const auto& row : u)
        for (const auto& x : row) bits = std::max(bits, mpz_sizeinbase(x.get_mpz_t(), 2));
    ASSERT_GT(bits, 150u) << bits;
    std::vector<cb::QVector> elements;
    for (const auto& row : u) {
        cb::QVector v;
        for (const auto& x : row) v.emplace_back(x);
        elements.push_back(std::move(v));
    }
    EXPECT_THROW(cb::embed(elements, "big", k, 128), cb::Error);
    k.integral_basis = cb::IntegralBasis{"big", elements, "test"};
    const auto emb = cb::embed_escalating(k, 128);
    EXPECT_GT(emb.precision_bits, 128);
    k.integral_basis.reset();
    const auto ref = cb::detail::apply_transform(u, cb::embed(k, 2048).vectors, 2048);
    for (int i = 0; i < n; ++i) {
        const double len = cb::length(ref[i], 2048).to_double();
        for (int t = 0; t < n; ++t) {
            const cb::mp::Real diff = ref[i][t] - emb.vectors[i][t].with_precision(2048);
            EXPECT_LE(std::abs(diff.to_double()), len * 1e-30) << i << "," << t;
        }
    }
    const auto [red, t, report] = cb::sort_reduce_loop(emb, {});
    EXPECT_EQ(abs(oracle::bareiss_det(t.matrix)), 1);
    EXPECT_LT(report.best_max_history.back(), 3.0);
}

TEST(Lattice, EscalatingEmbeddingReportsItsPrecision) {
    const auto k = cb::make_field(cb::ZPoly{1, 0, 1});
    const auto e = cb::embed_escalating(k, 64);
    EXPECT_EQ(e.precision_bits, 64);
    const auto roots = cb::isolate_roots({1, 0, 1}, 5000);
    EXPECT_EQ(roots.complex_roots.size(), 1u);
}
