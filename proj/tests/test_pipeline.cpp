#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "classbound.hpp"

namespace cb = classbound;
namespace fs = std::filesystem;

namespace {

const std::string data_dir = CLASSBOUND_DATA_DIR;

cb::PipelineConfig config(const std::string& name) {
    return cb::pipeline_config_from_json(cb::read_json_file(data_dir + "/" + name), data_dir);
}

fs::path scratch(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("classbound_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d / name;
}

} // namespace

TEST(Pipeline, GaussianIntegersConcludeClassNumberOne) {
    const auto rep = cb::run_pipeline(config("qi_certify.json"));
    ASSERT_TRUE(rep.conclusion);
    EXPECT_TRUE(rep.conclusion->applies);
    EXPECT_EQ(rep.conclusion->class_number, 1);
    EXPECT_EQ(rep.bound.conclusion, 1);
    EXPECT_EQ(rep.stages, (std::vector<std::string>{"field", "reduce", "search", "deduce", "bound"}));
}

TEST(Pipeline, SqrtMinusFiveNeverConcludesBelowTwo) {
    const auto cfg = config("q_sqrt_m5_certify.json");
    const auto rep = cb::run_pipeline(cfg);
    ASSERT_TRUE(rep.conclusion);
    EXPECT_FALSE(rep.conclusion->applies);
    if (rep.bound.conclusion) EXPECT_GE(*rep.bound.conclusion, 2);
}

TEST(Pipeline, KlFromPublishedPrimeSet) {
    const auto rep = cb::run_pipeline(config("kl_certify.json"));
    EXPECT_EQ(rep.bound.conclusion, 14);
    ASSERT_TRUE(rep.conclusion);
    EXPECT_TRUE(rep.conclusion->applies);
    const auto j = cb::certification_report_to_json(rep);
    EXPECT_EQ(j.at("provenance").at("inputs").size(), 1u);
    EXPECT_EQ(j.at("provenance").at("inputs")[0].at("sha256").get<std::string>().size(), 64u);
}

TEST(Pipeline, KlFromPublishedRelations) {
    const auto rep = cb::run_pipeline(config("kl_certify_relations.json"));
    EXPECT_EQ(rep.ledger_summary.at("principal_by_degree").at("1"), 35);
    EXPECT_EQ(rep.ledger_summary.at("principal_by_degree").at("2"), 11);
    EXPECT_EQ(rep.ledger_summary.at("principal_by_degree").at("3"), 3);
    EXPECT_EQ(rep.ledger_summary.at("pending"), 1);
    // Without 33403 the bound is weaker but still below the threshold of 16.
    ASSERT_EQ(rep.bound.outcome, cb::BoundOutcome::bound);
    EXPECT_EQ(rep.bound.conclusion, 15);
    ASSERT_TRUE(rep.conclusion);
    EXPECT_TRUE(rep.conclusion->applies);
}

TEST(Pipeline, PrimeSetWithWrongDegreeIsRejected) {
    auto doc = cb::read_json_file(data_dir + "/kl_certify.json");
    doc["prime_set"][0]["f"] = 2;
    EXPECT_THROW(cb::run_pipeline(cb::pipeline_config_from_json(doc, data_dir)), cb::Error);
    doc["prime_set"][0] = {{"p", 653}, {"f", 1}};
    EXPECT_THROW(cb::run_pipeline(cb::pipeline_config_from_json(doc, data_dir)), cb::Error);
}

TEST(Pipeline, ConfigErrors) {
    auto doc = cb::read_json_file(data_dir + "/qi_certify.json");
    auto missing = doc;
    missing["field"] = "nowhere.json";
    try {
        cb::run_pipeline(cb::pipeline_config_from_json(missing, data_dir));
        FAIL();
    } catch (const cb::Error& e) {
        EXPECT_EQ(e.kind(), cb::ErrorKind::io);
        EXPECT_NE(std::string(e.what()).find("nowhere.json"), std::string::npos);
    }
    auto no_reason = doc;
    no_reason["threshold_rule"]["justification"] = " ";
    EXPECT_THROW(cb::pipeline_config_from_json(no_reason, data_dir), cb::Error);
    auto no_bound = doc;
    no_bound.erase("bound");
    EXPECT_THROW(cb::pipeline_config_from_json(no_bound, data_dir), cb::Error);
    auto both = doc;
    both["bound"]["c"] = 2;
    EXPECT_THROW(cb::pipeline_config_from_json(both, data_dir), cb::Error);
    auto version = doc;
    version["format_version"] = 7;
    EXPECT_THROW(cb::pipeline_config_from_json(version, data_dir), cb::Error);
}

TEST(Pipeline, SearchOnGaussianIntegers) {
    const auto k = cb::load_field_file(data_dir + "/qi_field.json");
    cb::SearchOptions opt;
    opt.k_max = 2;
    opt.coefficients = {-3, -2, -1, 1, 2, 3};
    opt.norm_limit = 100;
    const auto found = cb::search(k, cb::basis_rows(k), opt);
    ASSERT_FALSE(found.empty());
    for (std::size_t i = 0; i < found.size(); ++i) {
        const auto& e = found[i];
        EXPECT_EQ(cb::norm_exact({cb::detail::combination(cb::basis_rows(k), e.candidate)}, k), mpq_class(e.norm));
        EXPECT_GT(e.norm, 1);
        if (i) EXPECT_LE(found[i - 1].norm, e.norm);
    }
    EXPECT_EQ(found.front().norm, 2);

    opt.threads = 3;
    const auto threaded = cb::search(k, cb::basis_rows(k), opt);
    ASSERT_EQ(threaded.size(), found.size());
    for (std::size_t i = 0; i < found.size(); ++i) EXPECT_EQ(threaded[i].candidate, found[i].candidate);
}

TEST(Pipeline, SearchNormsSurviveLargeCoordinates) {
    // theta = m + z with z^4 = -1; rows are 1, z, z^2, z^3 in powers of theta.
    mpz_class m = 1;
    m <<= 40;
    cb::FieldOptions fo;
    fo.precision_bits = 96;
    const auto k = cb::make_field({m * m * m * m + 1, -4 * m * m * m, 6 * m * m, -4 * m, 1}, fo);
    const auto zeta8 = cb::make_field({1, 0, 0, 0, 1});
    std::vector<cb::QVector> rows;
    cb::QVector z_pow = {1, 0, 0, 0};
    for (int j = 0; j < 4; ++j) {
        rows.push_back(z_pow);
        cb::QVector next(4, mpq_class(0));
        for (int t = 0; t < 4; ++t) {
            if (t + 1 < 4) next[t + 1] += z_pow[t];
            next[t] -= m * z_pow[t];
        }
        z_pow = next;
    }
    ASSERT_GT(mpz_sizeinbase(rows[3][0].get_num_mpz_t(), 2), k.precision());

    cb::SearchOptions opt;
    opt.k_max = 3;
    opt.coefficients = {-1, 1};
    opt.norm_limit = 100;
    const auto found = cb::search(k, rows, opt);
    const auto expected = cb::search(zeta8, cb::basis_rows(zeta8), opt);
    ASSERT_FALSE(expected.empty());
    ASSERT_EQ(found.size(), expected.size());
    for (std::size_t i = 0; i < found.size(); ++i) {
        EXPECT_EQ(found[i].candidate, expected[i].candidate);
        EXPECT_EQ(found[i].norm, expected[i].norm);
    }

    const auto emb = cb::detail::embed_rows(rows, k);
    cb::enumerate_sparse(4, 3, {-1, 1}, [&](const cb::SparseCandidate& c) {
        EXPECT_TRUE(cb::unique_integer(cb::detail::norm_enclosure(emb, c, k.precision())).has_value()) << c.label();
        return true;
    });
}

TEST(Pipeline, AtomicWriteAndLock) {
    const auto path = scratch("out.json").string();
    cb::write_json_file(path, {{"a", 1}});
    EXPECT_EQ(cb::read_json_file(path).at("a"), 1);
    {
        cb::LockFile lock(path);
        EXPECT_THROW(cb::LockFile{path}, cb::Error);
    }
    EXPECT_NO_THROW(cb::LockFile lock(path));
    fs::remove_all(fs::path(path).parent_path());
}

TEST(Pipeline, Sha256) {
    EXPECT_EQ(cb::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
