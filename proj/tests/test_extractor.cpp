#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <sstream>

#include "hydrosig/error.hpp"
#include "hydrosig/extractor.hpp"
#include "support.hpp"

using namespace hydrosig;

namespace {

std::vector<TimeSeries> mixed_collection(std::size_t count) {
    std::vector<TimeSeries> out;
    for (std::size_t i = 0; i < count; ++i) {
        const auto s = static_cast<std::uint64_t>(i);
        std::vector<double> x;
        switch (i % 4) {
            case 0: x = testgen::white_noise(480, s); break;
            case 1: x = testgen::ar1(480, 0.7, s); break;
            case 2: x = testgen::sinusoid(480, 12.0, 0.4, s); break;
            default: x = testgen::garch11(480, 0.1, 0.1, 0.8, s); break;
        }
        out.push_back(testgen::series(std::move(x), "st" + std::to_string(i)));
    }
    return out;
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("column schema") {
    CHECK(feature_names().size() == 59);
    CHECK(feature_schema_hash() == 0xbe5f00d09561d6fbULL);
    CHECK(feature_names().front() == "x_acf1");
    CHECK(feature_names().back() == "trough");
    CHECK(feature_index("ARCH.LM") == 46);
    CHECK(feature_index("nope") == kFeatureCount);
}

TEST_CASE("single extraction") {
    const auto ts = testgen::series(testgen::sinusoid(480, 12.0, 0.5, 7));
    const auto a = extract_all(ts, 11);
    const auto b = extract_all(ts, 11);
    std::size_t present = 0;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        CHECK(bit_equal(a.values[i], b.values[i]));
        CHECK(a.present(i) == std::isfinite(a.values[i]));
        present += a.present(i) ? 1 : 0;
    }
    CHECK(present >= 55);
    CHECK_FALSE(a.provenance.empty());
    CHECK(a["peak"] == 3.0);

    auto bad = ts;
    bad.values[10] = std::nan("");
    CHECK_THROWS_AS((void)extract_all(bad, 11), Error);
}

TEST_CASE("scale independence") {
    for (const auto& ts : mixed_collection(8)) {
        auto scaled = ts;
        for (double& v : scaled.values) v = 100.0 * v + 7.0;
        const auto a = extract_all(ts, 3);
        const auto b = extract_all(scaled, 3);
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            INFO(ts.id << " " << feature_names()[i]);
            CHECK(a.present(i) == b.present(i));
            if (!a.present(i)) continue;
            const double tol = 1e-6 * std::max({std::abs(a.values[i]), std::abs(b.values[i]), 1.0});
            CHECK(std::abs(a.values[i] - b.values[i]) <= tol);
        }
    }
}

TEST_CASE("batch extraction") {
    const auto coll = mixed_collection(100);
    const auto serial = extract_batch_serial(coll, 42);
    const auto one = extract_batch(coll, 42, 1);
    const auto many = extract_batch(coll, 42, 8);
    REQUIRE(serial.matrix.rows() == 100);
    CHECK(serial.matrix.ids == many.matrix.ids);
    CHECK(serial.matrix.ids[17] == "st17");
    CHECK(serial.row_errors == many.row_errors);
    for (std::size_t k = 0; k < serial.matrix.values.size(); ++k) {
        CHECK(bit_equal(serial.matrix.values[k], one.matrix.values[k]));
        CHECK(bit_equal(serial.matrix.values[k], many.matrix.values[k]));
    }
    // The per-series seed depends only on the id.
    const auto single = extract_all(coll[5], series_seed(42, "st5"));
    for (std::size_t i = 0; i < kFeatureCount; ++i) CHECK(bit_equal(single.values[i], serial.matrix.at(5, i)));

    const auto empty = extract_batch({}, 42, 4);
    CHECK(empty.matrix.rows() == 0);
    CHECK(empty.matrix.cols() == kFeatureCount);

    auto broken = coll;
    broken[3].values.resize(10);
    const auto r = extract_batch(broken, 42, 2);
    CHECK(r.matrix.rows() == 100);
    CHECK_FALSE(r.row_errors[3].empty());
    CHECK(r.row_errors[4].empty());
}

TEST_CASE("median imputation") {
    FeatureMatrix m;
    m.columns = {"a", "b"};
    m.ids = {"r1", "r2", "r3"};
    const double nan = std::nan("");
    m.values = {1.0, 5.0, nan, 6.0, 3.0, 7.0};
    const auto r = impute_missing(m);
    CHECK(r.imputed == 1);
    CHECK(r.matrix.at(1, 0) == 2.0);
    CHECK(r.matrix.missing_count() == 0);

    const auto again = impute_missing(r.matrix);
    CHECK(again.imputed == 0);
    CHECK(again.matrix.values == r.matrix.values);

    m.values = {nan, 5.0, nan, 6.0, nan, 7.0};
    CHECK_THROWS_AS((void)impute_missing(m), Error);
}

TEST_CASE("CSV round trip") {
    const auto batch = extract_batch_serial(mixed_collection(6), 1);
    auto m = batch.matrix;
    m.at(2, 4) = std::nan("");
    std::stringstream ss;
    write_matrix_csv(ss, m);
    const std::string text = ss.str();
    CHECK(text.rfind("id,x_acf1,ac_9,", 0) == 0);
    const auto back = read_matrix_csv(ss);
    CHECK(back.columns == m.columns);
    CHECK(back.ids == m.ids);
    for (std::size_t k = 0; k < m.values.size(); ++k) {
        if (std::isnan(m.values[k])) {
            CHECK(std::isnan(back.values[k]));
        } else {
            CHECK(bit_equal(back.values[k], m.values[k]));
        }
    }
}
