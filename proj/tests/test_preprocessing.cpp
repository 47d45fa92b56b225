#include <doctest.h>

#include "intdc/csv.hpp"
#include "intdc/preprocessing.hpp"
#include "oracles.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace intdc;

namespace {

TimeSeries ramp(int n, double start = 1.0) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = start + i;
    return {"ramp", v};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << content;
    return path;
}

}  // namespace

TEST_CASE("load_csv: columns are series") {
    std::ostringstream os;
    os << "a,b,c\n";
    for (int t = 0; t < 1000; ++t) os << t << "," << 2 * t << "," << -t << "\n";
    const auto path = temp_file("intdc_three.csv", os.str());
    const Dataset d = load_csv(path, Layout::columns_are_series, true);
    REQUIRE(d.size() == 3);
    CHECK(d.length() == 1000);
    CHECK(d.series[1].id == "b");
    CHECK(d.series[2].values[999] == -999.0);
}

TEST_CASE("load_csv: single headerless column") {
    const Dataset d = parse_csv("1\n2\n3\n4\n5\n", Layout::columns_are_series, false);
    REQUIRE(d.size() == 1);
    CHECK(d.series[0].values == (Vector(5) << 1, 2, 3, 4, 5).finished());
}

TEST_CASE("load_csv: rows are series") {
    const Dataset d = parse_csv("x,1,2,3\ny,4,5,6\n", Layout::rows_are_series, true);
    REQUIRE(d.size() == 2);
    CHECK(d.series[1].id == "y");
    CHECK(d.series[1].values[2] == 6.0);
}

TEST_CASE("load_csv: errors name the offending cell") {
    try {
        parse_csv("a,b\n1,2\n3,NaN\n", Layout::columns_are_series, true, "in.csv");
        FAIL("expected a load error");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 3") != std::string::npos);
        CHECK(msg.find("column 2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_csv("a,b\n1,2\n3\n", Layout::columns_are_series, true), DataError);
    CHECK_THROWS_AS(parse_csv("a,b\n1,x\n", Layout::columns_are_series, true), DataError);
    CHECK_THROWS_AS(parse_csv("", Layout::columns_are_series, false), DataError);
    CHECK_THROWS_AS(load_csv(temp_file("intdc_empty.csv", ""), Layout::columns_are_series, false), DataError);
}

TEST_CASE("csv round trip is bit-identical") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1e3);
    Dataset d;
    for (int j = 0; j < 3; ++j) {
        Vector v(200);
        for (auto& x : v) x = g(rng) * std::pow(10.0, j * 7 - 7);
        d.series.emplace_back("s" + std::to_string(j), v);
    }
    const auto path = std::filesystem::temp_directory_path() / "intdc_roundtrip.csv";
    write_csv(path, d);
    const Dataset back = load_csv(path, Layout::columns_are_series, true);
    for (int j = 0; j < 3; ++j) CHECK((back.series[j].values.array() == d.series[j].values.array()).all());
}

TEST_CASE("detrend: constant series gives ones") {
    const TimeSeries c{"c", Vector::Constant(500, 3.25)};
    const TimeSeries out = detrend_moving_average(c, 5, 401);
    CHECK((out.values.array() == 1.0).all());
    CHECK(out.size() == 500);
}

TEST_CASE("detrend: preconditions") {
    CHECK_THROWS_AS(detrend_moving_average(ramp(100), 5, 401), UsageError);
    CHECK_THROWS_AS(detrend_moving_average(ramp(1000), 5, 5), UsageError);
    CHECK_THROWS_AS(detrend_moving_average(TimeSeries{"z", Vector::Zero(500)}, 5, 401), DegenerateError);
}

TEST_CASE("detrend: ramp matches direct windowed means") {
    const TimeSeries r = ramp(1000);
    const TimeSeries out = detrend_moving_average(r, 5, 401);
    const std::vector<double> v(r.values.data(), r.values.data() + r.size());
    for (long t : {0L, 3L, 150L, 499L, 500L, 850L, 999L}) {
        const double expected = oracle::window_mean(v, t, 5) / oracle::window_mean(v, t, 401);
        CHECK(out.values[t] == doctest::Approx(expected).epsilon(1e-13));
    }
    // Interior of a linear ramp: both centred means equal the centre value.
    CHECK(out.values[500] == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("detrend: negative values are shifted to a zero minimum") {
    Vector v(600);
    for (int i = 0; i < 600; ++i) v[i] = std::sin(0.05 * i) - 2.0;
    const TimeSeries out = detrend_moving_average(TimeSeries{"s", v}, 5, 401);
    const TimeSeries shifted = detrend_moving_average(TimeSeries{"s", (v.array() - v.minCoeff()).matrix()}, 5, 401);
    CHECK(out.values.isApprox(shifted.values, 1e-14));
}

TEST_CASE("normalize") {
    const TimeSeries s{"s", (Vector(3) << 1, 2, 3).finished()};
    const TimeSeries z = normalize(s, NormalizeMode::zscore);
    CHECK(std::abs(z.values.mean()) < 1e-12);
    CHECK(z.values.squaredNorm() / 3.0 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK((normalize(z, NormalizeMode::zscore).values - z.values).cwiseAbs().maxCoeff() < 1e-12);

    const TimeSeries u = normalize(TimeSeries{"u", (Vector(2) << 3, 4).finished()}, NormalizeMode::unit_second_moment);
    CHECK(u.values[0] == doctest::Approx(3.0 / std::sqrt(12.5)).epsilon(1e-15));
    CHECK(u.values[1] == doctest::Approx(4.0 / std::sqrt(12.5)).epsilon(1e-15));
    CHECK((normalize(u, NormalizeMode::unit_second_moment).values - u.values).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(normalize(TimeSeries{"c", Vector::Constant(4, 2.0)}, NormalizeMode::zscore), DegenerateError);
}

TEST_CASE("decimate and interleave") {
    const auto phases = decimate(ramp(10), 5);
    REQUIRE(phases.size() == 5);
    for (int p = 0; p < 5; ++p) {
        CHECK(phases[p].values[0] == 1.0 + p);
        CHECK(phases[p].values[1] == 6.0 + p);
    }
    CHECK(decimate(ramp(10), 1).front().values == ramp(10).values);

    const auto worm = decimate(ramp(1750), 5);
    for (const auto& p : worm) CHECK(p.size() == 350);

    // Reconstruction holds for lengths that are not a multiple of the factor.
    for (int n : {10, 11, 13, 1750}) {
        for (int f : {1, 2, 3, 5}) {
            const TimeSeries r = ramp(n);
            CHECK(interleave(decimate(r, f)).values == r.values);
        }
    }
}

TEST_CASE("segment") {
    for (const auto& s : segment(ramp(1209), 3)) CHECK(s.size() == 403);
    CHECK(segment(ramp(7), 1).front().values == ramp(7).values);
    const auto pieces = segment(ramp(10), 3);
    REQUIRE(pieces.size() == 3);
    CHECK(pieces[2].values == (Vector(3) << 7, 8, 9).finished());
}

TEST_CASE("jitter") {
    const TimeSeries s = ramp(1209);
    const TimeSeries a = jitter(s, 1e-7, 99);
    const TimeSeries b = jitter(s, 1e-7, 99);
    CHECK(a.values == b.values);
    CHECK((a.values - s.values).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((a.values - s.values).cwiseAbs().maxCoeff() > 0.0);

    const double sigma = 1e-12;
    const TimeSeries tiny = jitter(s, sigma, 3);
    CHECK((tiny.values - s.values).cwiseAbs().maxCoeff() < 10 * sigma + 1e-13 * s.values.cwiseAbs().maxCoeff());
    CHECK_THROWS_AS(jitter(s, 0.0, 1), UsageError);
}

TEST_CASE("dataset-wide splitting keeps series aligned") {
    Dataset d;
    d.series = {ramp(21, 0.0), ramp(21, 100.0)};
    d.ground_truth = Matrix::Zero(2, 2);
    const auto phases = decimate(d, 5);
    REQUIRE(phases.size() == 5);
    for (const auto& p : phases) {
        p.validate();
        CHECK(p.length() == 4);
        CHECK(p.ground_truth.has_value());
    }
    const auto pieces = segment(d, 2);
    CHECK(pieces[1].series[1].values[0] == 110.0);
}
