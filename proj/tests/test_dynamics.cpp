#include <doctest.h>

#include "intdc/dynamics.hpp"

#include <cmath>
#include <random>

using namespace intdc;

namespace {

SimSpec noiseless(System s, Eigen::Index n, Vector init) {
    SimSpec spec;
    spec.system = s;
    spec.n = n;
    spec.burn_in = 0;
    spec.initial_state = std::move(init);
    spec.params[s == System::chnn ? "sigma_f" : "sigma"] = 0.0;
    if (s == System::chnn) spec.params["sigma_r"] = 0.0;
    return spec;
}

}  // namespace

TEST_CASE("logistic2 first step by hand") {
    SimSpec spec = noiseless(System::logistic2, 3, Vector::Constant(2, 0.5));
    const Dataset d = simulate(spec);
    CHECK(d.series[0].values[0] == 0.5);
    CHECK(std::abs(d.series[0].values[1] - 0.925) < 1e-15);
}

TEST_CASE("noiseless logistic2 matches a straight-line recurrence") {
    SimSpec spec = noiseless(System::logistic2, 200, Vector{{0.3, 0.6}});
    spec.params["beta_xy"] = 0.1;
    spec.params["beta_yx"] = 0.25;
    const Dataset d = simulate(spec);
    double x = 0.3, y = 0.6;
    for (Eigen::Index t = 0; t < 200; ++t) {
        CHECK(std::abs(d.series[0].values[t] - x) < 1e-12);
        CHECK(std::abs(d.series[1].values[t] - y) < 1e-12);
        const double xn = 3.7 * (0.75 * x * (1 - x) + 0.25 * y * (1 - y));
        const double yn = 3.7 * y * (1 - 0.9 * y - 0.1 * x);
        x = xn;
        y = yn;
    }
    CHECK(d.ground_truth->isApprox(Matrix{{0, 1}, {1, 0}}));
}

TEST_CASE("uncoupled noiseless logistic stays in the unit interval") {
    const Dataset d = simulate(noiseless(System::logistic2, 5000, Vector{{0.2, 0.7}}));
    for (const auto& s : d.series) {
        CHECK(s.values.minCoeff() >= 0.0);
        CHECK(s.values.maxCoeff() <= 1.0);
    }
    CHECK(d.ground_truth->isZero());
}

TEST_CASE("noiseless logistic3 matches a straight-line recurrence") {
    SimSpec spec = noiseless(System::logistic3, 100, Vector{{0.3, 0.4, 0.5}});
    spec.params["beta_xy"] = 0.5;
    const Dataset d = simulate(spec);
    double x = 0.3, y = 0.4, z = 0.5;
    const double g = 3.7;
    for (Eigen::Index t = 0; t < 100; ++t) {
        CHECK(std::abs(d.series[0].values[t] - x) < 1e-12);
        CHECK(std::abs(d.series[1].values[t] - y) < 1e-12);
        CHECK(std::abs(d.series[2].values[t] - z) < 1e-12);
        const double xn = g * x * (1 - (1 - 0.5 / g) * x - 0.5 / g * z);
        const double yn = g * y * (1 - (1 - 1.0 / g) * y - 0.5 / g * x - 0.5 / g * z);
        z = g * z * (1 - z);
        x = xn;
        y = yn;
    }
    Matrix gt = Matrix::Zero(3, 3);
    gt(0, 1) = gt(2, 0) = gt(2, 1) = 1;
    CHECK(d.ground_truth->isApprox(gt));

    spec.params["beta_xy"] = 0.0;
    CHECK(simulate(spec).ground_truth.value()(0, 1) == 0.0);
}

TEST_CASE("henon first step by hand and chain ground truth") {
    const Dataset d = simulate(noiseless(System::henon10, 3, Vector::Constant(10, 0.5)));
    // x_{1,2} = 1 - 1.4 * 0.25 + 0.3 * 0.5
    CHECK(std::abs(d.series[0].values[1] - 0.80) < 1e-12);
    CHECK(std::abs(d.series[3].values[1] - 0.80) < 1e-12);
    Matrix gt = Matrix::Zero(10, 10);
    for (int i = 0; i < 9; ++i) gt(i, i + 1) = 1;
    CHECK(d.ground_truth->isApprox(gt));
    CHECK(d.series[0].id == "x1");
    CHECK(d.series[9].id == "x10");
}

TEST_CASE("noiseless henon matches a straight-line recurrence") {
    Vector init(10);
    for (int i = 0; i < 10; ++i) init[i] = 0.1 * i - 0.3;
    const Dataset d = simulate(noiseless(System::henon10, 60, init));
    std::vector<double> prev(init.data(), init.data() + 10), cur = prev;
    for (Eigen::Index t = 0; t < 60; ++t) {
        for (int i = 0; i < 10; ++i) CHECK(std::abs(d.series[static_cast<std::size_t>(i)].values[t] - cur[i]) < 1e-12);
        std::vector<double> next(10);
        for (int i = 0; i < 10; ++i) {
            const double u = i == 0 ? cur[0] : 0.6 * cur[i - 1] + 0.4 * cur[i];
            next[i] = 1 - 1.4 * u * u + 0.3 * prev[i];
        }
        prev = cur;
        cur = next;
    }
}

TEST_CASE("chnn coupling rows") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Matrix w = random_chnn_coupling(10, seed);
        CHECK(w.rows() == 10);
        CHECK(w.cols() == 10);
        for (Eigen::Index i = 0; i < 10; ++i) {
            CHECK(w(i, i) == 0.0);
            CHECK(std::abs(w.row(i).sum() - 1.0) < 1e-12);
            CHECK((w.row(i).array() > 0.0).count() == 2);
            CHECK(w.row(i).minCoeff() >= 0.0);
        }
    }
    CHECK(random_chnn_coupling(10, 3) == random_chnn_coupling(10, 3));
    CHECK_THROWS_AS(random_chnn_coupling(2, 0), UsageError);
}

TEST_CASE("chnn outputs, ground truth and perturbation") {
    SimSpec spec;
    spec.system = System::chnn;
    spec.n = 400;
    spec.burn_in = 200;
    spec.seed = 11;
    const Dataset d = simulate(spec);
    const Matrix w = chnn_coupling(spec);
    CHECK(d.ground_truth->isApprox(w.transpose()));
    for (const auto& s : d.series) {
        CHECK(s.values.maxCoeff() <= 1.0);
        CHECK(s.values.minCoeff() >= -1.0);
        CHECK((s.values.array().abs() < 1.0).any());
    }
    const Dataset p = perturb_chnn(spec, 4);
    CHECK(p.series[4].values.isZero());
    CHECK(p.series[3].values != d.series[3].values);
    CHECK_THROWS_AS(perturb_chnn(spec, 10), UsageError);

    spec.freeze_internal = true;
    CHECK(perturb_chnn(spec, 4).series[4].values.isZero());
}

TEST_CASE("noiseless chnn matches a straight-line recurrence") {
    SimSpec spec;
    spec.system = System::chnn;
    spec.params = {{"sigma_f", 0.0}, {"sigma_r", 0.0}, {"nodes", 4}};
    Matrix w{{0, 0.3, 0.7, 0}, {0.5, 0, 0, 0.5}, {0, 0.9, 0, 0.1}, {0.2, 0.8, 0, 0}};
    spec.coupling = w;
    spec.n = 50;
    spec.burn_in = 0;
    spec.seed = 5;
    const Dataset d = simulate(spec);

    // Initial internal states are the first uniform draws of the seed stream.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector x(4), y(4), z(4);
    for (int i = 0; i < 4; ++i) {
        y[i] = u(rng);
        z[i] = u(rng);
        x[i] = std::tanh(20 * (y[i] + z[i]));
    }
    for (Eigen::Index t = 0; t < 50; ++t) {
        for (int i = 0; i < 4; ++i) CHECK(std::abs(d.series[static_cast<std::size_t>(i)].values[t] - x[i]) < 1e-12);
        const Vector input = w * x;
        for (int i = 0; i < 4; ++i) {
            y[i] = 0.2 * y[i] + 0.2 * input[i];
            z[i] = 0.95 * z[i] - 4 * x[i] + 0.4;
        }
        for (int i = 0; i < 4; ++i) x[i] = std::tanh(20 * (y[i] + z[i]));
    }
    CHECK(d.size() == 4);
    Matrix bad = w;
    bad(0, 1) = 0.4;
    spec.coupling = bad;
    CHECK_THROWS_AS(simulate(spec), UsageError);
}

TEST_CASE("seeded simulations are reproducible and distinct") {
    SimSpec spec;
    spec.seed = 42;
    const Dataset a = simulate(spec), b = simulate(spec);
    CHECK(a.series[0].values == b.series[0].values);
    spec.seed = 43;
    CHECK(simulate(spec).series[0].values != a.series[0].values);
}

TEST_CASE("simulation argument errors") {
    SimSpec spec;
    spec.params["nope"] = 1.0;
    CHECK_THROWS_AS(simulate(spec), UsageError);
    spec.params = {{"sigma", -1.0}};
    CHECK_THROWS_AS(simulate(spec), UsageError);
    spec.params = {};
    spec.n = 0;
    CHECK_THROWS_AS(simulate(spec), UsageError);
    CHECK_THROWS_AS(parse_system("lorenz"), UsageError);
    CHECK(parse_system("henon10") == System::henon10);
}

TEST_CASE("diverging parameters raise after retries") {
    SimSpec spec = noiseless(System::logistic2, 100, Vector{{0.5, 0.5}});
    spec.params["r"] = 8.0;
    CHECK_THROWS_AS(simulate(spec), DegenerateError);
}
