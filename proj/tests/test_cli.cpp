#include <doctest.h>

#include "intdc/baselines.hpp"
#include "intdc/csv.hpp"
#include "intdc/dynamics.hpp"
#include "intdc/evaluation.hpp"
#include "intdc/experiments.hpp"
#include "intdc/iee.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace intdc;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kDir = fs::temp_directory_path() / ("intdc_cli_" + std::to_string(::getpid()));

struct Run {
    int code = -1;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Run cli(const std::string& args, const std::string& env = "") {
    fs::create_directories(kDir);
    const auto out = kDir / "stdout.txt", err = kDir / "stderr.txt";
    const std::string cmd = env + (env.empty() ? "" : " ") + std::string(INTDC_CLI) + " " + args + " > " +
                            out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string p(const std::string& name) { return (kDir / name).string(); }

void write_text(const std::string& path, const std::string& text) {
    fs::create_directories(fs::path(path).parent_path());
    std::ofstream(path, std::ios::binary) << text;
}

Matrix matrix_of(const json& rows) {
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j].get<double>();
    return m;
}

Dataset three_series() {
    SimSpec spec;
    spec.system = System::logistic3;
    spec.n = 400;
    spec.seed = 21;
    return simulate(spec);
}

}  // namespace

TEST_CASE("version and usage") {
    auto r = cli("--version");
    CHECK(r.code == 0);
    CHECK(r.out.find(INTDC_VERSION) != std::string::npos);
    CHECK(cli("").code == 1);
    CHECK(cli("frobnicate").code == 1);
    CHECK(cli("infer").code == 1);
    CHECK(cli("simulate --bogus -o x").code == 1);
    CHECK(cli("--help").code == 0);
}

TEST_CASE("exit codes for data and numerical errors") {
    write_csv(p("three.csv"), three_series());
    auto r = cli("infer --method magic --header " + p("three.csv"));
    CHECK(r.code == 1);
    CHECK(r.err.find("magic") != std::string::npos);
    CHECK(cli("infer --header " + p("missing.csv")).code == 2);
    write_text(p("bad.csv"), "a,b\n1,2\n3,x\n");
    CHECK(cli("infer --header " + p("bad.csv")).code == 2);

    std::ostringstream flat;
    flat << "a,b\n";
    for (int t = 0; t < 200; ++t) flat << "1," << (t % 7) * 0.1 + t * 1e-3 << '\n';
    write_text(p("flat.csv"), flat.str());
    CHECK(cli("infer --header --k-outer 20 " + p("flat.csv")).code == 3);
    CHECK(cli("infer --header --k-outer 5000 " + p("three.csv")).code == 1);
}

TEST_CASE("simulate writes trials, truth and config") {
    auto r = cli("simulate --system henon10 --n 200 --trials 2 --seed 7 --param beta=0.3 -o " + p("sim"));
    REQUIRE(r.code == 0);
    const Dataset d = load_csv(p("sim/trial_001.csv"), Layout::columns_are_series, true);
    SimSpec spec;
    spec.system = System::henon10;
    spec.n = 200;
    spec.params = {{"beta", 0.3}};
    spec.seed = trial_seed(7, 1);
    const Dataset ref = simulate(spec);
    REQUIRE(d.size() == 10);
    for (std::size_t j = 0; j < 10; ++j) CHECK((d.series[j].values - ref.series[j].values).cwiseAbs().maxCoeff() == 0.0);
    CHECK((load_matrix_csv(p("sim/ground_truth.csv")) - *ref.ground_truth).cwiseAbs().maxCoeff() == 0.0);
    const json cfg = json::parse(slurp(p("sim/config.json")));
    CHECK(cfg.at("params").at("beta") == 0.3);
    CHECK(cfg.at("trial_seeds")[1].get<std::uint64_t>() == spec.seed);

    CHECK(cli("simulate --system henon10 --param nope=1 -o " + p("sim2")).code == 1);
    CHECK(cli("simulate --system henon10 --param beta -o " + p("sim2")).code == 1);
    CHECK(cli("simulate --system logistic2 --perturb 1 -o " + p("sim2")).code == 1);
}

TEST_CASE("infer produces a labelled matrix") {
    const Dataset d = three_series();
    write_csv(p("three.csv"), d);
    auto r = cli("infer --method iee --lag 2 --k-outer 20 --header " + p("three.csv") + " -o " + p("m.json"));
    REQUIRE(r.code == 0);
    const json j = json::parse(slurp(p("m.json")));
    CHECK(j.at("method") == "iee");
    CHECK(j.at("labels") == json({"x", "y", "z"}));
    CHECK(j.at("config").at("k_outer") == 20);
    const Matrix m = matrix_of(j.at("matrix"));
    IeeConfig cfg;
    cfg.k_outer = 20;
    CHECK((m - iee_matrix(d, cfg)).cwiseAbs().maxCoeff() == 0.0);

    r = cli("infer --method iee --k-outer 20 --header --condition z " + p("three.csv"));
    REQUIRE(r.code == 0);
    const Matrix c = matrix_of(json::parse(r.out).at("matrix"));
    CHECK((c - ciee_matrix(d, 2, cfg)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(cli("infer --method gc --condition z --header " + p("three.csv")).code == 1);
    CHECK(cli("infer --method iee --condition w --header " + p("three.csv")).code == 1);
}

TEST_CASE("decimation averages the phase matrices") {
    const Dataset d = three_series();
    write_csv(p("three.csv"), d);
    auto r = cli("infer --method iee --k-outer 15 --decimate 5 --header " + p("three.csv"));
    REQUIRE(r.code == 0);
    const Matrix m = matrix_of(json::parse(r.out).at("matrix"));

    IeeConfig cfg;
    cfg.k_outer = 15;
    Matrix sum = Matrix::Zero(3, 3);
    for (int phase = 0; phase < 5; ++phase) {
        Dataset part;
        for (const auto& s : d.series) {
            Vector v(s.size() / 5);
            for (Eigen::Index t = 0; t < v.size(); ++t) v[t] = s.values[phase + 5 * t];
            part.series.emplace_back(s.id, v);
        }
        sum += iee_matrix(part, cfg);
    }
    CHECK((m - sum / 5.0).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("jobs flag and environment give identical output") {
    write_csv(p("three.csv"), three_series());
    const auto base = cli("infer --method ccm --header --jobs 1 " + p("three.csv"));
    const auto env = cli("infer --method ccm --header " + p("three.csv"), "INTDC_JOBS=3");
    REQUIRE(base.code == 0);
    CHECK(env.code == 0);
    CHECK(base.out == env.out);
    CHECK(cli("infer --header --jobs 0 " + p("three.csv")).code == 1);
    CHECK(cli("infer --header " + p("three.csv"), "INTDC_JOBS=0").code == 1);
    CHECK(cli("infer --header " + p("three.csv"), "INTDC_JOBS=two").code == 1);
}

TEST_CASE("baseline options") {
    write_csv(p("three.csv"), three_series());
    auto r = cli("infer --method ccm --ccm-transform neglog1m --header " + p("three.csv"));
    REQUIRE(r.code == 0);
    const Matrix t = matrix_of(json::parse(r.out).at("matrix"));
    const Matrix raw = matrix_of(json::parse(cli("infer --method ccm --header " + p("three.csv")).out).at("matrix"));
    CHECK((t - neglog1m(raw)).cwiseAbs().maxCoeff() == 0.0);

    r = cli("infer --method ccm --ccm-sweep 20,100,300 --header " + p("three.csv"));
    REQUIRE(r.code == 0);
    const json sweep = json::parse(r.out).at("ccm_sweep");
    CHECK(sweep.size() == 6);
    CHECK(sweep[0].at("curve").size() == 3);
    CHECK(cli("infer --method iee --ccm-transform neglog1m --header " + p("three.csv")).code == 1);
    CHECK(cli("infer --method ccm --ccm-transform log --header " + p("three.csv")).code == 1);
}

TEST_CASE("preprocessing flags") {
    const Dataset d = three_series();
    write_csv(p("three.csv"), d);
    for (const std::string flags : {"--normalize zscore", "--detrend 3:9", "--detrend 3:9 --ma-align trailing",
                                    "--jitter 1e-6 --seed 4", "--segments 2"}) {
        CAPTURE(flags);
        CHECK(cli("infer --method gc --header " + flags + " " + p("three.csv")).code == 0);
    }
    CHECK(cli("infer --method gc --header --detrend 3 " + p("three.csv")).code == 1);
    CHECK(cli("infer --method gc --header --normalize minmax " + p("three.csv")).code == 1);
    CHECK(cli("infer --method gc --header --decimate 2 --segments 2 " + p("three.csv")).code == 1);

    std::ostringstream rows;
    for (std::size_t j = 0; j < d.size(); ++j) {
        rows << d.series[j].id;
        for (Eigen::Index t = 0; t < d.length(); ++t) rows << ',' << format_number(d.series[j].values[t]);
        rows << '\n';
    }
    write_text(p("rows.csv"), rows.str());
    const auto a = cli("infer --method gc --header " + p("three.csv"));
    const auto b = cli("infer --method gc --header --layout rows " + p("rows.csv"));
    REQUIRE(b.code == 0);
    CHECK(json::parse(a.out).at("matrix") == json::parse(b.out).at("matrix"));
}

TEST_CASE("evaluate report") {
    Matrix truth = Matrix::Zero(4, 4);
    truth(0, 1) = truth(1, 2) = truth(2, 3) = 1;
    Matrix scores(4, 4);
    scores << 0, 0.9, 0.1, 0.2, 0.3, 0, 0.8, 0.05, 0.4, 0.15, 0, 0.35, 0.25, 0.02, 0.5, 0;
    write_matrix_csv(p("truth.csv"), truth);
    write_matrix_csv(p("scores.csv"), scores);
    json mj = {{"method", "iee"}, {"matrix", json::array()}};
    for (int i = 0; i < 4; ++i) {
        json row = json::array();
        for (int j = 0; j < 4; ++j) row.push_back(scores(i, j));
        mj["matrix"].push_back(row);
    }
    write_text(p("scores.json"), mj.dump());

    auto r = cli("evaluate --scores " + p("scores.json") + " --truth " + p("truth.csv") + " --report " +
                   p("report.json") + " --roc " + p("roc.csv") + " --n-boot 200 --seed 3");
    REQUIRE(r.code == 0);
    const json rep = json::parse(slurp(p("report.json")));
    const RocCurve curve = roc(scores, truth);
    CHECK(rep.at("auc").get<double>() == curve.auc);
    CHECK(rep.at("positives") == 3);
    CHECK(rep.at("negatives") == 9);
    for (const char* k : {"youden", "concordance", "mindist"}) {
        const auto& o = rep.at("oops").at(k);
        CHECK(o.at("tp").get<int>() + o.at("fn").get<int>() == 3);
        CHECK(o.at("fp").get<int>() + o.at("tn").get<int>() == 9);
    }
    const Interval ci = bootstrap_auc_ci(scores, truth, 200, 0.95, 3);
    CHECK(rep.at("ci").at("lo").get<double>() == ci.lo);
    CHECK(rep.at("ci").at("hi").get<double>() == ci.hi);
    CHECK(rep.at("cosine").get<double>() == doctest::Approx(cosine_similarity(off_diagonal(scores), off_diagonal(truth))));
    CHECK(rep.at("pcc").get<double>() == doctest::Approx(pearson(off_diagonal(scores), off_diagonal(truth))));
    const std::string roc_text = slurp(p("roc.csv"));
    CHECK(roc_text.rfind("threshold,fpr,tpr,tp,fp\ninf,0,0,0,0\n", 0) == 0);

    // CSV scores work as well.
    CHECK(cli("evaluate --scores " + p("scores.csv") + " --truth " + p("truth.csv")).code == 0);
    write_matrix_csv(p("small.csv"), Matrix::Zero(3, 3));
    CHECK(cli("evaluate --scores " + p("scores.csv") + " --truth " + p("small.csv")).code == 2);
    CHECK(cli("evaluate --scores " + p("scores.csv") + " --truth " + p("truth.csv") + " --n-boot 5").code == 1);
}

TEST_CASE("effdist") {
    Matrix f(4, 4), d(4, 4);
    f << 0, 5, 2, 1, 4, 0, 3, 2, 1, 6, 0, 2, 2, 1, 4, 0;
    d << 0, 1, 2, 3, 1, 0, 1.5, 2, 2, 1.5, 0, 1, 3, 2, 1, 0;
    write_matrix_csv(p("f.csv"), f);
    write_matrix_csv(p("d.csv"), d);
    write_text(p("rho.csv"), "0.1\n0.2\n0.15\n0.3\n");
    auto r = cli("effdist --flows " + p("f.csv") + " --dist " + p("d.csv") + " --rho " + p("rho.csv") + " -o " +
                   p("D.csv") + " --report " + p("fit.json"));
    REQUIRE(r.code == 0);
    Vector rho(4);
    rho << 0.1, 0.2, 0.15, 0.3;
    const Matrix ref = effective_distance(f, d, rho).distance;
    CHECK((load_matrix_csv(p("D.csv")) - ref).cwiseAbs().maxCoeff() == 0.0);
    CHECK(json::parse(slurp(p("fit.json"))).at("alpha").size() == 4);
    write_text(p("rho_bad.csv"), "0.1\n0\n0.15\n0.3\n");
    CHECK(cli("effdist --flows " + p("f.csv") + " --dist " + p("d.csv") + " --rho " + p("rho_bad.csv")).code == 2);
}

TEST_CASE("reproduce is deterministic and round-trips its config") {
    const std::string args = "--trials 2 --grid 0,0.2 --methods iee,te --n 300 --k-outer 20 --seed 9";
    auto a = cli("reproduce fig2a " + args + " -o " + p("rep_a"));
    REQUIRE(a.code == 0);
    auto b = cli("reproduce fig2a " + args + " --jobs 2 -o " + p("rep_b"));
    REQUIRE(b.code == 0);
    auto c = cli("reproduce --config " + p("rep_a/config.json") + " -o " + p("rep_c"));
    REQUIRE(c.code == 0);
    for (const char* f : {"config.json", "summary.csv", "report.json", "trials/beta_yx=0.2.csv"}) {
        CAPTURE(f);
        const std::string ref = slurp(p("rep_a/") + f);
        CHECK(!ref.empty());
        CHECK(slurp(p("rep_b/") + f) == ref);
        CHECK(slurp(p("rep_c/") + f) == ref);
    }
    CHECK(a.out == slurp(p("rep_a/summary.csv")));
    CHECK(cli("reproduce fig9 -o " + p("rep_d")).code == 1);
    CHECK(cli("reproduce fig2a --methods iee,xyz -o " + p("rep_d")).code == 1);
    CHECK(cli("reproduce fig3 --config " + p("rep_a/config.json") + " -o " + p("rep_d")).code == 1);
    write_text(p("broken.json"), "{not json");
    CHECK(cli("reproduce --config " + p("broken.json")).code == 2);
}

TEST_CASE("synthetic end to end") {
    REQUIRE(cli("simulate --system henon10 --n 500 --seed 5 -o " + p("e2e")).code == 0);
    REQUIRE(cli("infer --method iee --lag 2 --k-outer 10 --header " + p("e2e/trial_000.csv") + " -o " + p("e2e/m.json"))
                .code == 0);
    auto r = cli("evaluate --scores " + p("e2e/m.json") + " --truth " + p("e2e/ground_truth.csv"));
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("auc").get<double>() > 0.8);
    fs::remove_all(kDir);
}
