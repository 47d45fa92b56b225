#include "intdc/baselines.hpp"
#include "intdc/csv.hpp"
#include "intdc/dynamics.hpp"
#include "intdc/evaluation.hpp"
#include "intdc/experiments.hpp"
#include "intdc/iee.hpp"
#include "intdc/parallel.hpp"
#include "intdc/preprocessing.hpp"
#include "intdc/random.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace intdc;

namespace {

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

Matrix json_matrix(const json& rows, const std::string& source) {
    if (!rows.is_array() || rows.empty() || !rows[0].is_array()) throw DataError(source + ": matrix must be a list of rows");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].is_array() || rows[i].size() != rows[0].size()) throw DataError(source + ": ragged matrix");
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            if (!rows[i][j].is_number()) throw DataError(source + ": non-numeric matrix entry");
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
        }
    }
    return m;
}

json number_or_string(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << text;
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
}

// ---- simulate ----

struct SimulateArgs {
    std::string system = "logistic2";
    Eigen::Index n = 1000, burn_in = 1000;
    int trials = 1;
    std::uint64_t seed = 1;
    std::string out;
    std::vector<std::string> params;
    bool freeze_internal = false;
    int perturb = -1;
};

ParamMap parse_params(const std::vector<std::string>& items) {
    ParamMap out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--param expects name=value, got '" + item + "'");
        const std::string value = item.substr(eq + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value.size() || value.empty()) throw UsageError("--param " + item + ": value is not a number");
        out[item.substr(0, eq)] = v;
    }
    return out;
}

void run_simulate(const SimulateArgs& a) {
    if (a.trials < 1) throw UsageError("--trials must be >= 1");
    if (a.out.empty()) throw UsageError("simulate needs an output directory (-o)");
    SimSpec spec;
    spec.system = parse_system(a.system);
    spec.params = parse_params(a.params);
    spec.n = a.n;
    spec.burn_in = a.burn_in;
    spec.freeze_internal = a.freeze_internal;
    if (a.perturb >= 0 && spec.system != System::chnn) throw UsageError("--perturb applies to chnn only");
    const fs::path dir(a.out);
    fs::create_directories(dir);
    json seeds = json::array();
    for (int t = 0; t < a.trials; ++t) {
        spec.seed = trial_seed(a.seed, t);
        seeds.push_back(spec.seed);
        const Dataset d = a.perturb >= 0 ? perturb_chnn(spec, a.perturb) : simulate(spec);
        std::string stem = "trial_" + std::string(t < 10 ? "00" : t < 100 ? "0" : "") + std::to_string(t);
        write_csv(dir / (stem + ".csv"), d);
        if (spec.system == System::chnn) write_matrix_csv(dir / (stem + "_coupling.csv"), *d.ground_truth);
        else if (t == 0) write_matrix_csv(dir / "ground_truth.csv", *d.ground_truth);
    }
    json params = json::object();
    ParamMap all = default_params(spec.system);
    for (const auto& [k, v] : spec.params) all[k] = v;
    for (const auto& [k, v] : all) params[k] = v;
    json cfg = {{"version", INTDC_VERSION}, {"system", a.system}, {"n", a.n}, {"burn_in", a.burn_in},
                {"trials", a.trials}, {"master_seed", a.seed}, {"trial_seeds", seeds}, {"params", params},
                {"freeze_internal", a.freeze_internal}, {"perturb", a.perturb >= 0 ? json(a.perturb) : json(nullptr)}};
    write_output((dir / "config.json").string(), cfg.dump(2) + "\n");
}

// ---- infer ----

struct InferArgs {
    std::string input, out;
    std::string method = "iee";
    int lag = 2, k_outer = 40, k_inner = 3, theiler = 0;
    std::string metric = "euclidean";
    std::string condition;
    std::string layout = "columns";
    bool header = false;
    std::string detrend, ma_align = "centered", normalize;
    int decimate = 0, segments = 0;
    double jitter = 0.0;
    std::uint64_t seed = 0;
    std::string ccm_transform;
    std::vector<Eigen::Index> ccm_sweep;
    Eigen::Index max_anchors = 0;
    int jobs = 1;
};

std::pair<int, int> parse_detrend(const std::string& s) {
    const auto colon = s.find(':');
    try {
        if (colon == std::string::npos) throw std::invalid_argument("");
        std::size_t a = 0, b = 0;
        const int sw = std::stoi(s.substr(0, colon), &a);
        const int lw = std::stoi(s.substr(colon + 1), &b);
        if (a != colon || b != s.size() - colon - 1) throw std::invalid_argument("");
        return {sw, lw};
    } catch (const std::exception&) {
        throw UsageError("--detrend expects SHORT:LONG, got '" + s + "'");
    }
}

std::size_t find_series(const Dataset& d, const std::string& key) {
    const auto labels = d.labels();
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == key) return i;
    std::size_t used = 0;
    try {
        const long v = std::stol(key, &used);
        if (used == key.size() && v >= 0 && static_cast<std::size_t>(v) < d.size()) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw UsageError("--condition '" + key + "' matches no series label or index");
}

void run_infer(const InferArgs& a) {
    const Method method = parse_method(a.method);
    Dataset data = load_csv(a.input, parse_layout(a.layout), a.header);
    const MovingAverageAlign align = parse_ma_align(a.ma_align);
    if (!a.detrend.empty()) {
        const auto [sw, lw] = parse_detrend(a.detrend);
        for (auto& s : data.series) s = detrend_moving_average(s, sw, lw, align);
    }
    if (!a.normalize.empty()) {
        const NormalizeMode mode = parse_normalize_mode(a.normalize);
        for (auto& s : data.series) s = normalize(s, mode);
    }
    if (a.jitter < 0.0) throw UsageError("--jitter must be >= 0");
    if (a.jitter > 0.0)
        for (std::size_t j = 0; j < data.size(); ++j) data.series[j] = jitter(data.series[j], a.jitter, derive_seed(a.seed, j));
    if (a.decimate > 0 && a.segments > 0) throw UsageError("--decimate and --segments are exclusive");
    std::vector<Dataset> parts;
    if (a.decimate > 0) parts = decimate(data, a.decimate);
    else if (a.segments > 0) parts = segment(data, a.segments);
    else parts = {data};

    IeeConfig iee;
    iee.lag = a.lag;
    iee.k_outer = a.k_outer;
    iee.k_inner = a.k_inner;
    iee.metric_outer = parse_metric(a.metric);
    iee.theiler = a.theiler;
    iee.seed = a.seed;
    iee.max_anchors = a.max_anchors;
    iee.jobs = a.jobs;
    BaselineConfig base;
    base.lag = a.lag;
    base.k_inner = a.k_inner;
    base.theiler = a.theiler;
    base.seed = a.seed;

    CausalMatrix m;
    json sweep;
    if (!a.condition.empty()) {
        if (method != Method::iee) throw UsageError("--condition is only available for --method iee");
        if (parts.size() != 1) throw UsageError("--condition cannot be combined with --decimate or --segments");
        m = ciee_matrix(data, find_series(data, a.condition), iee);
    } else if (method == Method::iee) {
        m = iee_matrix(parts, iee);
    } else {
        m = baseline_matrix(parts, method, base, a.jobs);
    }
    if (!a.ccm_transform.empty()) {
        if (a.ccm_transform != "neglog1m") throw UsageError("unknown --ccm-transform '" + a.ccm_transform + "'");
        if (method != Method::ccm) throw UsageError("--ccm-transform needs --method ccm");
        m = neglog1m(m);
    }
    if (!a.ccm_sweep.empty()) {
        if (method != Method::ccm) throw UsageError("--ccm-sweep needs --method ccm");
        sweep = json::array();
        const auto labels = data.labels();
        for (std::size_t i = 0; i < data.size(); ++i)
            for (std::size_t j = 0; j < data.size(); ++j) {
                if (i == j) continue;
                json curve = json::array();
                for (const auto& [size, skill] : ccm_sweep(data.series[i].values, data.series[j].values, base, a.ccm_sweep))
                    curve.push_back({{"library_size", size}, {"skill", skill}});
                sweep.push_back({{"cause", labels[i]}, {"effect", labels[j]}, {"curve", curve}});
            }
    }

    json cfg = {{"version", INTDC_VERSION}, {"input", a.input}, {"layout", a.layout}, {"header", a.header},
                {"lag", a.lag}, {"seed", a.seed}, {"theiler", a.theiler}};
    if (method == Method::iee) {
        cfg["k_outer"] = a.k_outer;
        cfg["k_inner"] = a.k_inner;
        cfg["metric_outer"] = a.metric;
        cfg["max_anchors"] = a.max_anchors;
        cfg["condition"] = a.condition.empty() ? json(nullptr) : json(a.condition);
    } else if (method == Method::te) {
        cfg["k_inner"] = a.k_inner;
    } else if (method == Method::ccm) {
        cfg["knn"] = base.ccm_neighbors();
        cfg["ccm_transform"] = a.ccm_transform.empty() ? json(nullptr) : json(a.ccm_transform);
    }
    cfg["preprocessing"] = {{"detrend", a.detrend.empty() ? json(nullptr) : json(a.detrend)},
                            {"ma_align", a.ma_align},
                            {"normalize", a.normalize.empty() ? json(nullptr) : json(a.normalize)},
                            {"jitter", a.jitter},
                            {"decimate", a.decimate},
                            {"segments", a.segments}};
    json out = {{"method", to_string(method)}, {"config", cfg}, {"labels", data.labels()}, {"matrix", matrix_json(m)}};
    if (!sweep.is_null()) out["ccm_sweep"] = sweep;
    write_output(a.out, out.dump(2) + "\n");
}

// ---- evaluate ----

struct EvaluateArgs {
    std::string scores, truth, report, roc_out;
    int n_boot = 1000;
    double level = 0.95;
    std::uint64_t seed = 0;
};

Matrix load_scores(const std::string& path) {
    if (fs::path(path).extension() == ".json") {
        const json j = read_json(path);
        if (!j.contains("matrix")) throw DataError(path + ": no 'matrix' field");
        return json_matrix(j["matrix"], path);
    }
    return load_matrix_csv(path);
}

json point_json(const RocCurve& c, const RocPoint& p) {
    const Confusion k = confusion_at(c, p);
    return {{"threshold", number_or_string(p.threshold)}, {"fpr", p.fpr}, {"tpr", p.tpr},
            {"tp", k.tp}, {"fp", k.fp}, {"tn", k.tn}, {"fn", k.fn}};
}

void run_evaluate(const EvaluateArgs& a) {
    const Matrix scores = load_scores(a.scores);
    const Matrix truth = load_matrix_csv(a.truth);
    if (scores.rows() != truth.rows() || scores.cols() != truth.cols())
        throw DataError("score matrix is " + std::to_string(scores.rows()) + "x" + std::to_string(scores.cols()) +
                        " but truth is " + std::to_string(truth.rows()) + "x" + std::to_string(truth.cols()));
    const RocCurve curve = roc(scores, truth);
    const Interval ci = bootstrap_auc_ci(scores, truth, a.n_boot, a.level, a.seed);
    json oops = json::object();
    for (auto c : {OopCriterion::youden, OopCriterion::concordance, OopCriterion::mindist})
        oops[to_string(c)] = point_json(curve, oop(curve, c));
    const Vector s = off_diagonal(scores), t = off_diagonal(truth);
    json report = {{"auc", curve.auc},
                   {"ci", {{"lo", ci.lo}, {"hi", ci.hi}, {"level", a.level}, {"n_boot", a.n_boot}, {"seed", a.seed}}},
                   {"positives", curve.positives},
                   {"negatives", curve.negatives},
                   {"oops", oops},
                   {"cosine", cosine_similarity(s, t)},
                   {"pcc", pearson(s, t)}};
    write_output(a.report, report.dump(2) + "\n");
    if (!a.roc_out.empty()) {
        std::ostringstream os;
        os << "threshold,fpr,tpr,tp,fp\n";
        for (const auto& p : curve.points)
            os << format_number(p.threshold) << ',' << format_number(p.fpr) << ',' << format_number(p.tpr) << ','
               << p.tp << ',' << p.fp << '\n';
        write_output(a.roc_out, os.str());
    }
}

// ---- effdist ----

struct EffdistArgs {
    std::string flows, dist, rho, out, report;
};

void run_effdist(const EffdistArgs& a) {
    const Matrix f = load_matrix_csv(a.flows), d = load_matrix_csv(a.dist), r = load_matrix_csv(a.rho);
    if (r.rows() != 1 && r.cols() != 1) throw DataError(a.rho + ": expected a single row or column");
    const Vector rho = Eigen::Map<const Vector>(r.data(), r.size());
    const EffectiveDistance e = effective_distance(f, d, rho);
    if (a.out.empty() || a.out == "-") {
        std::ostringstream os;
        for (Eigen::Index i = 0; i < e.distance.rows(); ++i) {
            for (Eigen::Index j = 0; j < e.distance.cols(); ++j) os << (j ? "," : "") << format_number(e.distance(i, j));
            os << '\n';
        }
        std::cout << os.str();
    } else {
        write_matrix_csv(a.out, e.distance);
    }
    if (!a.report.empty()) {
        auto vec = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
        json rep = {{"k", vec(e.fit.k)},         {"alpha", vec(e.fit.alpha)},   {"s", vec(e.fit.s)},
                    {"beta", vec(e.fit.beta)},   {"out_flow", vec(e.fit.out_flow)}, {"in_flow", vec(e.fit.in_flow)},
                    {"p_hat", matrix_json(e.p_hat)}, {"q_hat", matrix_json(e.q_hat)},
                    {"travellers", matrix_json(e.travellers)}};
        write_output(a.report, rep.dump(2) + "\n");
    }
}

// ---- reproduce ----

struct ReproduceArgs {
    std::string experiment, config, out;
    int trials = 0;
    std::uint64_t seed = 1;
    std::vector<std::string> methods;
    std::vector<double> grid;
    int lag = 0, k_outer = 0, k_inner = 0;
    Eigen::Index n = 0;
    int jobs = 1;
};

void run_reproduce(const ReproduceArgs& a, const CLI::App& sub) {
    ExperimentConfig cfg;
    if (!a.config.empty()) {
        cfg = ExperimentConfig::from_json(read_json(a.config));
        if (!a.experiment.empty() && parse_experiment(a.experiment) != cfg.experiment)
            throw UsageError("experiment '" + a.experiment + "' differs from the one in " + a.config);
    } else {
        if (a.experiment.empty()) throw UsageError("reproduce needs an experiment name or --config");
        cfg.experiment = parse_experiment(a.experiment);
    }
    if (sub.count("--trials")) cfg.trials = a.trials;
    if (sub.count("--seed")) cfg.master_seed = a.seed;
    if (sub.count("--methods")) {
        cfg.methods.clear();
        for (const auto& m : a.methods) cfg.methods.push_back(parse_method(m));
    }
    if (sub.count("--grid")) cfg.grid = a.grid;
    if (sub.count("--lag")) cfg.lag = a.lag;
    if (sub.count("--k-outer")) cfg.k_outer = a.k_outer;
    if (sub.count("--k-inner")) cfg.k_inner = a.k_inner;
    if (sub.count("--n")) cfg.n = a.n;
    cfg.jobs = a.jobs;
    cfg.out_dir = a.out.empty() ? "results/" + to_string(cfg.experiment) : a.out;
    const ExperimentResult r = run_experiment(cfg);
    std::cout << format_summary_csv(r.summary);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interventional embedding entropy and baseline causality indices"};
    app.set_version_flag("--version", std::string("intdc ") + INTDC_VERSION);
    app.require_subcommand(1);
    const int env_jobs = default_jobs();

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Simulate benchmark systems to CSV");
    s->add_option("--system", sim.system, "logistic2, logistic3, henon10 or chnn")->capture_default_str();
    s->add_option("--n", sim.n, "Samples per trial")->capture_default_str();
    s->add_option("--burn-in", sim.burn_in, "Discarded transient")->capture_default_str();
    s->add_option("--trials", sim.trials)->capture_default_str();
    s->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
    s->add_option("-o,--out", sim.out, "Output directory")->required();
    s->add_option("--param", sim.params, "Parameter override name=value (repeatable)");
    s->add_flag("--freeze-internal", sim.freeze_internal, "chnn: also hold the removed neuron's internal states");
    s->add_option("--perturb", sim.perturb, "chnn: simulate with this neuron's output held at zero");

    InferArgs inf;
    inf.jobs = env_jobs;
    auto* i = app.add_subcommand("infer", "Causal index matrix from a CSV");
    i->add_option("input", inf.input, "CSV file")->required();
    i->add_option("-o,--out", inf.out, "Output JSON (stdout when omitted)");
    i->add_option("--method", inf.method, "iee, gc, te or ccm")->capture_default_str();
    i->add_option("--lag", inf.lag)->capture_default_str();
    i->add_option("--k-outer", inf.k_outer)->capture_default_str();
    i->add_option("--k-inner", inf.k_inner)->capture_default_str();
    i->add_option("--metric", inf.metric, "Outer neighbourhood metric")->capture_default_str();
    i->add_option("--theiler", inf.theiler)->capture_default_str();
    i->add_option("--max-anchors", inf.max_anchors, "Seeded anchor subsample, 0 = all")->capture_default_str();
    i->add_option("--condition", inf.condition, "Conditioning series label or index (cIEE)");
    i->add_option("--layout", inf.layout, "columns or rows")->capture_default_str();
    i->add_flag("--header", inf.header, "First row (or column) holds labels");
    i->add_option("--detrend", inf.detrend, "Moving-average ratio SHORT:LONG");
    i->add_option("--ma-align", inf.ma_align, "centered or trailing")->capture_default_str();
    i->add_option("--normalize", inf.normalize, "zscore or unit_second_moment");
    i->add_option("--decimate", inf.decimate, "Average over this many phases");
    i->add_option("--segments", inf.segments, "Average over this many contiguous pieces");
    i->add_option("--jitter", inf.jitter, "Gaussian jitter standard deviation");
    i->add_option("--seed", inf.seed)->capture_default_str();
    i->add_option("--ccm-transform", inf.ccm_transform, "neglog1m");
    i->add_option("--ccm-sweep", inf.ccm_sweep, "Library sizes for the convergence curve")->delimiter(',');
    i->add_option("--jobs", inf.jobs)->envname("INTDC_JOBS")->check(CLI::PositiveNumber)->capture_default_str();

    EvaluateArgs ev;
    auto* e = app.add_subcommand("evaluate", "ROC, AUC and agreement against a ground truth");
    e->add_option("--scores", ev.scores, "Matrix JSON from infer, or a CSV matrix")->required();
    e->add_option("--truth", ev.truth, "Ground-truth CSV matrix")->required();
    e->add_option("--report", ev.report, "Report JSON (stdout when omitted)");
    e->add_option("--roc", ev.roc_out, "ROC curve CSV");
    e->add_option("--n-boot", ev.n_boot)->capture_default_str();
    e->add_option("--level", ev.level)->capture_default_str();
    e->add_option("--seed", ev.seed)->capture_default_str();

    EffdistArgs ed;
    auto* d = app.add_subcommand("effdist", "Effective distance from flows and distances");
    d->add_option("--flows", ed.flows)->required();
    d->add_option("--dist", ed.dist)->required();
    d->add_option("--rho", ed.rho)->required();
    d->add_option("-o,--out", ed.out, "Distance CSV (stdout when omitted)");
    d->add_option("--report", ed.report, "Gravity fit JSON");

    ReproduceArgs rp;
    rp.jobs = env_jobs;
    auto* r = app.add_subcommand("reproduce", "Run a canned experiment");
    r->add_option("experiment", rp.experiment, "fig2a, fig2b, fig2c, fig2d_g, fig3 or fig4");
    r->add_option("--config", rp.config, "config.json from an earlier run");
    r->add_option("-o,--out", rp.out, "Output directory");
    r->add_option("--trials", rp.trials);
    r->add_option("--seed", rp.seed);
    r->add_option("--methods", rp.methods)->delimiter(',');
    r->add_option("--grid", rp.grid)->delimiter(',');
    r->add_option("--lag", rp.lag);
    r->add_option("--k-outer", rp.k_outer);
    r->add_option("--k-inner", rp.k_inner);
    r->add_option("--n", rp.n);
    r->add_option("--jobs", rp.jobs)->envname("INTDC_JOBS")->check(CLI::PositiveNumber)->capture_default_str();

    if (const char* env = std::getenv("INTDC_JOBS")) {
        const std::string v = env;
        if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos || std::atoi(env) < 1) {
            std::cerr << "usage error: INTDC_JOBS must be a positive integer, got '" << v << "'\n";
            return 1;
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*s) run_simulate(sim);
        else if (*i) run_infer(inf);
        else if (*e) run_evaluate(ev);
        else if (*d) run_effdist(ed);
        else if (*r) run_reproduce(rp, *r);
        return 0;
    } catch (const UsageError& err) {
        std::cerr << "usage error: " << err.what() << '\n';
        return 1;
    } catch (const DataError& err) {
        std::cerr << "data error: " << err.what() << '\n';
        return 2;
    } catch (const DegenerateError& err) {
        std::cerr << "numerical error: " << err.what() << '\n';
        return 3;
    } catch (const fs::filesystem_error& err) {
        std::cerr << "data error: " << err.what() << '\n';
        return 2;
    }
}
