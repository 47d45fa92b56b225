#include "intdc/experiments.hpp"

#include "intdc/csv.hpp"
#include "intdc/dynamics.hpp"
#include "intdc/evaluation.hpp"
#include "intdc/info.hpp"
#include "intdc/parallel.hpp"
#include "intdc/preprocessing.hpp"
#include "intdc/random.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace intdc {

namespace fs = std::filesystem;
using nlohmann::json;

Experiment parse_experiment(const std::string& name) {
    if (name == "fig2a") return Experiment::fig2a;
    if (name == "fig2b") return Experiment::fig2b;
    if (name == "fig2c") return Experiment::fig2c;
    if (name == "fig2d_g") return Experiment::fig2d_g;
    if (name == "fig3") return Experiment::fig3;
    if (name == "fig4") return Experiment::fig4;
    throw UsageError("unknown experiment '" + name + "' (expected fig2a, fig2b, fig2c, fig2d_g, fig3 or fig4)");
}

std::string to_string(Experiment e) {
    switch (e) {
        case Experiment::fig2a: return "fig2a";
        case Experiment::fig2b: return "fig2b";
        case Experiment::fig2c: return "fig2c";
        case Experiment::fig2d_g: return "fig2d_g";
        case Experiment::fig3: return "fig3";
        case Experiment::fig4: return "fig4";
    }
    return "?";
}

std::uint64_t trial_seed(std::uint64_t master_seed, int trial) {
    return derive_seed(master_seed, static_cast<std::uint64_t>(trial));
}

namespace {

constexpr double kChnnJitter = 1e-7;
constexpr int kKldNeighbors = 5;

int default_trials(Experiment e) {
    switch (e) {
        case Experiment::fig2d_g: return 50;
        case Experiment::fig3: return 20;
        default: return 100;
    }
}

std::vector<Method> default_methods(Experiment e) {
    if (e == Experiment::fig2d_g) return {Method::iee};
    return {Method::iee, Method::gc, Method::te, Method::ccm};
}

std::vector<double> default_grid(Experiment e) {
    switch (e) {
        case Experiment::fig2a:
        case Experiment::fig2b: {
            std::vector<double> g;
            for (int i = 0; i <= 30; ++i) g.push_back(i / 100.0);
            return g;
        }
        case Experiment::fig2c: return {0.0, 0.5};
        case Experiment::fig2d_g: return {0.15, 0.125, 0.1, 0.075, 0.05};
        default: return {};
    }
}

// Rethrows with a location prefix, keeping the error category.
template <class F>
auto in_context(const std::string& where, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const UsageError& e) {
        throw UsageError(where + ": " + e.what());
    } catch (const DataError& e) {
        throw DataError(where + ": " + e.what());
    } catch (const DegenerateError& e) {
        throw DegenerateError(where + ": " + e.what());
    }
}

double pair_value(Method m, const Vector& x, const Vector& y, const IeeConfig& iee, const BaselineConfig& base) {
    switch (m) {
        case Method::iee: return iee_pairwise(x, y, iee);
        case Method::gc: return gc_pairwise(x, y, base.lag);
        case Method::te: return te_pairwise(x, y, base);
        case Method::ccm: return ccm_pairwise(x, y, base);
    }
    return 0.0;
}

CausalMatrix method_matrix(Method m, const Dataset& d, const IeeConfig& iee, const BaselineConfig& base) {
    return m == Method::iee ? iee_matrix(d, iee) : baseline_matrix(d, m, base, 1);
}

struct Stats {
    int count = 0;
    double mean = 0.0, std = 0.0, median = 0.0;
};

Stats stats_of(std::vector<double> v) {
    Stats s;
    s.count = static_cast<int>(v.size());
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double sq = 0.0;
        for (double x : v) sq += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(sq / static_cast<double>(v.size() - 1));
    }
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    s.median = v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    return s;
}

SummaryRow make_row(std::string point, Method m, std::string direction, const std::vector<double>& values) {
    const Stats s = stats_of(values);
    return {std::move(point), to_string(m), std::move(direction), s.count, s.mean, s.std, s.median};
}

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
}

std::string file_label(std::string s) {
    std::replace(s.begin(), s.end(), ';', '_');
    return s;
}

std::string matrix_csv(const Matrix& m) {
    std::ostringstream os;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) os << (j ? "," : "") << format_number(m(i, j));
        os << '\n';
    }
    return os.str();
}

std::string padded(int i) {
    std::string s = std::to_string(i);
    return std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

// ---- coupling sweeps (fig2a, fig2b, fig2c, fig2d_g) ----

struct SweepPoint {
    std::string label;
    SimSpec spec;
    IeeConfig iee;
    BaselineConfig base;
};

struct Direction {
    std::string name;
    std::size_t cause, effect;
};

std::vector<SweepPoint> sweep_points(const ExperimentConfig& cfg) {
    std::vector<SweepPoint> points;
    auto make = [&](std::string label, System sys, ParamMap params, int lag, int k_outer, Eigen::Index n) {
        SweepPoint p;
        p.label = std::move(label);
        p.spec.system = sys;
        p.spec.params = std::move(params);
        p.spec.n = n;
        p.iee.lag = lag;
        p.iee.k_outer = k_outer;
        p.iee.k_inner = cfg.k_inner.value_or(3);
        p.base.lag = lag;
        p.base.k_inner = p.iee.k_inner;
        points.push_back(std::move(p));
    };
    const int lag = cfg.lag.value_or(2);
    const Eigen::Index n = cfg.n.value_or(1000);
    switch (cfg.experiment) {
        case Experiment::fig2a:
        case Experiment::fig2b: {
            const double bxy = cfg.experiment == Experiment::fig2a ? 0.0 : 0.1;
            for (double b : cfg.grid)
                make("beta_yx=" + format_number(b), System::logistic2, {{"beta_xy", bxy}, {"beta_yx", b}}, lag,
                     cfg.k_outer.value_or(40), n);
            break;
        }
        case Experiment::fig2c:
            for (double b : cfg.grid)
                make("beta_xy=" + format_number(b), System::logistic3, {{"beta_xy", b}}, lag, cfg.k_outer.value_or(20), n);
            break;
        case Experiment::fig2d_g: {
            const int k = cfg.k_outer.value_or(40);
            for (int l = 2; l <= 7; ++l)
                for (double b : cfg.grid)
                    make("L=" + std::to_string(l) + ";beta_yx=" + format_number(b), System::logistic2, {{"beta_yx", b}}, l, k, n);
            for (int kk = 35; kk <= 45; ++kk)
                for (double b : cfg.grid)
                    make("K=" + std::to_string(kk) + ";beta_yx=" + format_number(b), System::logistic2, {{"beta_yx", b}}, lag, kk, n);
            for (Eigen::Index nn = 600; nn <= 1100; nn += 100)
                for (double b : cfg.grid)
                    make("N=" + std::to_string(nn) + ";beta_yx=" + format_number(b), System::logistic2, {{"beta_yx", b}}, lag, k, nn);
            for (int i = 0; i <= 5; ++i) {
                const double sigma = std::pow(10.0, -2.5 + 0.1 * i);
                for (double b : cfg.grid)
                    make("log10_sigma=" + format_number(-2.5 + 0.1 * i) + ";beta_yx=" + format_number(b), System::logistic2,
                         {{"beta_yx", b}, {"sigma", sigma}}, lag, k, n);
            }
            break;
        }
        default: break;
    }
    return points;
}

std::vector<Direction> sweep_directions(Experiment e) {
    if (e == Experiment::fig2c) return {{"x->y", 0, 1}, {"z->x", 2, 0}, {"z->y", 2, 1}};
    if (e == Experiment::fig2d_g) return {{"y->x", 1, 0}};
    return {{"y->x", 1, 0}, {"x->y", 0, 1}};
}

ExperimentResult run_sweep(const ExperimentConfig& cfg) {
    const auto points = sweep_points(cfg);
    const auto dirs = sweep_directions(cfg.experiment);
    const std::size_t nm = cfg.methods.size(), nd = dirs.size(), nt = static_cast<std::size_t>(cfg.trials);
    // values[((p * nt + t) * nm + m) * nd + d]
    std::vector<double> values(points.size() * nt * nm * nd);
    parallel_for(points.size() * nt, cfg.jobs, [&](std::size_t task) {
        const std::size_t p = task / nt, t = task % nt;
        const std::string where = to_string(cfg.experiment) + ", " + points[p].label + ", trial " + std::to_string(t);
        in_context(where, [&] {
            SimSpec spec = points[p].spec;
            spec.seed = trial_seed(cfg.master_seed, static_cast<int>(t));
            const Dataset d = simulate(spec);
            for (std::size_t m = 0; m < nm; ++m)
                for (std::size_t k = 0; k < nd; ++k)
                    values[(task * nm + m) * nd + k] =
                        pair_value(cfg.methods[m], d.series[dirs[k].cause].values, d.series[dirs[k].effect].values,
                                   points[p].iee, points[p].base);
            return 0;
        });
    });

    ExperimentResult r;
    r.config = cfg;
    for (std::size_t p = 0; p < points.size(); ++p)
        for (std::size_t m = 0; m < nm; ++m)
            for (std::size_t k = 0; k < nd; ++k) {
                std::vector<double> v(nt);
                for (std::size_t t = 0; t < nt; ++t) v[t] = values[((p * nt + t) * nm + m) * nd + k];
                r.summary.push_back(make_row(points[p].label, cfg.methods[m], dirs[k].name, v));
            }
    r.report = json::object();

    if (!cfg.out_dir.empty()) {
        for (std::size_t p = 0; p < points.size(); ++p) {
            std::ostringstream os;
            os << "trial,seed,method,direction,value\n";
            for (std::size_t t = 0; t < nt; ++t)
                for (std::size_t m = 0; m < nm; ++m)
                    for (std::size_t k = 0; k < nd; ++k)
                        os << t << ',' << trial_seed(cfg.master_seed, static_cast<int>(t)) << ','
                           << to_string(cfg.methods[m]) << ',' << dirs[k].name << ','
                           << format_number(values[((p * nt + t) * nm + m) * nd + k]) << '\n';
            write_text(fs::path(cfg.out_dir) / "trials" / (file_label(points[p].label) + ".csv"), os.str());
        }
    }
    return r;
}

// ---- Henon network (fig3) ----

ExperimentResult run_henon(const ExperimentConfig& cfg) {
    const std::size_t nm = cfg.methods.size(), nt = static_cast<std::size_t>(cfg.trials);
    IeeConfig iee;
    iee.lag = cfg.lag.value_or(2);
    iee.k_outer = cfg.k_outer.value_or(10);
    iee.k_inner = cfg.k_inner.value_or(3);
    BaselineConfig base;
    base.lag = iee.lag;
    base.k_inner = iee.k_inner;

    std::vector<CausalMatrix> mats(nt * nm);
    Matrix truth;
    parallel_for(nt, cfg.jobs, [&](std::size_t t) {
        in_context("fig3, trial " + std::to_string(t), [&] {
            SimSpec spec;
            spec.system = System::henon10;
            spec.n = cfg.n.value_or(500);
            spec.seed = trial_seed(cfg.master_seed, static_cast<int>(t));
            const Dataset d = simulate(spec);
            if (t == 0) truth = *d.ground_truth;
            for (std::size_t m = 0; m < nm; ++m) mats[t * nm + m] = method_matrix(cfg.methods[m], d, iee, base);
            return 0;
        });
    });
    if (truth.size() == 0) {
        SimSpec spec;
        spec.system = System::henon10;
        spec.n = 10;
        truth = *simulate(spec).ground_truth;
    }
    const auto nodes = truth.rows();

    ExperimentResult r;
    r.config = cfg;
    r.report = json::object();
    for (std::size_t m = 0; m < nm; ++m) {
        const std::string name = to_string(cfg.methods[m]);
        std::vector<double> aucs(nt);
        std::map<int, int> strongest;
        for (std::size_t t = 0; t < nt; ++t) {
            const CausalMatrix& c = mats[t * nm + m];
            aucs[t] = roc(c, truth).auc;
            // Strongest input to node 7 (index 6); ties go to the lower index.
            Eigen::Index best = -1;
            for (Eigen::Index i = 0; i < nodes; ++i)
                if (i != 6 && (best < 0 || c(i, 6) > c(best, 6))) best = i;
            ++strongest[static_cast<int>(best) + 1];
        }
        r.summary.push_back(make_row("auc", cfg.methods[m], "all", aucs));
        json from1 = json::array(), to7 = json::array();
        for (Eigen::Index k = 1; k < nodes; ++k) {
            std::vector<double> v(nt);
            for (std::size_t t = 0; t < nt; ++t) v[t] = mats[t * nm + m](0, k);
            r.summary.push_back(make_row("from_x1", cfg.methods[m], "x1->x" + std::to_string(k + 1), v));
            from1.push_back(stats_of(v).median);
        }
        for (Eigen::Index k = 0; k < nodes; ++k) {
            if (k == 6) continue;
            std::vector<double> v(nt);
            for (std::size_t t = 0; t < nt; ++t) v[t] = mats[t * nm + m](k, 6);
            r.summary.push_back(make_row("to_x7", cfg.methods[m], "x" + std::to_string(k + 1) + "->x7", v));
            to7.push_back(stats_of(v).median);
        }
        json counts = json::object();
        for (const auto& [node, count] : strongest) counts["x" + std::to_string(node)] = count;
        r.report[name] = {{"auc", aucs}, {"from_x1_median", from1}, {"to_x7_median", to7}, {"strongest_input_to_x7", counts}};
    }

    if (!cfg.out_dir.empty()) {
        write_text(fs::path(cfg.out_dir) / "ground_truth.csv", matrix_csv(truth));
        for (std::size_t t = 0; t < nt; ++t)
            for (std::size_t m = 0; m < nm; ++m)
                write_text(fs::path(cfg.out_dir) / "trials" /
                               ("trial_" + padded(static_cast<int>(t)) + "_" + to_string(cfg.methods[m]) + ".csv"),
                           matrix_csv(mats[t * nm + m]));
    }
    return r;
}

// ---- chaotic neural networks (fig4) ----

Dataset jittered(const Dataset& d, std::uint64_t seed) {
    Dataset out = d;
    for (std::size_t j = 0; j < out.size(); ++j)
        out.series[j] = jitter(out.series[j], kChnnJitter, derive_seed(seed, j));
    return out;
}

RowMatrix column(const Vector& v) { return RowMatrix(v); }

ExperimentResult run_chnn(const ExperimentConfig& cfg) {
    const std::size_t nm = cfg.methods.size(), nt = static_cast<std::size_t>(cfg.trials);
    IeeConfig iee;
    iee.lag = cfg.lag.value_or(3);
    iee.k_outer = cfg.k_outer.value_or(40);
    iee.k_inner = cfg.k_inner.value_or(3);
    BaselineConfig base;
    base.lag = iee.lag;
    base.k_inner = iee.k_inner;

    std::vector<CausalMatrix> mats(nt * nm), klds(nt);
    std::vector<Matrix> couplings(nt);
    parallel_for(nt, cfg.jobs, [&](std::size_t t) {
        in_context("fig4, network " + std::to_string(t), [&] {
            SimSpec spec;
            spec.system = System::chnn;
            spec.n = cfg.n.value_or(1000);
            spec.seed = trial_seed(cfg.master_seed, static_cast<int>(t));
            couplings[t] = chnn_coupling(spec);
            const Dataset obs = jittered(simulate(spec), derive_seed(spec.seed, 99));
            const auto nodes = static_cast<Eigen::Index>(obs.size());
            Matrix kld = Matrix::Zero(nodes, nodes);
            for (Eigen::Index i = 0; i < nodes; ++i) {
                const Dataset per = jittered(perturb_chnn(spec, static_cast<int>(i)),
                                             derive_seed(spec.seed, 100 + static_cast<std::uint64_t>(i)));
                for (Eigen::Index j = 0; j < nodes; ++j)
                    if (i != j)
                        kld(i, j) = kld_knn(column(obs.series[static_cast<std::size_t>(j)].values),
                                            column(per.series[static_cast<std::size_t>(j)].values), kKldNeighbors)
                                        .clamped;
            }
            klds[t] = kld;
            for (std::size_t m = 0; m < nm; ++m) mats[t * nm + m] = method_matrix(cfg.methods[m], obs, iee, base);
            return 0;
        });
    });

    ExperimentResult r;
    r.config = cfg;
    r.report = json::object();
    for (std::size_t m = 0; m < nm; ++m) {
        std::vector<double> cosines(nt);
        std::vector<double> xs, ys;
        for (std::size_t t = 0; t < nt; ++t) {
            const Vector a = off_diagonal(mats[t * nm + m]), b = off_diagonal(klds[t]);
            cosines[t] = cosine_similarity(a, b);
            xs.insert(xs.end(), b.data(), b.data() + b.size());
            ys.insert(ys.end(), a.data(), a.data() + a.size());
        }
        const LinearFit fit = linear_fit(Eigen::Map<Vector>(xs.data(), static_cast<Eigen::Index>(xs.size())),
                                         Eigen::Map<Vector>(ys.data(), static_cast<Eigen::Index>(ys.size())));
        r.summary.push_back(make_row("cosine", cfg.methods[m], "all", cosines));
        r.summary.push_back(make_row("r_squared", cfg.methods[m], "all", {fit.r_squared}));
        const Stats s = stats_of(cosines);
        r.report[to_string(cfg.methods[m])] = {{"r_squared", fit.r_squared}, {"slope", fit.slope},
                                               {"intercept", fit.intercept}, {"cosine_mean", s.mean},
                                               {"cosine_std", s.std}, {"cosine", cosines}};
    }
    r.report["kld"] = {{"k", kKldNeighbors}, {"jitter_sigma", kChnnJitter}, {"pairs", nt * 90}};

    if (!cfg.out_dir.empty()) {
        for (std::size_t t = 0; t < nt; ++t) {
            const fs::path dir = fs::path(cfg.out_dir) / "networks";
            const std::string stem = "net_" + padded(static_cast<int>(t));
            write_text(dir / (stem + "_coupling.csv"), matrix_csv(couplings[t]));
            write_text(dir / (stem + "_kld.csv"), matrix_csv(klds[t]));
            for (std::size_t m = 0; m < nm; ++m)
                write_text(dir / (stem + "_" + to_string(cfg.methods[m]) + ".csv"), matrix_csv(mats[t * nm + m]));
        }
    }
    return r;
}

}  // namespace

ExperimentConfig ExperimentConfig::resolved() const {
    ExperimentConfig c = *this;
    if (c.trials == 0) c.trials = default_trials(c.experiment);
    if (c.trials < 1) throw UsageError("trials must be >= 1");
    if (c.methods.empty()) c.methods = default_methods(c.experiment);
    if (c.grid.empty()) c.grid = default_grid(c.experiment);
    if (c.jobs < 1) throw UsageError("jobs must be >= 1");
    if (c.lag && *c.lag < 1) throw UsageError("lag must be >= 1");
    if (c.k_outer && *c.k_outer < 2) throw UsageError("k_outer must be >= 2");
    if (c.k_inner && *c.k_inner < 1) throw UsageError("k_inner must be >= 1");
    if (c.n && *c.n < 20) throw UsageError("n must be >= 20");
    if (c.experiment == Experiment::fig2d_g && c.methods != std::vector<Method>{Method::iee})
        throw UsageError("fig2d_g evaluates iee only");
    return c;
}

json ExperimentConfig::to_json() const {
    json j;
    j["experiment"] = to_string(experiment);
    j["trials"] = trials;
    j["master_seed"] = master_seed;
    json m = json::array();
    for (Method x : methods) m.push_back(to_string(x));
    j["methods"] = m;
    j["lag"] = lag ? json(*lag) : json(nullptr);
    j["k_outer"] = k_outer ? json(*k_outer) : json(nullptr);
    j["k_inner"] = k_inner ? json(*k_inner) : json(nullptr);
    j["n"] = n ? json(*n) : json(nullptr);
    j["grid"] = grid;
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    try {
        ExperimentConfig c;
        c.experiment = parse_experiment(j.at("experiment").get<std::string>());
        c.trials = j.value("trials", 0);
        c.master_seed = j.value("master_seed", std::uint64_t{1});
        for (const auto& m : j.value("methods", json::array())) c.methods.push_back(parse_method(m.get<std::string>()));
        auto opt = [&](const char* key, auto& field) {
            if (j.contains(key) && !j[key].is_null()) field = j[key].get<typename std::decay_t<decltype(field)>::value_type>();
        };
        opt("lag", c.lag);
        opt("k_outer", c.k_outer);
        opt("k_inner", c.k_inner);
        opt("n", c.n);
        c.grid = j.value("grid", std::vector<double>{});
        return c;
    } catch (const json::exception& e) {
        throw UsageError(std::string("invalid experiment config: ") + e.what());
    }
}

const SummaryRow& ExperimentResult::row(const std::string& point, const std::string& method,
                                        const std::string& direction) const {
    for (const auto& r : summary)
        if (r.point == point && r.method == method && r.direction == direction) return r;
    throw UsageError("no summary row for " + point + " / " + method + " / " + direction);
}

std::string format_summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream os;
    os << "point,method,direction,count,mean,std,median\n";
    for (const auto& r : rows)
        os << r.point << ',' << r.method << ',' << r.direction << ',' << r.count << ',' << format_number(r.mean) << ','
           << format_number(r.std) << ',' << format_number(r.median) << '\n';
    return os.str();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg_in) {
    const ExperimentConfig cfg = cfg_in.resolved();
    ExperimentResult r;
    switch (cfg.experiment) {
        case Experiment::fig3: r = run_henon(cfg); break;
        case Experiment::fig4: r = run_chnn(cfg); break;
        default: r = run_sweep(cfg); break;
    }
    if (!cfg.out_dir.empty()) {
        json config = cfg.to_json();
        config["version"] = INTDC_VERSION;
        json seeds = json::array();
        for (int t = 0; t < cfg.trials; ++t) seeds.push_back(trial_seed(cfg.master_seed, t));
        config["trial_seeds"] = seeds;
        config["seed_rule"] = "trial seed = splitmix64(splitmix64(master_seed) + trial)";
        write_text(fs::path(cfg.out_dir) / "config.json", config.dump(2) + "\n");
        write_text(fs::path(cfg.out_dir) / "summary.csv", format_summary_csv(r.summary));
        write_text(fs::path(cfg.out_dir) / "report.json", r.report.dump(2) + "\n");
    }
    return r;
}

}  // namespace intdc
