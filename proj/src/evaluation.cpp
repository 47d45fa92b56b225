#include "intdc/evaluation.hpp"

#include "intdc/parallel.hpp"
#include "intdc/random.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace intdc {

Vector off_diagonal(const Matrix& m) {
    if (m.rows() != m.cols()) throw UsageError("expected a square matrix");
    const Eigen::Index n = m.rows();
    Vector out(n * (n - 1));
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) out(k++) = m(i, j);
    return out;
}

namespace {

std::vector<bool> labels_of(const Matrix& truth) {
    const Vector t = off_diagonal(truth);
    std::vector<bool> labels(static_cast<std::size_t>(t.size()));
    for (Eigen::Index i = 0; i < t.size(); ++i) labels[static_cast<std::size_t>(i)] = t(i) != 0.0;
    return labels;
}

std::vector<double> scores_of(const Matrix& scores, const Matrix& truth) {
    if (scores.rows() != truth.rows() || scores.cols() != truth.cols())
        throw UsageError("score and truth matrices differ in shape");
    const Vector s = off_diagonal(scores);
    return {s.data(), s.data() + s.size()};
}

// Trapezoids on the integer (fp, tp) grid, divided once at the end, so the
// value is bit-identical to the tie-corrected pair count.
double trapezoid(const std::vector<RocPoint>& pts, Eigen::Index positives, Eigen::Index negatives) {
    std::int64_t twice = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        twice += static_cast<std::int64_t>(pts[i].fp - pts[i - 1].fp) * static_cast<std::int64_t>(pts[i].tp + pts[i - 1].tp);
    return static_cast<double>(twice) / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace

RocCurve roc(const std::vector<double>& scores, const std::vector<bool>& labels) {
    if (scores.size() != labels.size()) throw UsageError("scores and labels differ in length");
    RocCurve c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i])) throw DataError("scores contain non-finite values");
        labels[i] ? ++c.positives : ++c.negatives;
    }
    if (c.positives == 0 || c.negatives == 0)
        throw DataError("ROC is undefined: truth needs at least one positive and one negative entry");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    const auto pos = static_cast<double>(c.positives), neg = static_cast<double>(c.negatives);
    c.points.push_back({HUGE_VAL, 0.0, 0.0, 0, 0});
    Eigen::Index tp = 0, fp = 0;
    for (std::size_t i = 0; i < order.size();) {
        const double s = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == s; ++i) labels[order[i]] ? ++tp : ++fp;
        c.points.push_back({s, static_cast<double>(fp) / neg, static_cast<double>(tp) / pos, tp, fp});
    }
    c.auc = trapezoid(c.points, c.positives, c.negatives);
    return c;
}

RocCurve roc(const Matrix& scores, const Matrix& truth) { return roc(scores_of(scores, truth), labels_of(truth)); }

OopCriterion parse_oop(const std::string& name) {
    if (name == "youden") return OopCriterion::youden;
    if (name == "concordance") return OopCriterion::concordance;
    if (name == "mindist") return OopCriterion::mindist;
    throw UsageError("unknown operating-point criterion '" + name + "'");
}

std::string to_string(OopCriterion c) {
    switch (c) {
        case OopCriterion::youden: return "youden";
        case OopCriterion::concordance: return "concordance";
        case OopCriterion::mindist: return "mindist";
    }
    return "?";
}

RocPoint oop(const RocCurve& curve, OopCriterion criterion) {
    if (curve.points.empty()) throw UsageError("empty ROC curve");
    auto score = [criterion](const RocPoint& p) {
        switch (criterion) {
            case OopCriterion::youden: return p.tpr - p.fpr;
            case OopCriterion::concordance: return p.tpr * (1.0 - p.fpr);
            case OopCriterion::mindist: return -std::sqrt(p.fpr * p.fpr + (1.0 - p.tpr) * (1.0 - p.tpr));
        }
        return 0.0;
    };
    // Points are ordered by non-decreasing FPR, so the first maximum wins ties.
    const RocPoint* best = &curve.points.front();
    for (const auto& p : curve.points)
        if (score(p) > score(*best)) best = &p;
    return *best;
}

Confusion confusion_at(const RocCurve& curve, const RocPoint& point) {
    return {point.tp, point.fp, curve.negatives - point.fp, curve.positives - point.tp};
}

Interval bootstrap_auc_ci(const std::vector<double>& scores, const std::vector<bool>& labels, int n_boot, double level,
                          std::uint64_t seed, int jobs) {
    if (n_boot < 100) throw UsageError("bootstrap needs at least 100 resamples");
    if (!(level > 0.0 && level < 1.0)) throw UsageError("confidence level must lie in (0, 1)");
    roc(scores, labels);  // validates the input
    const std::size_t m = scores.size();
    std::vector<double> aucs(static_cast<std::size_t>(n_boot));
    parallel_for(aucs.size(), jobs, [&](std::size_t b) {
        Rng rng(derive_seed(seed, b));
        std::uniform_int_distribution<std::size_t> pick(0, m - 1);
        std::vector<double> s(m);
        std::vector<bool> l(m);
        for (;;) {
            bool any_pos = false, any_neg = false;
            for (std::size_t i = 0; i < m; ++i) {
                const std::size_t r = pick(rng);
                s[i] = scores[r];
                l[i] = labels[r];
                (labels[r] ? any_pos : any_neg) = true;
            }
            if (any_pos && any_neg) break;
        }
        aucs[b] = roc(s, l).auc;
    });
    return {quantile(aucs, (1.0 - level) / 2.0), quantile(aucs, (1.0 + level) / 2.0)};
}

Interval bootstrap_auc_ci(const Matrix& scores, const Matrix& truth, int n_boot, double level, std::uint64_t seed,
                          int jobs) {
    return bootstrap_auc_ci(scores_of(scores, truth), labels_of(truth), n_boot, level, seed, jobs);
}

LinearFit linear_fit(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw UsageError("regression inputs differ in length");
    if (x.size() < 2) throw UsageError("regression needs at least two points");
    const Vector dx = x.array() - x.mean();
    const Vector dy = y.array() - y.mean();
    const double sxx = dx.squaredNorm(), syy = dy.squaredNorm();
    if (sxx == 0.0) throw DegenerateError("regression predictor has zero variance");
    LinearFit f;
    f.slope = dx.dot(dy) / sxx;
    f.intercept = y.mean() - f.slope * x.mean();
    f.r_squared = syy == 0.0 ? 1.0 : (dx.dot(dy) * dx.dot(dy)) / (sxx * syy);
    return f;
}

KldAgreement kld_agreement(const Matrix& index, const Matrix& kld) {
    if (index.rows() != kld.rows() || index.cols() != kld.cols()) throw UsageError("matrices differ in shape");
    const Vector a = off_diagonal(index), b = off_diagonal(kld);
    const LinearFit f = linear_fit(b, a);
    return {f.r_squared, f.slope, f.intercept, cosine_similarity(a, b)};
}

namespace {

void check_flows(const Matrix& flows, const Matrix& dist) {
    const Eigen::Index n = flows.rows();
    if (flows.cols() != n || dist.rows() != n || dist.cols() != n)
        throw UsageError("flow and distance matrices must be square and of equal size");
    if (n < 4) throw UsageError("gravity fit needs at least four nodes");
    if (!flows.allFinite() || !dist.allFinite()) throw DataError("flows or distances contain non-finite values");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (flows(i, i) != 0.0 || dist(i, i) != 0.0) throw DataError("flows and distances need zero diagonals");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (flows(i, j) < 0.0) throw DataError("flows must be non-negative");
            if (i != j && dist(i, j) <= 0.0) throw DataError("off-diagonal distances must be positive");
            if (dist(i, j) != dist(j, i)) throw DataError("distance matrix must be symmetric");
        }
    }
}

// ln(target) = c + e ln(d) over usable entries; returns (c, e).
std::pair<double, double> log_fit(const std::vector<double>& log_d, const std::vector<double>& log_y,
                                  const std::string& what) {
    if (log_d.size() < 3)
        throw DegenerateError(what + " has fewer than 3 positive flows; the gravity fit is undefined");
    const Vector x = Eigen::Map<const Vector>(log_d.data(), static_cast<Eigen::Index>(log_d.size()));
    const Vector y = Eigen::Map<const Vector>(log_y.data(), static_cast<Eigen::Index>(log_y.size()));
    const LinearFit f = linear_fit(x, y);
    return {f.intercept, f.slope};
}

}  // namespace

GravityFit fit_gravity(const Matrix& flows, const Matrix& dist) {
    check_flows(flows, dist);
    const Eigen::Index n = flows.rows();
    GravityFit g;
    g.out_flow = flows.rowwise().sum();
    g.in_flow = flows.colwise().sum().transpose();
    g.k.resize(n);
    g.alpha.resize(n);
    g.s.resize(n);
    g.beta.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<double> ld, ly;
        for (Eigen::Index j = 0; j < n; ++j)
            if (j != i && flows(i, j) > 0.0) {
                ld.push_back(std::log(dist(i, j)));
                ly.push_back(std::log(flows(i, j) / g.out_flow(i) / g.in_flow(j)));
            }
        const auto [c, e] = log_fit(ld, ly, "row " + std::to_string(i));
        g.k(i) = std::exp(c);
        g.alpha(i) = e;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
        std::vector<double> ld, ly;
        for (Eigen::Index i = 0; i < n; ++i)
            if (i != j && flows(i, j) > 0.0) {
                ld.push_back(std::log(dist(i, j)));
                ly.push_back(std::log(flows(i, j) / g.in_flow(j) / g.out_flow(i)));
            }
        const auto [c, e] = log_fit(ld, ly, "column " + std::to_string(j));
        g.s(j) = std::exp(c);
        g.beta(j) = e;
    }
    return g;
}

EffectiveDistance effective_distance(const Matrix& flows, const Matrix& dist, const Vector& rho) {
    if (rho.size() != flows.rows()) throw UsageError("rho needs one value per node");
    if (!rho.allFinite() || rho.minCoeff() <= 0.0) throw DataError("rho must be positive");
    return effective_distance(fit_gravity(flows, dist), dist, rho);
}

EffectiveDistance effective_distance(const GravityFit& fit, const Matrix& dist, const Vector& rho) {
    const Eigen::Index n = dist.rows();
    if (dist.cols() != n || n < 2) throw UsageError("distance matrix must be square with at least two nodes");
    for (const Vector* v : {&fit.k, &fit.alpha, &fit.s, &fit.beta, &fit.out_flow, &fit.in_flow})
        if (v->size() != n) throw UsageError("gravity fit and distance matrix sizes differ");
    if (rho.size() != n) throw UsageError("rho needs one value per node");
    if (!rho.allFinite() || rho.minCoeff() <= 0.0) throw DataError("rho must be positive");
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && !(dist(i, j) > 0.0 && std::isfinite(dist(i, j))))
                throw DataError("distances must be positive off the diagonal");
    EffectiveDistance e;
    e.fit = fit;
    const GravityFit& g = e.fit;

    Matrix p = Matrix::Zero(n, n), q = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) {
                p(i, j) = g.k(i) * g.in_flow(j) * std::pow(dist(i, j), g.alpha(i));
                q(i, j) = g.s(j) * g.out_flow(i) * std::pow(dist(i, j), g.beta(j));
            }
    e.p_hat = p.array().colwise() / p.rowwise().sum().array();
    e.q_hat = q.array().rowwise() / q.colwise().sum().array();

    e.travellers = Matrix::Zero(n, n);
    e.distance = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double exponent_sum = g.alpha(i) + g.beta(j);
            if (exponent_sum == 0.0)
                throw DegenerateError("alpha_" + std::to_string(i) + " + beta_" + std::to_string(j) +
                                      " = 0; the effective distance exponent is singular");
            e.travellers(i, j) = std::sqrt(rho(i) * g.out_flow(i) * e.p_hat(i, j) * rho(i) * g.in_flow(j) * e.q_hat(i, j));
            e.distance(i, j) = std::pow(e.travellers(i, j), 2.0 / exponent_sum);
        }
    return e;
}

}  // namespace intdc
