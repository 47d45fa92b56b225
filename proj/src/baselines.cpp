#include "intdc/baselines.hpp"

#include "intdc/causal_matrix.hpp"
#include "intdc/embedding.hpp"
#include "intdc/info.hpp"
#include "intdc/neighbors.hpp"
#include "intdc/random.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace intdc {

Method parse_method(const std::string& name) {
    if (name == "iee") return Method::iee;
    if (name == "gc") return Method::gc;
    if (name == "te") return Method::te;
    if (name == "ccm") return Method::ccm;
    throw UsageError("unknown method '" + name + "' (expected iee, gc, te or ccm)");
}

std::string to_string(Method m) {
    switch (m) {
        case Method::iee: return "iee";
        case Method::gc: return "gc";
        case Method::te: return "te";
        case Method::ccm: return "ccm";
    }
    return "?";
}

void BaselineConfig::validate() const {
    if (lag < 1) throw UsageError("lag must be >= 1");
    if (k_inner < 1) throw UsageError("k_inner must be >= 1");
    if (knn_ccm != 0 && knn_ccm < 2) throw UsageError("CCM needs at least 2 neighbours");
    if (theiler < 0) throw UsageError("theiler window must be non-negative");
}

namespace {

void check_finite(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw UsageError("series differ in length");
    if (!x.allFinite() || !y.allFinite()) throw DataError("series contain non-finite values");
}

double rss(const Matrix& design, const Vector& target) {
    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    if (qr.rank() < design.cols())
        throw DegenerateError("singular regression design (constant or collinear series; add jitter)");
    const Vector beta = qr.solve(target);
    return (target - design * beta).squaredNorm();
}

double pearson_clamped(const Vector& a, const Vector& b) {
    const Vector da = a.array() - a.mean();
    const Vector db = b.array() - b.mean();
    const double den = std::sqrt(da.squaredNorm() * db.squaredNorm());
    if (den == 0.0) return 0.0;
    return std::clamp(da.dot(db) / den, 0.0, 1.0);
}

// Simplex cross-map prediction of target at every row in `queries` using
// neighbours from the library rows of `manifold`.
Vector cross_map(const RowMatrix& manifold, const std::vector<Eigen::Index>& labels, const Vector& target,
                 const std::vector<Eigen::Index>& library, int knn, int theiler) {
    RowMatrix lib(static_cast<Eigen::Index>(library.size()), manifold.cols());
    std::vector<Eigen::Index> lib_labels(library.size());
    for (std::size_t i = 0; i < library.size(); ++i) {
        lib.row(static_cast<Eigen::Index>(i)) = manifold.row(library[i]);
        lib_labels[i] = labels[static_cast<std::size_t>(library[i])];
    }
    const NeighborIndex index(std::move(lib), Metric::euclidean);

    Vector pred(manifold.rows());
    const int fetch = knn + 2 * theiler + 1;
    for (Eigen::Index q = 0; q < manifold.rows(); ++q) {
        const auto cand = index.knn_point(manifold.row(q).data(), static_cast<int>(std::min<Eigen::Index>(fetch, index.size())));
        std::vector<Neighbor> nn;
        for (const auto& c : cand) {
            if (std::abs(lib_labels[static_cast<std::size_t>(c.row)] - labels[static_cast<std::size_t>(q)]) <= theiler)
                continue;
            nn.push_back(c);
            if (static_cast<int>(nn.size()) == knn) break;
        }
        if (static_cast<int>(nn.size()) < knn) throw UsageError("library too small for the CCM neighbour count");
        const double d1 = nn.front().distance;
        if (d1 == 0.0) throw DegenerateError("zero nearest-neighbour distance in CCM");
        double wsum = 0.0, acc = 0.0;
        for (const auto& n : nn) {
            const double w = std::exp(-n.distance / d1);
            wsum += w;
            acc += w * target(library[static_cast<std::size_t>(n.row)]);
        }
        pred(q) = acc / wsum;
    }
    return pred;
}

struct CcmSetup {
    EmbeddingMatrix manifold;
    Vector target;
};

CcmSetup ccm_setup(const Vector& x, const Vector& y, const BaselineConfig& cfg) {
    cfg.validate();
    check_finite(x, y);
    const Eigen::Index n = x.size();
    if (n < cfg.lag + cfg.ccm_neighbors() + 3)
        throw UsageError("series too short for CCM: need at least " +
                         std::to_string(cfg.lag + cfg.ccm_neighbors() + 3) + " samples");
    CcmSetup s{delay_embed(y, cfg.lag, cfg.lag, n - 1), Vector()};
    s.target = x.segment(cfg.lag, n - cfg.lag);
    return s;
}

// Jittered copy used when the manifold has coincident points.
Vector jittered(const Vector& y, std::uint64_t seed) {
    const double scale = (y.array() - y.mean()).matrix().norm() / std::sqrt(static_cast<double>(y.size()));
    const double sigma = 1e-8 * (scale > 0.0 ? scale : 1.0);
    Rng rng(derive_seed(seed, 0xcc3));
    std::normal_distribution<double> noise(0.0, sigma);
    Vector out = y;
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) += noise(rng);
    return out;
}

double ccm_skill(const Vector& x, const Vector& y, const BaselineConfig& cfg) {
    const CcmSetup s = ccm_setup(x, y, cfg);
    std::vector<Eigen::Index> library(static_cast<std::size_t>(s.manifold.rows()));
    std::iota(library.begin(), library.end(), Eigen::Index{0});
    const Vector pred =
        cross_map(s.manifold.points, s.manifold.time_labels, s.target, library, cfg.ccm_neighbors(), std::max(cfg.theiler, 0));
    return pearson_clamped(s.target, pred);
}

}  // namespace

double gc_pairwise(const Vector& x, const Vector& y, int lag) {
    if (lag < 1) throw UsageError("lag must be >= 1");
    check_finite(x, y);
    const Eigen::Index n = x.size();
    const Eigen::Index p = lag + 1;
    if (n <= 2 * p + 10)
        throw UsageError("series too short for GC: need more than " + std::to_string(2 * p + 10) + " samples");
    const Eigen::Index rows = n - lag - 1;
    Matrix restricted(rows, p + 1), full(rows, 2 * p + 1);
    Vector target(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Eigen::Index t = lag + r;
        target(r) = y(t + 1);
        restricted(r, 0) = 1.0;
        full(r, 0) = 1.0;
        for (Eigen::Index l = 0; l < p; ++l) {
            restricted(r, 1 + l) = y(t - l);
            full(r, 1 + l) = y(t - l);
            full(r, 1 + p + l) = x(t - l);
        }
    }
    const double r_full = rss(full, target);
    const double r_restricted = rss(restricted, target);
    if (r_full <= 0.0) throw DegenerateError("full GC model fits exactly; the index is unbounded");
    return std::log(r_restricted / r_full);
}

double te_pairwise(const Vector& x, const Vector& y, const BaselineConfig& cfg) {
    cfg.validate();
    check_finite(x, y);
    const Eigen::Index n = x.size();
    if (n < min_pair_length(cfg.lag))
        throw UsageError("series too short: need at least " + std::to_string(min_pair_length(cfg.lag)) + " samples");
    const EmbeddingMatrix xe = delay_embed(x, cfg.lag, cfg.lag, n - 2);
    const EmbeddingMatrix ye = delay_embed(y, cfg.lag, cfg.lag, n - 2);
    const RowMatrix next = y.segment(cfg.lag + 1, n - cfg.lag - 1);
    return cmi_ksg(next, xe.points, ye.points, cfg.k_inner);
}

double ccm_pairwise(const Vector& x, const Vector& y, const BaselineConfig& cfg) {
    try {
        return ccm_skill(x, y, cfg);
    } catch (const DegenerateError&) {
        return ccm_skill(x, jittered(y, cfg.seed), cfg);
    }
}

std::vector<std::pair<Eigen::Index, double>> ccm_sweep(const Vector& x, const Vector& y, const BaselineConfig& cfg,
                                                       const std::vector<Eigen::Index>& library_sizes) {
    const CcmSetup s = ccm_setup(x, y, cfg);
    const Eigen::Index rows = s.manifold.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(rows));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng rng(cfg.seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::pair<Eigen::Index, double>> out;
    for (Eigen::Index size : library_sizes) {
        if (size <= cfg.ccm_neighbors() + 2 * cfg.theiler || size > rows)
            throw UsageError("library size " + std::to_string(size) + " outside (" +
                             std::to_string(cfg.ccm_neighbors() + 2 * cfg.theiler) + ", " + std::to_string(rows) + "]");
        std::vector<Eigen::Index> library(order.begin(), order.begin() + size);
        std::sort(library.begin(), library.end());
        const Vector pred =
            cross_map(s.manifold.points, s.manifold.time_labels, s.target, library, cfg.ccm_neighbors(), cfg.theiler);
        out.emplace_back(size, pearson_clamped(s.target, pred));
    }
    return out;
}

double neglog1m(double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw UsageError("neglog1m expects a value in [0, 1]");
    return -std::log1p(-std::min(s, 1.0 - 1e-12));
}

CausalMatrix neglog1m(const CausalMatrix& m) {
    CausalMatrix out = m;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = i == j ? 0.0 : neglog1m(m(i, j));
    return out;
}

CausalMatrix baseline_matrix(const std::vector<Dataset>& parts, Method method, const BaselineConfig& cfg, int jobs) {
    cfg.validate();
    switch (method) {
        case Method::gc:
            return pairwise_matrix(parts, [&](const Vector& x, const Vector& y) { return gc_pairwise(x, y, cfg.lag); }, jobs);
        case Method::te:
            return pairwise_matrix(parts, [&](const Vector& x, const Vector& y) { return te_pairwise(x, y, cfg); }, jobs);
        case Method::ccm:
            return pairwise_matrix(parts, [&](const Vector& x, const Vector& y) { return ccm_pairwise(x, y, cfg); }, jobs);
        case Method::iee: break;
    }
    throw UsageError("baseline_matrix handles gc, te and ccm only");
}

CausalMatrix baseline_matrix(const Dataset& data, Method method, const BaselineConfig& cfg, int jobs) {
    return baseline_matrix(std::vector<Dataset>{data}, method, cfg, jobs);
}

}  // namespace intdc
