#include "intdc/iee.hpp"

#include "intdc/causal_matrix.hpp"
#include "intdc/info.hpp"
#include "intdc/parallel.hpp"
#include "intdc/random.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace intdc {

namespace {

void check_series(const Vector& v, const char* role) {
    if (!v.allFinite()) throw DataError(std::string(role) + " series contains non-finite values");
    if (v.size() > 0 && v.maxCoeff() == v.minCoeff())
        throw DegenerateError(std::string(role) +
                              " series is constant; the embedding is degenerate (add jitter to the input)");
}

std::vector<Eigen::Index> anchor_rows(Eigen::Index rows, const IeeConfig& cfg) {
    std::vector<Eigen::Index> anchors(static_cast<std::size_t>(rows));
    std::iota(anchors.begin(), anchors.end(), Eigen::Index{0});
    if (cfg.max_anchors > 0 && rows > cfg.max_anchors) {
        Rng rng(cfg.seed);
        std::shuffle(anchors.begin(), anchors.end(), rng);
        anchors.resize(static_cast<std::size_t>(cfg.max_anchors));
        std::sort(anchors.begin(), anchors.end());
    }
    return anchors;
}

double mean_in_order(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

RowMatrix deviations(const RowMatrix& points, const std::vector<Neighbor>& nn, Eigen::Index anchor) {
    RowMatrix d(static_cast<Eigen::Index>(nn.size()), points.cols());
    for (std::size_t r = 0; r < nn.size(); ++r)
        d.row(static_cast<Eigen::Index>(r)) = points.row(nn[r].row) - points.row(anchor);
    return d;
}

}  // namespace

void IeeConfig::validate(Eigen::Index anchors) const {
    if (lag < 1) throw UsageError("lag must be >= 1");
    if (k_inner < 1) throw UsageError("k_inner must be >= 1");
    if (k_outer <= k_inner)
        throw UsageError("k_outer (" + std::to_string(k_outer) + ") must exceed k_inner (" +
                         std::to_string(k_inner) + ")");
    if (theiler < 0) throw UsageError("theiler window must be non-negative");
    if (max_anchors < 0) throw UsageError("max_anchors must be non-negative");
    if (k_outer > anchors - 1)
        throw UsageError("k_outer (" + std::to_string(k_outer) + ") needs at least " + std::to_string(k_outer + 1) +
                         " embedded points, series give " + std::to_string(anchors));
}

LocalDeviationSample local_deviation(const EmbeddingPair& pair, const NeighborIndex& effect_index,
                                     Eigen::Index anchor_row, const IeeConfig& cfg) {
    const auto nn = effect_index.knn(anchor_row, cfg.k_outer, true, cfg.theiler);
    LocalDeviationSample s;
    s.anchor_time = pair.cause.time_labels[static_cast<std::size_t>(anchor_row)];
    s.neighbor_times.reserve(nn.size());
    for (const auto& n : nn) s.neighbor_times.push_back(pair.cause.time_labels[static_cast<std::size_t>(n.row)]);
    s.delta_cause = deviations(pair.cause.points, nn, anchor_row);
    s.delta_effect = deviations(pair.effect.points, nn, anchor_row);
    return s;
}

std::vector<double> iee_local(const Vector& x, const Vector& y, const IeeConfig& cfg) {
    check_series(x, "cause");
    check_series(y, "effect");
    const EmbeddingPair pair = build_pair(x, y, cfg.lag);
    cfg.validate(pair.effect.rows());
    const NeighborIndex index(pair.effect.points, cfg.metric_outer, pair.effect.time_labels);
    const auto anchors = anchor_rows(pair.effect.rows(), cfg);
    std::vector<double> local(anchors.size());
    parallel_for(anchors.size(), cfg.jobs, [&](std::size_t a) {
        const LocalDeviationSample s = local_deviation(pair, index, anchors[a], cfg);
        local[a] = mi_ksg(s.delta_cause, s.delta_effect, cfg.k_inner);
    });
    return local;
}

double iee_pairwise(const Vector& x, const Vector& y, const IeeConfig& cfg) { return mean_in_order(iee_local(x, y, cfg)); }

double iee_pairwise(const TimeSeries& x, const TimeSeries& y, const IeeConfig& cfg) {
    return iee_pairwise(x.values, y.values, cfg);
}

std::vector<std::vector<Eigen::Index>> outer_neighbors(const Vector& x, const Vector& y, const IeeConfig& cfg) {
    const EmbeddingPair pair = build_pair(x, y, cfg.lag);
    cfg.validate(pair.effect.rows());
    const NeighborIndex index(pair.effect.points, cfg.metric_outer, pair.effect.time_labels);
    std::vector<std::vector<Eigen::Index>> out;
    for (Eigen::Index a : anchor_rows(pair.effect.rows(), cfg)) {
        std::vector<Eigen::Index> rows;
        for (const auto& n : index.knn(a, cfg.k_outer, true, cfg.theiler)) rows.push_back(n.row);
        out.push_back(std::move(rows));
    }
    return out;
}

double ciee_pairwise(const Vector& x, const Vector& y, const Vector& z, const IeeConfig& cfg) {
    check_series(x, "cause");
    check_series(y, "effect");
    if (!z.allFinite()) throw DataError("condition series contains non-finite values");
    if (z.size() != x.size()) throw UsageError("condition series differs in length");
    const EmbeddingPair pair = build_pair(x, y, cfg.lag);
    cfg.validate(pair.effect.rows());
    const Eigen::Index n = x.size();
    const EmbeddingMatrix zemb = delay_embed(z, cfg.lag, cfg.lag, n - 2, 0);

    RowMatrix joint(pair.effect.rows(), pair.effect.dim() + zemb.dim());
    joint << pair.effect.points, zemb.points;
    const NeighborIndex index(std::move(joint), cfg.metric_outer, pair.effect.time_labels);

    const auto anchors = anchor_rows(pair.effect.rows(), cfg);
    std::vector<double> local(anchors.size());
    parallel_for(anchors.size(), cfg.jobs, [&](std::size_t a) {
        const Eigen::Index row = anchors[a];
        const auto nn = index.knn(row, cfg.k_outer, true, cfg.theiler);
        local[a] = cmi_ksg(deviations(pair.cause.points, nn, row), deviations(pair.effect.points, nn, row),
                           deviations(zemb.points, nn, row), cfg.k_inner);
    });
    return mean_in_order(local);
}

double ciee_pairwise(const TimeSeries& x, const TimeSeries& y, const TimeSeries& z, const IeeConfig& cfg) {
    return ciee_pairwise(x.values, y.values, z.values, cfg);
}

CausalMatrix iee_matrix(const std::vector<Dataset>& parts, const IeeConfig& cfg) {
    IeeConfig inner = cfg;
    inner.jobs = 1;
    return pairwise_matrix(
        parts, [&inner](const Vector& x, const Vector& y) { return iee_pairwise(x, y, inner); }, cfg.jobs);
}

CausalMatrix iee_matrix(const Dataset& data, const IeeConfig& cfg) { return iee_matrix(std::vector<Dataset>{data}, cfg); }

CausalMatrix ciee_matrix(const Dataset& data, std::size_t condition, const IeeConfig& cfg) {
    data.validate();
    if (condition >= data.size()) throw UsageError("condition index out of range");
    const auto n = static_cast<Eigen::Index>(data.size());
    CausalMatrix out = CausalMatrix::Zero(n, n);
    const Vector& z = data.series[condition].values;
    IeeConfig inner = cfg;
    inner.jobs = 1;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && i != static_cast<Eigen::Index>(condition) && j != static_cast<Eigen::Index>(condition))
                pairs.emplace_back(i, j);
    std::vector<double> values(pairs.size());
    parallel_for(pairs.size(), cfg.jobs, [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        values[p] = ciee_pairwise(data.series[static_cast<std::size_t>(i)].values,
                                  data.series[static_cast<std::size_t>(j)].values, z, inner);
    });
    for (std::size_t p = 0; p < pairs.size(); ++p) out(pairs[p].first, pairs[p].second) = values[p];
    return out;
}

}  // namespace intdc
