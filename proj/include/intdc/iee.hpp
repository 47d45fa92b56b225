#pragma once

#include "intdc/embedding.hpp"
#include "intdc/neighbors.hpp"
#include "intdc/timeseries.hpp"

#include <cstdint>
#include <vector>

namespace intdc {

struct IeeConfig {
    int lag = 2;                 // delay vectors have lag + 1 entries
    int k_outer = 40;            // neighbourhood size around each effect point
    int k_inner = 3;             // KSG neighbour count inside a neighbourhood
    Metric metric_outer = Metric::euclidean;
    int theiler = 0;
    std::uint64_t seed = 0;      // only used when anchors are subsampled
    Eigen::Index max_anchors = 0;  // 0 keeps every anchor
    int jobs = 1;

    // Throws UsageError unless k_inner < k_outer <= anchors - 1.
    void validate(Eigen::Index anchors) const;
};

// Deviations around one anchor. Row r of both matrices belongs to the
// neighbour with time label neighbor_times[r].
struct LocalDeviationSample {
    Eigen::Index anchor_time = 0;
    std::vector<Eigen::Index> neighbor_times;
    RowMatrix delta_cause;   // X_{t_k} - X_{t_n}
    RowMatrix delta_effect;  // Y_{t_k+1} - Y_{t_n+1}
};

// IEE[x -> y]: mean over anchors of the local KSG mutual information between
// cause and effect deviations inside the effect-space neighbourhood.
double iee_pairwise(const TimeSeries& x, const TimeSeries& y, const IeeConfig& cfg);
double iee_pairwise(const Vector& x, const Vector& y, const IeeConfig& cfg);

// Per-anchor local values whose mean is iee_pairwise.
std::vector<double> iee_local(const Vector& x, const Vector& y, const IeeConfig& cfg);

// Deviation samples for one anchor row of build_pair(x, y, lag).
LocalDeviationSample local_deviation(const EmbeddingPair& pair, const NeighborIndex& effect_index,
                                     Eigen::Index anchor_row, const IeeConfig& cfg);

// Outer neighbour rows selected for every anchor (diagnostics and tests).
std::vector<std::vector<Eigen::Index>> outer_neighbors(const Vector& x, const Vector& y, const IeeConfig& cfg);

// cIEE[x -> y | z]: neighbourhoods in the joint (Y_{t+1}, Z_t) space and a
// local conditional MI given the z deviations.
double ciee_pairwise(const TimeSeries& x, const TimeSeries& y, const TimeSeries& z, const IeeConfig& cfg);
double ciee_pairwise(const Vector& x, const Vector& y, const Vector& z, const IeeConfig& cfg);

// Entry (i, j) = IEE[series i -> series j]; zero diagonal. With several
// parts (decimation phases or segments) each entry is the mean over parts.
CausalMatrix iee_matrix(const Dataset& data, const IeeConfig& cfg);
CausalMatrix iee_matrix(const std::vector<Dataset>& parts, const IeeConfig& cfg);

// Entry (i, j) = cIEE[series i -> series j | condition]; the row and column
// of the conditioning series are zero.
CausalMatrix ciee_matrix(const Dataset& data, std::size_t condition, const IeeConfig& cfg);

}  // namespace intdc
