#pragma once

#include "intdc/timeseries.hpp"

#include <utility>
#include <vector>

namespace intdc {

// Delay vectors as rows. Row m is (v[t+shift], v[t+shift-1], ..., v[t+shift-L])
// for t = time_labels[m]; shift is 0 for cause embeddings and 1 for the
// one-step-ahead effect embedding.
struct EmbeddingMatrix {
    RowMatrix points;
    std::vector<Eigen::Index> time_labels;
    int lag = 0;

    Eigen::Index rows() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }
};

struct EmbeddingPair {
    EmbeddingMatrix cause;   // X_t
    EmbeddingMatrix effect;  // Y_{t+1}
};

// Rows at equal positions are the paired (X_t, Y_{t+1}) for anchor times
// t = L .. N-2, so both matrices have N - L - 1 rows of width L + 1.
EmbeddingPair build_pair(const Vector& x, const Vector& y, int lag);
EmbeddingPair build_pair(const TimeSeries& x, const TimeSeries& y, int lag);

// Delay vectors (v[t], ..., v[t-L]) for t in [first, last].
EmbeddingMatrix delay_embed(const Vector& v, int lag, Eigen::Index first, Eigen::Index last, int shift = 0);

// Minimum length accepted by build_pair.
constexpr Eigen::Index min_pair_length(int lag) { return lag + 3; }

}  // namespace intdc
