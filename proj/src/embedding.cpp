#include "intdc/embedding.hpp"

#include <string>

namespace intdc {

EmbeddingMatrix delay_embed(const Vector& v, int lag, Eigen::Index first, Eigen::Index last, int shift) {
    if (lag < 0) throw UsageError("lag must be non-negative");
    if (first - lag + shift < 0 || last + shift >= v.size() || first > last)
        throw UsageError("delay embedding range is out of bounds");
    EmbeddingMatrix e;
    e.lag = lag;
    const Eigen::Index rows = last - first + 1;
    e.points.resize(rows, lag + 1);
    e.time_labels.resize(static_cast<std::size_t>(rows));
    for (Eigen::Index m = 0; m < rows; ++m) {
        const Eigen::Index t = first + m;
        e.time_labels[static_cast<std::size_t>(m)] = t;
        for (int c = 0; c <= lag; ++c) e.points(m, c) = v[t + shift - c];
    }
    return e;
}

EmbeddingPair build_pair(const Vector& x, const Vector& y, int lag) {
    if (lag < 1) throw UsageError("lag must be >= 1");
    if (x.size() != y.size()) throw UsageError("cause and effect series differ in length");
    const Eigen::Index n = x.size();
    if (n < min_pair_length(lag))
        throw UsageError("series length " + std::to_string(n) + " is too short for lag " + std::to_string(lag) +
                         " (need at least " + std::to_string(min_pair_length(lag)) + ")");
    return {delay_embed(x, lag, lag, n - 2, 0), delay_embed(y, lag, lag, n - 2, 1)};
}

EmbeddingPair build_pair(const TimeSeries& x, const TimeSeries& y, int lag) {
    return build_pair(x.values, y.values, lag);
}

}  // namespace intdc
