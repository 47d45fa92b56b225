#pragma once

#include "intdc/timeseries.hpp"

#include <functional>
#include <vector>

namespace intdc {

using PairIndex = std::function<double(const Vector& cause, const Vector& effect)>;

// Evaluates index(series i, series j) for every ordered pair i != j of every
// part and averages over parts. Pairs run in parallel on `jobs` threads;
// failures are rethrown with the pair labels attached.
CausalMatrix pairwise_matrix(const std::vector<Dataset>& parts, const PairIndex& index, int jobs);

}  // namespace intdc
