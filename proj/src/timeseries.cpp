#include "intdc/timeseries.hpp"

#include <cmath>
#include <sstream>

namespace intdc {

std::vector<std::string> Dataset::labels() const {
    std::vector<std::string> out;
    out.reserve(series.size());
    for (const auto& s : series) out.push_back(s.id);
    return out;
}

void Dataset::validate() const {
    if (series.empty()) throw DataError("dataset has no series");
    const auto n = series.front().size();
    if (n == 0) throw DataError("series '" + series.front().id + "' is empty");
    for (const auto& s : series) {
        if (s.size() != n) {
            std::ostringstream msg;
            msg << "series '" << s.id << "' has length " << s.size() << ", expected " << n;
            throw DataError(msg.str());
        }
        for (Eigen::Index t = 0; t < s.size(); ++t) {
            if (!std::isfinite(s.values[t])) {
                std::ostringstream msg;
                msg << "series '" << s.id << "' has a non-finite value at index " << t;
                throw DataError(msg.str());
            }
        }
    }
    if (ground_truth) {
        const auto k = static_cast<Eigen::Index>(series.size());
        if (ground_truth->rows() != k || ground_truth->cols() != k) {
            std::ostringstream msg;
            msg << "ground truth is " << ground_truth->rows() << "x" << ground_truth->cols()
                << ", expected " << k << "x" << k;
            throw DataError(msg.str());
        }
        for (Eigen::Index i = 0; i < k; ++i)
            if ((*ground_truth)(i, i) != 0.0)
                throw DataError("ground truth has a nonzero diagonal entry at " + std::to_string(i));
    }
}

Matrix Dataset::as_matrix() const {
    Matrix m(length(), static_cast<Eigen::Index>(series.size()));
    for (std::size_t j = 0; j < series.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = series[j].values;
    return m;
}

}  // namespace intdc
