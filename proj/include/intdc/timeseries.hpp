#pragma once

#include "intdc/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace intdc {

struct TimeSeries {
    std::string id;
    Vector values;
    std::optional<double> sample_period;

    TimeSeries() = default;
    TimeSeries(std::string id_, Vector values_, std::optional<double> period = std::nullopt)
        : id(std::move(id_)), values(std::move(values_)), sample_period(period) {}

    Eigen::Index size() const { return values.size(); }
};

struct Dataset {
    std::vector<TimeSeries> series;
    // n x n, row = cause, column = effect, zero diagonal.
    std::optional<Matrix> ground_truth;

    std::size_t size() const { return series.size(); }
    Eigen::Index length() const { return series.empty() ? 0 : series.front().size(); }
    std::vector<std::string> labels() const;

    // Throws DataError when lengths differ, values are non-finite or the
    // ground truth has the wrong shape or a nonzero diagonal.
    void validate() const;

    // Columns are series.
    Matrix as_matrix() const;
};

}  // namespace intdc
