#pragma once

#include "intdc/timeseries.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace intdc {

enum class Layout { columns_are_series, rows_are_series };

Layout parse_layout(const std::string& name);

// Comma-delimited numeric text. With `header` the first row holds series
// labels (column layout) or each row starts with its label (row layout).
Dataset load_csv(const std::filesystem::path& path, Layout layout, bool header);
Dataset parse_csv(const std::string& text, Layout layout, bool header,
                  const std::string& source = "<memory>");

// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

// Writes columns = series with a header row. Values use format_number, so
// load_csv reads them back bit-identically.
void write_csv(const std::filesystem::path& path, const Dataset& data);
std::string format_csv(const Dataset& data);

// Plain numeric matrices (ground truth, flows, distances). No header.
Matrix load_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

}  // namespace intdc
