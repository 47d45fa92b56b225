#include "intdc/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace intdc {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            return cells;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

std::string where(const std::string& source, std::size_t line, std::size_t col) {
    std::ostringstream os;
    os << source << ": row " << line << ", column " << col;
    return os.str();
}

double parse_cell(std::string_view cell, const std::string& source, std::size_t line, std::size_t col) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (cell.empty() || ec != std::errc() || ptr != end)
        throw DataError(where(source, line, col) + ": not a number: '" + std::string(cell) + "'");
    if (!std::isfinite(value))
        throw DataError(where(source, line, col) + ": non-finite value '" + std::string(cell) + "'");
    return value;
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string_view>> rows;
    std::vector<std::size_t> line_numbers;
};

Table tokenize(const std::string& text, bool header) {
    Table table;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    bool header_done = !header;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string_view line(text.data() + pos, nl - pos);
        ++line_no;
        pos = nl + 1;
        if (trim(line).empty()) continue;
        auto cells = split(line);
        if (!header_done) {
            for (auto c : cells) table.header.emplace_back(c);
            header_done = true;
            continue;
        }
        table.rows.push_back(std::move(cells));
        table.line_numbers.push_back(line_no);
    }
    return table;
}

}  // namespace

Layout parse_layout(const std::string& name) {
    if (name == "columns" || name == "columns_are_series") return Layout::columns_are_series;
    if (name == "rows" || name == "rows_are_series") return Layout::rows_are_series;
    throw UsageError("unknown layout '" + name + "' (expected columns or rows)");
}

Dataset parse_csv(const std::string& text, Layout layout, bool header, const std::string& source) {
    const Table table = tokenize(text, header && layout == Layout::columns_are_series);
    if (table.rows.empty()) throw DataError(source + ": no data rows");

    Dataset data;
    if (layout == Layout::columns_are_series) {
        const std::size_t width = table.rows.front().size();
        if (header && table.header.size() != width)
            throw DataError(source + ": header has " + std::to_string(table.header.size()) +
                            " columns, data has " + std::to_string(width));
        const auto length = static_cast<Eigen::Index>(table.rows.size());
        data.series.resize(width);
        for (std::size_t c = 0; c < width; ++c) {
            data.series[c].id = header ? table.header[c] : "s" + std::to_string(c);
            data.series[c].values.resize(length);
        }
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& row = table.rows[r];
            if (row.size() != width)
                throw DataError(where(source, table.line_numbers[r], row.size()) + ": row has " +
                                std::to_string(row.size()) + " cells, expected " + std::to_string(width));
            for (std::size_t c = 0; c < width; ++c)
                data.series[c].values[static_cast<Eigen::Index>(r)] =
                    parse_cell(row[c], source, table.line_numbers[r], c + 1);
        }
    } else {
        const std::size_t skip = header ? 1 : 0;
        const std::size_t width = table.rows.front().size();
        if (width <= skip) throw DataError(source + ": rows hold no values");
        for (std::size_t r = 0; r < table.rows.size(); ++r) {
            const auto& row = table.rows[r];
            if (row.size() != width)
                throw DataError(where(source, table.line_numbers[r], row.size()) + ": row has " +
                                std::to_string(row.size()) + " cells, expected " + std::to_string(width));
            TimeSeries s;
            s.id = header ? std::string(row[0]) : "s" + std::to_string(r);
            s.values.resize(static_cast<Eigen::Index>(width - skip));
            for (std::size_t c = skip; c < width; ++c)
                s.values[static_cast<Eigen::Index>(c - skip)] = parse_cell(row[c], source, table.line_numbers[r], c + 1);
            data.series.push_back(std::move(s));
        }
    }
    data.validate();
    return data;
}

Dataset load_csv(const std::filesystem::path& path, Layout layout, bool header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.empty()) throw DataError(path.string() + ": empty file");
    return parse_csv(text, layout, header, path.string());
}

std::string format_number(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

namespace {

void put(std::ostream& os, double v) { os << format_number(v); }

}  // namespace

std::string format_csv(const Dataset& data) {
    std::ostringstream os;
    for (std::size_t j = 0; j < data.series.size(); ++j) os << (j ? "," : "") << data.series[j].id;
    os << '\n';
    for (Eigen::Index t = 0; t < data.length(); ++t) {
        for (std::size_t j = 0; j < data.series.size(); ++j) {
            if (j) os << ',';
            put(os, data.series[j].values[t]);
        }
        os << '\n';
    }
    return os.str();
}

void write_csv(const std::filesystem::path& path, const Dataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << format_csv(data);
}

Matrix load_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const Table table = tokenize(text, false);
    if (table.rows.empty()) throw DataError(path.string() + ": empty file");
    const std::size_t width = table.rows.front().size();
    Matrix m(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != width)
            throw DataError(where(path.string(), table.line_numbers[r], row.size()) + ": ragged row");
        for (std::size_t c = 0; c < width; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                parse_cell(row[c], path.string(), table.line_numbers[r], c + 1);
    }
    return m;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            put(out, m(i, j));
        }
        out << '\n';
    }
}

}  // namespace intdc
