#include "bores/csv.hpp"

#include "bores/errors.hpp"

#include <cmath>
#include <cstdio>

namespace bores {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::string schema, std::vector<std::string> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {}

void CsvTable::add_row(const std::vector<double>& values) {
    if (values.size() != columns_.size()) throw parameter_error("CsvTable: row width does not match the header");
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += format_double(values[i]);
    }
    rows_.push_back(std::move(line));
}

std::string CsvTable::str() const {
    std::string out = "# " + schema_ + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (i) out += ',';
        out += columns_[i];
    }
    out += '\n';
    for (const auto& r : rows_) {
        out += r;
        out += '\n';
    }
    return out;
}

} // namespace bores
