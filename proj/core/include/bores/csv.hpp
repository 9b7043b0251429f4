/**
 * @file csv.hpp
 * @brief Fixed-column CSV output with round-trip floating point
 */

#pragma once

#include <initializer_list>
#include <string>
#include <vector>

namespace bores {

/// Prints with 17 significant digits so that values round-trip exactly.
std::string format_double(double v);

/// CSV table with a header line and a version comment.
class CsvTable {
public:
    CsvTable(std::string schema, std::vector<std::string> columns);

    void add_row(const std::vector<double>& values);
    std::string str() const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::string schema_;
    std::vector<std::string> columns_;
    std::vector<std::string> rows_;
};

} // namespace bores
