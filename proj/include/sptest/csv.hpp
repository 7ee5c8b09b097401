#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sptest {

/// Header plus string cells; conversion happens in the panel loader.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] std::optional<std::size_t> column_index(std::string_view name) const;
};

/// Comma-separated, optional double-quoted fields, first line is the header.
[[nodiscard]] CsvTable parse_csv(std::istream& in);
[[nodiscard]] CsvTable read_csv(const std::string& path);

/// Strict decimal parse ('.' separator); empty or "NA"-like cells yield nullopt.
[[nodiscard]] std::optional<double> parse_number(std::string_view cell);

}  // namespace sptest
