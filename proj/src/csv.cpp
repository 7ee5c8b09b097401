#include "sptest/csv.hpp"

#include "sptest/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>

namespace sptest {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string> split_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.emplace_back(trim(cell));
            cell.clear();
        } else {
            cell.push_back(c);
        }
    }
    if (quoted) {
        throw Error(ErrorKind::ParseError,
                    "unterminated quote on line " + std::to_string(line_no));
    }
    cells.emplace_back(trim(cell));
    return cells;
}

}  // namespace

std::optional<std::size_t> CsvTable::column_index(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable parse_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);  // UTF-8 BOM
        }
        if (trim(line).empty()) continue;
        auto cells = split_line(line, line_no);
        if (!have_header) {
            table.header = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw Error(ErrorKind::ParseError,
                        "line " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " fields, header has " +
                            std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    if (!have_header) throw Error(ErrorKind::ParseError, "empty CSV input");
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ParseError, "cannot open data file: " + path);
    return parse_csv(in);
}

std::optional<double> parse_number(std::string_view cell) {
    cell = trim(cell);
    if (cell.empty()) return std::nullopt;
    if (cell.front() == '+') cell.remove_prefix(1);
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (ec != std::errc{} || ptr != end) return std::nullopt;
    return value;
}

}  // namespace sptest
