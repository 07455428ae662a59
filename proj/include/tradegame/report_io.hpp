#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace tradegame {

/// A flat table with a fixed header; cells are preformatted strings.
struct CsvTable {
    std::string name;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

/// Shortest round-trip decimal form ('.' separator, locale independent).
std::string format_number(double value);

/// RFC 4180 quoting where needed; CRLF-free, '\n' line ends.
std::string to_csv(const CsvTable& table);
std::string csv_escape(const std::string& cell);

/// Writes `contents` to a sibling temporary file, then renames over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace tradegame
