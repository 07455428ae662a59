#include "tradegame/report_io.hpp"

#include "tradegame/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>

namespace tradegame {

void CsvTable::add_row(std::vector<std::string> row) {
    if (row.size() != header.size())
        throw Error(ErrorCode::Internal, "csv row width " + std::to_string(row.size()) + " != header width " +
                                             std::to_string(header.size()) + " in table " + name);
    rows.push_back(std::move(row));
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) return "0";  // folds -0
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value);
    return {buf, res.ptr};
}

std::string csv_escape(const std::string& cell) {
    if (cell.find_first_of(",\"\n\r") == std::string::npos) return cell;
    std::string out = "\"";
    for (char ch : cell) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::string to_csv(const CsvTable& table) {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k) out += ',';
            out += csv_escape(cells[k]);
        }
        out += '\n';
    };
    line(table.header);
    for (const auto& row : table.rows) line(row);
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::ConfigInvalid, "cannot open " + tmp.string() + " for writing");
        out << contents;
        out.flush();
        if (!out) throw Error(ErrorCode::ConfigInvalid, "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error(ErrorCode::ConfigInvalid, "cannot rename onto " + path.string() + ": " + ec.message());
    }
}

}  // namespace tradegame
