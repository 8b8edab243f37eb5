#include "dicke/csv.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "dicke/errors.hpp"

namespace dicke {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const Metadata& metadata,
                     const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    os_.open(path, std::ios::binary | std::ios::trunc);
    if (!os_) throw ConfigError("cannot open " + path.string() + " for writing");
    os_ << '#';
    for (std::size_t i = 0; i < metadata.size(); ++i) {
        os_ << (i ? "," : " ") << metadata[i].first << '=' << csv_escape(metadata[i].second);
    }
    os_ << "\r\n";
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << csv_escape(header[i]);
    os_ << "\r\n";
}

CsvWriter& CsvWriter::cell(const std::string& s) {
    if (in_row_ >= columns_) throw std::logic_error("CsvWriter: too many cells in row of " + path_.string());
    os_ << (in_row_++ ? "," : "") << csv_escape(s);
    return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_number(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
    if (in_row_ != columns_) throw std::logic_error("CsvWriter: short row in " + path_.string());
    os_ << "\r\n";
    in_row_ = 0;
    if (!os_) throw std::runtime_error("write failed for " + path_.string());
}

}  // namespace dicke
