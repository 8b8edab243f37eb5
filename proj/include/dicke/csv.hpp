#pragma once

// RFC-4180 CSV output with one leading '#' metadata line.

#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace dicke {

// Shortest round-trip text form; identical input gives identical bytes.
std::string format_number(double v);

std::string csv_escape(const std::string& field);

class CsvWriter {
public:
    using Metadata = std::vector<std::pair<std::string, std::string>>;

    CsvWriter(const std::filesystem::path& path, const Metadata& metadata, const std::vector<std::string>& header);

    CsvWriter& cell(const std::string& s);
    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
    void end_row();

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream os_;
    std::size_t columns_;
    std::size_t in_row_{0};
};

}  // namespace dicke
