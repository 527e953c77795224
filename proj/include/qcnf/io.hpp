#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace qcnf {

inline constexpr int kSchemaVersion = 1;

// Shortest decimal that round-trips to the same double.
std::string fmt_num(double x);

// Minimal CSV table: header plus rows of preformatted cells.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);
    void add_row(std::vector<std::string> cells);
    void add_numeric_row(const std::vector<double>& values);
    std::string str() const;
    void write(const std::filesystem::path& path) const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace qcnf
