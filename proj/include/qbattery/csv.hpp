#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "qbattery/types.hpp"

namespace qbattery {

using CsvCell = std::variant<double, long long, std::string>;

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);

/// Streaming CSV writer: UTF-8, comma separated, header row, deterministic
/// byte output for identical inputs.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

    void row(const std::vector<CsvCell>& cells);
    void close();

    const std::filesystem::path& path() const { return path_; }
    long long rows_written() const { return rows_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t n_cols_;
    long long rows_ = 0;
};

}  // namespace qbattery
