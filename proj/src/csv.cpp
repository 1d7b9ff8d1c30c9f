#include "qbattery/csv.hpp"

#include <charconv>
#include <stdexcept>

namespace qbattery {

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc())
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), n_cols_(header.size()) {
    if (header.empty()) throw std::invalid_argument("CsvWriter: empty header");
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out_ << ',';
        out_ << header[i];
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
    if (cells.size() != n_cols_)
        throw std::invalid_argument("CsvWriter: row width does not match header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        std::visit(
            [this](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, double>)
                    out_ << format_double(v);
                else if constexpr (std::is_same_v<T, long long>)
                    out_ << v;
                else
                    out_ << v;
            },
            cells[i]);
    }
    out_ << '\n';
    ++rows_;
    if (!out_) throw std::runtime_error("CsvWriter: write failed for " + path_.string());
}

void CsvWriter::close() {
    if (out_.is_open()) {
        out_.close();
        if (!out_) throw std::runtime_error("CsvWriter: close failed for " + path_.string());
    }
}

}  // namespace qbattery
