#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ria/series.hpp"

namespace ria {

// 12 significant digits; fixed across platforms for golden-file stability.
std::string format_number(double v);

// Reads `timestamp,price` (header optional). Timestamps are epoch minutes or
// ISO-8601 (YYYY-MM-DD HH:MM[:SS]); the session is the calendar date.
PriceSeries read_price_csv(const std::string& path);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // column-major

  std::size_t rows() const { return data.empty() ? 0 : data[0].size(); }
};

void write_table(const std::string& path, const Table& table);

// Reads a CSV and checks the header matches; mismatch raises a DataError
// naming expected vs found columns.
Table read_table(const std::string& path,
                 const std::vector<std::string>& expected_columns);

// FNV-1a 64-bit checksum of a file's bytes, as fixed-width hex.
std::string file_checksum(const std::string& path);

}  // namespace ria
