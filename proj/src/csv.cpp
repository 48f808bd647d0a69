#include "ria/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ria/error.hpp"

namespace ria {

std::string format_number(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    while (!f.empty() && std::isspace(static_cast<unsigned char>(f.front())))
      f.erase(f.begin());
    while (!f.empty() && std::isspace(static_cast<unsigned char>(f.back())))
      f.pop_back();
  }
  return fields;
}

// Howard Hinnant's days-from-civil; no time zones, proleptic Gregorian.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy =
      (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
      static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 +
         static_cast<std::int64_t>(doe) - 719468;
}

bool parse_timestamp(const std::string& s, std::int64_t& minutes) {
  // Plain integer: epoch minutes.
  if (!s.empty() &&
      s.find_first_not_of("0123456789-") == std::string::npos &&
      s.find('-', 1) == std::string::npos) {
    try {
      minutes = std::stoll(s);
      return true;
    } catch (...) {
      return false;
    }
  }
  // ISO-8601: YYYY-MM-DD[T ]HH:MM[:SS]
  int y, mo, d, h, mi, sec = 0;
  char sep;
  if (std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi,
                  &sec) >= 6 &&
      (sep == 'T' || sep == ' ')) {
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 ||
        mi > 59)
      return false;
    minutes = days_from_civil(y, mo, d) * 1440 + h * 60 + mi;
    return true;
  }
  return false;
}

}  // namespace

PriceSeries read_price_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);

  PriceSeries series;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected 2 columns (timestamp,price), found " +
                      std::to_string(fields.size()));
    if (line_no == 1 && fields[0] == "timestamp") continue;  // header

    std::int64_t ts;
    if (!parse_timestamp(fields[0], ts))
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": unparseable timestamp '" + fields[0] + "'");
    double price;
    try {
      price = std::stod(fields[1]);
    } catch (...) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": unparseable price '" + fields[1] + "'");
    }
    if (!std::isfinite(price) || price <= 0.0)
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": invalid price '" + fields[1] + "'");
    if (!series.timestamps.empty() && ts <= series.timestamps.back())
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": timestamps must be strictly increasing");
    series.timestamps.push_back(ts);
    series.prices.push_back(price);
    series.session_ids.push_back(static_cast<std::int32_t>(
        ts >= 0 ? ts / 1440 : (ts - 1439) / 1440));  // floor division
  }
  if (series.size() == 0) throw DataError(path + ": no data rows");
  return series;
}

void write_table(const std::string& path, const Table& table) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (std::size_t c = 0; c < table.columns.size(); ++c)
    out << (c ? "," : "") << table.columns[c];
  out << "\n";
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.data.size(); ++c)
      out << (c ? "," : "") << format_number(table.data[c][r]);
    out << "\n";
  }
  if (!out) throw DataError("write failed for " + path);
}

Table read_table(const std::string& path,
                 const std::vector<std::string>& expected_columns) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  const auto header = split_csv_line(line);
  if (header != expected_columns) {
    std::ostringstream msg;
    msg << path << ": schema mismatch; expected columns [";
    for (std::size_t i = 0; i < expected_columns.size(); ++i)
      msg << (i ? "," : "") << expected_columns[i];
    msg << "], found [";
    for (std::size_t i = 0; i < header.size(); ++i)
      msg << (i ? "," : "") << header[i];
    msg << "]";
    throw DataError(msg.str());
  }

  Table table;
  table.columns = header;
  table.data.resize(header.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": wrong field count");
    for (std::size_t c = 0; c < fields.size(); ++c) {
      try {
        table.data[c].push_back(std::stod(fields[c]));
      } catch (...) {
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": unparseable number '" + fields[c] + "'");
      }
    }
  }
  return table;
}

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(h));
  return out;
}

}  // namespace ria
