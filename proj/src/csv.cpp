#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "hydrate/dataset.hpp"

namespace hydrate {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_fields(const std::string& line, std::size_t row) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorKind::malformed_csv, "unterminated quoted field", row);
  fields.push_back(std::move(cur));
  return fields;
}

bool is_missing_token(std::string_view s) { return s.empty() || s == "NaN" || s == "nan"; }

bool parse_double(std::string_view s, double& out) {
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

bool looks_like_epoch(std::string_view s) {
  if (!s.empty() && s.front() == '-') s.remove_prefix(1);
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

int read_digits(std::string_view s, std::size_t pos, std::size_t count, bool& ok) {
  int v = 0;
  if (pos + count > s.size()) {
    ok = false;
    return 0;
  }
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (s[i] < '0' || s[i] > '9') {
      ok = false;
      return 0;
    }
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

Timestamp parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  const auto fail = [&]() -> Error {
    return Error(ErrorKind::malformed_csv, "unparseable timestamp '" + std::string(text) + "'");
  };
  std::string_view s = trim(text);
  bool ok = true;
  // YYYY-MM-DD[T ]HH:MM:SS[.f+][Z|+00:00]
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
      s[13] != ':' || s[16] != ':') {
    throw fail();
  }
  const int y = read_digits(s, 0, 4, ok);
  const int mo = read_digits(s, 5, 2, ok);
  const int d = read_digits(s, 8, 2, ok);
  const int h = read_digits(s, 11, 2, ok);
  const int mi = read_digits(s, 14, 2, ok);
  const int se = read_digits(s, 17, 2, ok);
  if (!ok || h > 23 || mi > 59 || se > 59) throw fail();
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) throw fail();

  std::size_t pos = 19;
  std::int64_t micros = 0;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      if (digits < 6) micros = micros * 10 + (s[pos] - '0');
      ++digits;
      ++pos;
    }
    if (digits == 0) throw fail();
    for (std::size_t i = digits; i < 6; ++i) micros *= 10;
  }
  std::string_view tz = s.substr(pos);
  if (!(tz.empty() || tz == "Z" || tz == "+00:00")) throw fail();

  const std::int64_t days_since = sys_days(ymd).time_since_epoch().count();
  return ((days_since * 86400 + h * 3600 + mi * 60 + se) * 1'000'000) + micros;
}

std::string format_iso8601(Timestamp ts) {
  using namespace std::chrono;
  const std::int64_t secs = floor_div(ts, 1'000'000);
  const std::int64_t micros = ts - secs * 1'000'000;
  const std::int64_t days_since = floor_div(secs, 86400);
  const std::int64_t sod = secs - days_since * 86400;
  const year_month_day ymd{sys_days{days{days_since}}};
  char buf[64];
  int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02u %02d:%02d:%02d", int(ymd.year()),
                        unsigned(ymd.month()), unsigned(ymd.day()), int(sod / 3600),
                        int(sod / 60 % 60), int(sod % 60));
  if (micros != 0) std::snprintf(buf + n, sizeof buf - n, ".%06lld", static_cast<long long>(micros));
  return buf;
}

TimeSeriesInstance load_instance_csv(std::istream& in, std::string id, const LoadOptions& options) {
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> header;
  bool have_header = false;

  std::vector<Timestamp> timestamps;
  std::vector<Channel> channels;
  bool has_class = false;
  std::optional<TimestampFormat> format;
  std::optional<ClassLabel> column_label;
  std::size_t column_label_row = 0;

  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (row == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;

    auto fields = split_fields(line, row);
    if (!have_header) {
      for (auto& f : fields) f = std::string(trim(f));
      if (fields.front() != "timestamp") {
        throw Error(ErrorKind::malformed_csv, "first column must be named 'timestamp'", row,
                    fields.front());
      }
      has_class = fields.size() > 1 && fields.back() == "class";
      const std::size_t n_channels = fields.size() - 1 - (has_class ? 1 : 0);
      if (n_channels == 0) {
        throw Error(ErrorKind::malformed_csv, "no channel columns in header", row);
      }
      std::unordered_set<std::string> seen;
      for (std::size_t c = 1; c <= n_channels; ++c) {
        if (fields[c].empty() || fields[c] == "timestamp" || fields[c] == "class" ||
            !seen.insert(fields[c]).second) {
          throw Error(ErrorKind::malformed_csv, "invalid or duplicate column name", row, fields[c]);
        }
        channels.push_back({fields[c], {}});
      }
      header = std::move(fields);
      have_header = true;
      continue;
    }

    if (fields.size() != header.size()) {
      throw Error(ErrorKind::malformed_csv,
                  "expected " + std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()),
                  row);
    }

    const std::string_view ts_text = trim(fields[0]);
    const TimestampFormat ts_format =
        looks_like_epoch(ts_text) ? TimestampFormat::epoch_seconds : TimestampFormat::iso8601;
    if (!format) format = ts_format;
    if (*format != ts_format) {
      throw Error(ErrorKind::malformed_csv, "timestamp format differs from earlier rows", row,
                  "timestamp");
    }
    Timestamp ts = 0;
    if (ts_format == TimestampFormat::epoch_seconds) {
      std::int64_t secs = 0;
      auto [ptr, ec] = std::from_chars(ts_text.data(), ts_text.data() + ts_text.size(), secs);
      if (ec != std::errc{} || ptr != ts_text.data() + ts_text.size()) {
        throw Error(ErrorKind::malformed_csv, "invalid epoch timestamp", row, "timestamp");
      }
      ts = secs * 1'000'000;
    } else {
      try {
        ts = parse_iso8601(ts_text);
      } catch (const Error& e) {
        throw Error(ErrorKind::malformed_csv, e.what(), row, "timestamp");
      }
    }
    if (!timestamps.empty() && ts < timestamps.back()) {
      throw Error(ErrorKind::non_monotone_timestamp, "timestamp earlier than previous row", row,
                  "timestamp");
    }
    timestamps.push_back(ts);

    for (std::size_t c = 0; c < channels.size(); ++c) {
      const std::string_view cell = trim(fields[c + 1]);
      double v = kMissing;
      if (!is_missing_token(cell)) {
        if (!parse_double(cell, v) || !std::isfinite(v)) {
          throw Error(ErrorKind::malformed_csv, "invalid numeric value '" + std::string(cell) + "'",
                      row, channels[c].name);
        }
      }
      channels[c].values.push_back(v);
    }

    if (has_class) {
      const std::string_view cell = trim(fields.back());
      if (is_missing_token(cell)) continue;
      double raw = 0.0;
      if (!parse_double(cell, raw) || raw != std::floor(raw)) {
        throw Error(ErrorKind::malformed_csv, "invalid class code '" + std::string(cell) + "'",
                    row, "class");
      }
      const auto code = static_cast<std::int64_t>(raw);
      std::optional<ClassLabel> mapped;
      if (options.label_map.empty()) {
        mapped = class_from_code(code);
        if (!mapped) {
          throw Error(ErrorKind::malformed_csv, "unknown class code " + std::to_string(code), row,
                      "class");
        }
      } else {
        auto it = options.label_map.find(code);
        if (it == options.label_map.end()) {
          throw Error(ErrorKind::malformed_csv, "class code " + std::to_string(code) +
                                                    " not present in label map",
                      row, "class");
        }
        mapped = it->second;
        if (!mapped) continue;
      }
      if (options.label && *mapped != *options.label) {
        throw Error(ErrorKind::label_conflict,
                    "class column says " + std::string(class_name(*mapped)) + " but label " +
                        std::string(class_name(*options.label)) + " was requested",
                    row, "class");
      }
      if (column_label && *column_label != *mapped) {
        throw Error(ErrorKind::label_conflict,
                    "class column changes from " + std::string(class_name(*column_label)) +
                        " (row " + std::to_string(column_label_row) + ") to " +
                        std::string(class_name(*mapped)),
                    row, "class");
      }
      if (!column_label) {
        column_label = mapped;
        column_label_row = row;
      }
    }
  }

  if (!have_header) throw Error(ErrorKind::empty_data, "missing header row in '" + id + "'");
  if (timestamps.empty()) throw Error(ErrorKind::empty_data, "no data rows in '" + id + "'");

  std::optional<ClassLabel> label = options.label ? options.label : column_label;
  if (!label) {
    throw Error(ErrorKind::missing_label,
                "no label argument and no usable class column in '" + id + "'");
  }
  return TimeSeriesInstance(std::move(id), *label, std::move(timestamps), *format,
                            std::move(channels));
}

TimeSeriesInstance load_instance_file(const std::filesystem::path& path, std::string id,
                                      const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
  try {
    return load_instance_csv(in, std::move(id), options);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what(), e.row(), e.column());
  }
}

void write_instance_csv(std::ostream& out, const TimeSeriesInstance& instance,
                        bool include_class) {
  out << "timestamp";
  for (const auto& ch : instance.channels()) out << ',' << ch.name;
  if (include_class) out << ",class";
  out << '\n';
  char buf[40];
  for (std::size_t t = 0; t < instance.length(); ++t) {
    const Timestamp ts = instance.timestamps()[t];
    if (instance.timestamp_format() == TimestampFormat::epoch_seconds) {
      out << floor_div(ts, 1'000'000);
    } else {
      out << format_iso8601(ts);
    }
    for (const auto& ch : instance.channels()) {
      out << ',';
      const double v = ch.values[t];
      if (!is_missing(v)) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
      }
    }
    if (include_class) out << ',' << class_code(instance.label());
    out << '\n';
  }
}

}  // namespace hydrate
