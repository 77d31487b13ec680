#include "hydrate/error.hpp"

namespace hydrate {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::malformed_csv: return "malformed_csv";
    case ErrorKind::non_monotone_timestamp: return "non_monotone_timestamp";
    case ErrorKind::label_conflict: return "label_conflict";
    case ErrorKind::missing_label: return "missing_label";
    case ErrorKind::empty_data: return "empty_data";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::missing_variable: return "missing_variable";
    case ErrorKind::degenerate_split: return "degenerate_split";
    case ErrorKind::width_mismatch: return "width_mismatch";
    case ErrorKind::non_finite: return "non_finite";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::unsupported_format: return "unsupported_format";
  }
  return "unknown";
}

namespace {

std::string decorate(const std::string& message, const std::optional<std::size_t>& row,
                     const std::optional<std::string>& column) {
  std::string out = message;
  if (row || column) {
    out += " (";
    if (row) out += "row " + std::to_string(*row);
    if (row && column) out += ", ";
    if (column) out += "column '" + *column + "'";
    out += ")";
  }
  return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> row,
             std::optional<std::string> column)
    : std::runtime_error(decorate(message, row, column)),
      kind_(kind),
      row_(row),
      column_(std::move(column)) {}

}  // namespace hydrate
