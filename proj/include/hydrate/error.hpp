#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace hydrate {

enum class ErrorKind {
  io,
  malformed_csv,
  non_monotone_timestamp,
  label_conflict,
  missing_label,
  empty_data,
  invalid_argument,
  missing_variable,
  degenerate_split,
  width_mismatch,
  non_finite,
  insufficient_data,
  unsupported_format,
};

const char* to_string(ErrorKind kind) noexcept;

/// Error raised by every fallible operation in the library. Carries the
/// offending data row (1-based, counting the header as row 1) and column
/// name when the failure can be pinned to a cell.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> row = std::nullopt,
        std::optional<std::string> column = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  const std::optional<std::size_t>& row() const noexcept { return row_; }
  const std::optional<std::string>& column() const noexcept { return column_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> row_;
  std::optional<std::string> column_;
};

}  // namespace hydrate
