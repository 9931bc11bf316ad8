#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace cpsep {

inline constexpr const char* kArtifactVersion = "0.1.0";

// One experiment run: config echo, column schema and metric rows. Metric
// records are deterministic under a fixed config, so a rerun emits the
// same bytes; wall-clock timing therefore stays out of the report body.
class ExperimentReport {
 public:
  /// Empty cell renders as JSON null / empty CSV field.
  using Cell = std::variant<std::monostate, std::int64_t, double, bool, std::string>;

  ExperimentReport(std::string command, nlohmann::json config,
                   std::vector<std::string> columns)
      : command_(std::move(command)),
        config_(std::move(config)),
        columns_(std::move(columns)) {}

  void add_row(std::vector<Cell> row);
  void add_note(std::string note) { notes_.push_back(std::move(note)); }
  void set_streams_consumed(std::uint64_t n) { streams_consumed_ = n; }

  const std::string& command() const { return command_; }
  const nlohmann::json& config() const { return config_; }
  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  const std::vector<std::string>& notes() const { return notes_; }
  std::uint64_t streams_consumed() const { return streams_consumed_; }

  /// Cell by column name for the given row; throws if the column is unknown.
  const Cell& cell(std::size_t row, const std::string& column) const;
  double number(std::size_t row, const std::string& column) const;

  nlohmann::json to_json() const;
  std::string to_csv() const;

  /// Writes atomically (temp file in the target directory, then rename).
  /// Format "json" or "csv"; "auto" picks by extension, defaulting to json.
  void write(const std::filesystem::path& path, const std::string& format = "auto") const;

 private:
  std::string command_;
  nlohmann::json config_;
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::string> notes_;
  std::uint64_t streams_consumed_ = 0;
};

}  // namespace cpsep
