#include "cpsep/report.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace cpsep {
namespace {

nlohmann::json cell_to_json(const ExperimentReport::Cell& c) {
  return std::visit(
      [](const auto& v) -> nlohmann::json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else {
          return v;
        }
      },
      c);
}

// Single rendering path for numbers so CSV and JSON emissions carry the
// same decimal text (nlohmann prints round-trip-exact doubles).
std::string cell_to_text(const ExperimentReport::Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return "";
  if (const double* v = std::get_if<double>(&c); v && !std::isfinite(*v)) return "";
  if (const std::string* s = std::get_if<std::string>(&c)) return *s;
  return cell_to_json(c).dump();
}

}  // namespace

void ExperimentReport::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) {
    throw std::invalid_argument("ExperimentReport: row width does not match columns");
  }
  rows_.push_back(std::move(row));
}

const ExperimentReport::Cell& ExperimentReport::cell(std::size_t row,
                                                     const std::string& column) const {
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (columns_[c] == column) return rows_.at(row).at(c);
  }
  throw std::invalid_argument("ExperimentReport: unknown column " + column);
}

double ExperimentReport::number(std::size_t row, const std::string& column) const {
  const Cell& c = cell(row, column);
  if (const double* v = std::get_if<double>(&c)) return *v;
  if (const std::int64_t* v = std::get_if<std::int64_t>(&c)) return static_cast<double>(*v);
  throw std::invalid_argument("ExperimentReport: column " + column + " is not numeric");
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["schema"] = "1";
  j["version"] = kArtifactVersion;
  j["command"] = command_;
  j["config"] = config_;
  j["columns"] = columns_;
  auto rows = nlohmann::json::array();
  for (const auto& r : rows_) {
    auto row = nlohmann::json::array();
    for (const auto& c : r) row.push_back(cell_to_json(c));
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  j["notes"] = notes_;
  j["streams_consumed"] = streams_consumed_;
  return j;
}

std::string ExperimentReport::to_csv() const {
  std::string out;
  out += "# schema=1 version=";
  out += kArtifactVersion;
  out += " command=";
  out += command_;
  out += '\n';
  out += "# config=";
  out += config_.dump();
  out += '\n';
  for (const auto& note : notes_) {
    out += "# note: ";
    out += note;
    out += '\n';
  }
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    if (c) out += ',';
    out += columns_[c];
  }
  out += '\n';
  for (const auto& r : rows_) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out += ',';
      out += cell_to_text(r[c]);
    }
    out += '\n';
  }
  return out;
}

void ExperimentReport::write(const std::filesystem::path& path, const std::string& format) const {
  std::string fmt = format;
  if (fmt == "auto") {
    fmt = path.extension() == ".csv" ? "csv" : "json";
  }
  if (fmt != "csv" && fmt != "json") {
    throw std::invalid_argument("ExperimentReport: unknown format " + fmt);
  }
  const std::string body = fmt == "csv" ? to_csv() : to_json().dump(2) + "\n";

  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("ExperimentReport: cannot open " + tmp.string());
    out << body;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace cpsep
