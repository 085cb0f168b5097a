#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stochgrad/simulator.hpp"

namespace stochgrad::cli {

/// Shortest round-trip decimal form; identical bytes for identical doubles.
std::string format_double(double v);

/// RFC 4180 style table: comma separated, quoted only when needed, '\n' rows.
class CsvTable {
 public:
  explicit CsvTable(std::initializer_list<std::string_view> header);

  CsvTable& cell(std::string_view s);
  CsvTable& cell(const char* s) { return cell(std::string_view(s)); }
  CsvTable& cell(double v);
  CsvTable& cell(std::size_t v);
  void end_row();

  std::size_t rows() const noexcept { return rows_; }
  const std::string& text() const noexcept { return text_; }
  void save(const std::filesystem::path& path) const;

 private:
  void put(std::string_view field);

  std::string text_;
  std::size_t columns_ = 0;
  std::size_t in_row_ = 0;
  std::size_t rows_ = 0;
};

/// Git blob id of `content`: sha1("blob <size>\0" + content), hex encoded.
std::string git_blob_hash(std::string_view content);

void write_text(const std::filesystem::path& path, std::string_view content);

nlohmann::json to_json(const SimConfig& c);
nlohmann::json to_json(const DetectorParams& p);

/// Hits, tracks and summary of one simulated event.
nlohmann::json event_to_json(const Event& event, const std::vector<Track>& tracks, const SimConfig& config);

}  // namespace stochgrad::cli
