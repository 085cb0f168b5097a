#include "stochgrad/cli/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <stdexcept>

#include <openssl/sha.h>

namespace stochgrad::cli {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (res.ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), res.ptr);
}

CsvTable::CsvTable(std::initializer_list<std::string_view> header) : columns_(header.size()) {
  for (auto h : header) put(h);
  in_row_ = columns_;
  text_ += '\n';
  in_row_ = 0;
}

void CsvTable::put(std::string_view field) {
  if (in_row_ > 0) text_ += ',';
  ++in_row_;
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    text_ += field;
    return;
  }
  text_ += '"';
  for (char c : field) {
    if (c == '"') text_ += '"';
    text_ += c;
  }
  text_ += '"';
}

CsvTable& CsvTable::cell(std::string_view s) {
  put(s);
  return *this;
}

CsvTable& CsvTable::cell(double v) {
  put(format_double(v));
  return *this;
}

CsvTable& CsvTable::cell(std::size_t v) {
  put(std::to_string(v));
  return *this;
}

void CsvTable::end_row() {
  if (in_row_ != columns_) {
    throw std::logic_error("csv row has " + std::to_string(in_row_) + " cells, expected " + std::to_string(columns_));
  }
  text_ += '\n';
  in_row_ = 0;
  ++rows_;
}

void CsvTable::save(const std::filesystem::path& path) const { write_text(path, text_); }

std::string git_blob_hash(std::string_view content) {
  std::string blob = "blob " + std::to_string(content.size());
  blob.push_back('\0');
  blob.append(content);
  std::array<unsigned char, SHA_DIGEST_LENGTH> digest{};
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest.data());
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  for (unsigned char b : digest) {
    hex += kHex[b >> 4];
    hex += kHex[b & 0xf];
  }
  return hex;
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

nlohmann::json to_json(const SimConfig& c) {
  nlohmann::json j;
  j["mode"] = to_string(c.mode);
  j["step_size"] = c.step_size;
  j["e_init"] = c.e_init;
  j["e_threshold"] = c.e_threshold;
  j["eloss"] = c.eloss;
  j["opening_angle"] = c.opening_angle;
  j["target_radius"] = c.target_radius;
  j["max_steps"] = c.max_steps;
  j["world_radius"] = c.world_radius;
  j["start_pos"] = {c.start_pos.x0, c.start_pos.x1};
  j["fixed_direction"] = c.fixed_direction ? nlohmann::json(*c.fixed_direction) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const DetectorParams& p) {
  return {{"theta_R", p.theta_R.value},
          {"theta_R_tangent", p.theta_R.tangent},
          {"sharpness", p.sharpness},
          {"seg_freq", p.seg_freq},
          {"r_max", p.r_max}};
}

nlohmann::json event_to_json(const Event& event, const std::vector<Track>& tracks, const SimConfig& config) {
  nlohmann::json hits = nlohmann::json::array();
  for (const Hit& h : event.hits) hits.push_back({{"x0", h.pos.x0}, {"x1", h.pos.x1}, {"r", h.r}, {"step", h.step_index}});
  nlohmann::json tj = nlohmann::json::array();
  for (const Track& t : tracks) {
    nlohmann::json pts = nlohmann::json::array();
    for (const Vec2& p : t.points) pts.push_back({p.x0, p.x1});
    tj.push_back({{"id", t.id}, {"parent", t.parent}, {"points", std::move(pts)}});
  }
  return {{"hits", std::move(hits)},
          {"tracks", std::move(tj)},
          {"loss", loss(event, config)},
          {"no_hit", event.no_hit()},
          {"n_steps", event.n_steps},
          {"draws", event.draws},
          {"score_tangent", event.score_tangent},
          {"terminated_by", to_string(event.terminated_by)}};
}

}  // namespace stochgrad::cli
