#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "supernova/analysis.hpp"
#include "supernova/errors.hpp"

namespace supernova::report {

// Fixed 9-digit decimal formatting keeps report bytes reproducible.
inline std::string fmt9(double x) {
  if (x == 0.0) x = 0.0;  // canonicalize -0
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9f", x);
  return buf;
}

inline std::string fmt2(double x) {
  if (x == 0.0) x = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

inline std::string json_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline const char* palette(size_t i) {
  static const char* colors[] = {"#4C78A8", "#F58518", "#54A24B", "#E45756",
                                 "#72B7B2", "#EECA3B", "#B279A2", "#9D755D"};
  return colors[i % 8];
}

// report.json: stable key order, models in the given order, 9-digit reals.
inline std::string render_report_json(const std::vector<analysis::ModelProfile>& profiles,
                                      const analysis::SimilarityMatrix& matrix) {
  std::string j;
  j += "{\n  \"models\": [\n";
  for (size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    j += "    {\n      \"id\": \"" + json_escape(p.model_id) + "\",\n";
    j += "      \"category_counts\": {";
    bool first = true;
    for (auto c : judge::kCanonicalCategories) {
      if (!first) j += ", ";
      first = false;
      j += "\"" + std::string(judge::json_key(c)) + "\": " +
           std::to_string(p.categories.counts.at(c));
    }
    j += "},\n      \"category_distribution\": {";
    first = true;
    for (auto c : judge::kCanonicalCategories) {
      if (!first) j += ", ";
      first = false;
      j += "\"" + std::string(judge::json_key(c)) + "\": " + fmt9(p.categories.distribution.at(c));
    }
    j += "},\n      \"coordinates_2d\": [" + fmt9(p.coordinates_2d.first) + ", " +
         fmt9(p.coordinates_2d.second) + "],\n";
    j += "      \"codebook_counts\": {";
    first = true;
    for (auto c : {judge::CodebookCategory::causality, judge::CodebookCategory::enablement,
                   judge::CodebookCategory::synthesis}) {
      if (!first) j += ", ";
      first = false;
      int64_t n = 0;
      if (auto it = p.codebook_counts.find(c); it != p.codebook_counts.end()) n = it->second;
      j += "\"" + std::string(judge::to_string(c)) + "\": " + std::to_string(n);
    }
    j += "}\n    }";
    j += (i + 1 < profiles.size()) ? ",\n" : "\n";
  }
  j += "  ],\n  \"similarity\": {\n    \"ids\": [";
  for (size_t i = 0; i < matrix.model_ids.size(); ++i) {
    if (i) j += ", ";
    j += "\"" + json_escape(matrix.model_ids[i]) + "\"";
  }
  j += "],\n    \"matrix\": [\n";
  for (size_t i = 0; i < matrix.values.size(); ++i) {
    j += "      [";
    for (size_t k = 0; k < matrix.values[i].size(); ++k) {
      if (k) j += ", ";
      j += fmt9(matrix.values[i][k]);
    }
    j += "]";
    j += (i + 1 < matrix.values.size()) ? ",\n" : "\n";
  }
  j += "    ]\n  }\n}\n";
  return j;
}

// Radar chart: one polygon per model over the seven category axes, axes in
// canonical order, values are normalized frequencies.
inline std::string render_radar_svg(const std::vector<analysis::ModelProfile>& profiles) {
  const double cx = 300, cy = 310, r = 200;
  const size_t axes = judge::kCanonicalCategories.size();
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"640\" "
       "viewBox=\"0 0 600 640\">\n";
  s += "<rect width=\"600\" height=\"640\" fill=\"white\"/>\n";
  s += "<text x=\"300\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">Personality category distribution</text>\n";
  auto angle = [&](size_t k) { return -M_PI / 2.0 + 2.0 * M_PI * double(k) / double(axes); };
  for (double ring : {0.25, 0.5, 0.75, 1.0}) {
    s += "<polygon fill=\"none\" stroke=\"#DDDDDD\" points=\"";
    for (size_t k = 0; k < axes; ++k) {
      s += fmt2(cx + r * ring * std::cos(angle(k))) + "," +
           fmt2(cy + r * ring * std::sin(angle(k))) + " ";
    }
    s += "\"/>\n";
  }
  for (size_t k = 0; k < axes; ++k) {
    double ax = cx + r * std::cos(angle(k)), ay = cy + r * std::sin(angle(k));
    s += "<line x1=\"" + fmt2(cx) + "\" y1=\"" + fmt2(cy) + "\" x2=\"" + fmt2(ax) +
         "\" y2=\"" + fmt2(ay) + "\" stroke=\"#BBBBBB\"/>\n";
    double lx = cx + (r + 24) * std::cos(angle(k)), ly = cy + (r + 24) * std::sin(angle(k));
    s += "<text x=\"" + fmt2(lx) + "\" y=\"" + fmt2(ly) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         xml_escape(judge::display_name(judge::kCanonicalCategories[k])) + "</text>\n";
  }
  for (size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    s += "<polygon fill=\"";
    s += palette(i);
    s += "\" fill-opacity=\"0.15\" stroke=\"";
    s += palette(i);
    s += "\" stroke-width=\"2\" points=\"";
    for (size_t k = 0; k < axes; ++k) {
      double value = p.categories.distribution.at(judge::kCanonicalCategories[k]);
      s += fmt2(cx + r * value * std::cos(angle(k))) + "," +
           fmt2(cy + r * value * std::sin(angle(k))) + " ";
    }
    s += "\"/>\n";
  }
  for (size_t i = 0; i < profiles.size(); ++i) {
    double ly = 560 + 18.0 * double(i);
    s += "<rect x=\"24\" y=\"" + fmt2(ly - 10) + "\" width=\"12\" height=\"12\" fill=\"";
    s += palette(i);
    s += "\"/>\n<text x=\"42\" y=\"" + fmt2(ly) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" + xml_escape(profiles[i].model_id) +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

// 2D scatter of the PCA coordinates with model labels; optional faint
// background dots show individual trait embeddings in the same plane.
inline std::string render_semantic_space_svg(
    const std::vector<analysis::ModelProfile>& profiles,
    const std::vector<std::pair<double, double>>& background = {}) {
  const double w = 600, h = 600, pad = 70;
  double min_x = 0, max_x = 0, min_y = 0, max_y = 0;
  for (const auto& p : profiles) {
    min_x = std::min(min_x, p.coordinates_2d.first);
    max_x = std::max(max_x, p.coordinates_2d.first);
    min_y = std::min(min_y, p.coordinates_2d.second);
    max_y = std::max(max_y, p.coordinates_2d.second);
  }
  for (const auto& [x, y] : background) {
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  }
  double span_x = std::max(max_x - min_x, 1e-9);
  double span_y = std::max(max_y - min_y, 1e-9);
  auto sx = [&](double x) { return pad + (x - min_x) / span_x * (w - 2 * pad); };
  auto sy = [&](double y) { return h - pad - (y - min_y) / span_y * (h - 2 * pad); };
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\" "
       "viewBox=\"0 0 600 600\">\n";
  s += "<rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
  s += "<text x=\"300\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">Model semantic space</text>\n";
  s += "<line x1=\"" + fmt2(pad) + "\" y1=\"" + fmt2(h - pad) + "\" x2=\"" + fmt2(w - pad) +
       "\" y2=\"" + fmt2(h - pad) + "\" stroke=\"#888888\"/>\n";
  s += "<line x1=\"" + fmt2(pad) + "\" y1=\"" + fmt2(pad) + "\" x2=\"" + fmt2(pad) + "\" y2=\"" +
       fmt2(h - pad) + "\" stroke=\"#888888\"/>\n";
  s += "<text x=\"300\" y=\"580\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"12\">PC1</text>\n";
  s += "<text x=\"22\" y=\"300\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"12\" transform=\"rotate(-90 22 300)\">PC2</text>\n";
  for (const auto& [bx, by] : background) {
    s += "<circle cx=\"" + fmt2(sx(bx)) + "\" cy=\"" + fmt2(sy(by)) +
         "\" r=\"3\" fill=\"#999999\" fill-opacity=\"0.45\"/>\n";
  }
  for (size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    double x = sx(p.coordinates_2d.first), y = sy(p.coordinates_2d.second);
    s += "<circle cx=\"" + fmt2(x) + "\" cy=\"" + fmt2(y) + "\" r=\"7\" fill=\"";
    s += palette(i);
    s += "\"/>\n<text x=\"" + fmt2(x) + "\" y=\"" + fmt2(y - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         xml_escape(p.model_id) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

// Grouped bars: causality / enablement / synthesis counts per model.
inline std::string render_codebook_svg(const std::vector<analysis::ModelProfile>& profiles) {
  const double w = 600, h = 420, pad = 60;
  int64_t max_count = 1;
  for (const auto& p : profiles)
    for (const auto& [cat, n] : p.codebook_counts) max_count = std::max(max_count, n);
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"420\" "
       "viewBox=\"0 0 600 420\">\n";
  s += "<rect width=\"600\" height=\"420\" fill=\"white\"/>\n";
  s += "<text x=\"300\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"16\">Reasoning profile codebook counts</text>\n";
  static const char* cat_colors[3] = {"#4C78A8", "#F58518", "#54A24B"};
  const judge::CodebookCategory cats[3] = {judge::CodebookCategory::causality,
                                           judge::CodebookCategory::enablement,
                                           judge::CodebookCategory::synthesis};
  const double group_w = (w - 2 * pad) / std::max<size_t>(profiles.size(), 1);
  const double bar_w = group_w / 4.0;
  for (size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    double gx = pad + group_w * double(i);
    for (int c = 0; c < 3; ++c) {
      int64_t n = 0;
      if (auto it = p.codebook_counts.find(cats[c]); it != p.codebook_counts.end()) n = it->second;
      double bh = (h - 2 * pad) * double(n) / double(max_count);
      double bx = gx + bar_w * (0.5 + double(c));
      s += "<rect x=\"" + fmt2(bx) + "\" y=\"" + fmt2(h - pad - bh) + "\" width=\"" +
           fmt2(bar_w * 0.9) + "\" height=\"" + fmt2(bh) + "\" fill=\"";
      s += cat_colors[c];
      s += "\"/>\n";
    }
    s += "<text x=\"" + fmt2(gx + group_w / 2) + "\" y=\"" + fmt2(h - pad + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         xml_escape(p.model_id) + "</text>\n";
  }
  for (int c = 0; c < 3; ++c) {
    double lx = pad + 140.0 * c;
    s += "<rect x=\"" + fmt2(lx) + "\" y=\"" + fmt2(h - 22) +
         "\" width=\"12\" height=\"12\" fill=\"";
    s += cat_colors[c];
    s += "\"/>\n<text x=\"" + fmt2(lx + 18) + "\" y=\"" + fmt2(h - 11) +
         "\" font-family=\"sans-serif\" font-size=\"12\">" + judge::to_string(cats[c]) +
         "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

struct ReportFiles {
  std::filesystem::path report_json;
  std::filesystem::path radar_svg;
  std::filesystem::path semantic_svg;
  std::filesystem::path codebook_svg;
};

inline void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("short write to " + path.string());
}

inline ReportFiles emit_report(const std::vector<analysis::ModelProfile>& profiles,
                               const analysis::SimilarityMatrix& matrix,
                               const std::filesystem::path& out_dir,
                               const std::vector<std::pair<double, double>>& background = {}) {
  if (profiles.empty()) throw PreconditionError("emit_report: no profiles");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (!std::filesystem::is_directory(out_dir))
    throw ConfigError("report directory not writable: " + out_dir.string());
  ReportFiles files{out_dir / "report.json", out_dir / "radar.svg",
                    out_dir / "semantic_space.svg", out_dir / "codebook.svg"};
  write_file(files.report_json, render_report_json(profiles, matrix));
  write_file(files.radar_svg, render_radar_svg(profiles));
  write_file(files.semantic_svg, render_semantic_space_svg(profiles, background));
  write_file(files.codebook_svg, render_codebook_svg(profiles));
  return files;
}

}  // namespace supernova::report
