#pragma once

// Score-vs-MOS manifests, batch evaluation and report I/O.
//
// Manifest formats:
//   CSV: header "path,mos", then one "<path>,<mos>" per row (LF or CRLF).
//        The mos is taken after the last comma, so paths may contain commas.
//   TID: "<mos> <filename>" per non-blank line (mos_with_names.txt layout).
//
// Reports:
//   CSV:  "path,mos,nrmi,error" rows followed by "# key=value" summary lines.
//   JSON: {"dataset", "n_scored", "n_failed", "srcc", "plcc", "diagnostic",
//          "tied_scores", "tied_mos", "records": [{"path","mos","nrmi","error"}]}
//         with null for absent values.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "nrmi/codec.hpp"
#include "nrmi/errors.hpp"
#include "nrmi/format.hpp"
#include "nrmi/metric.hpp"
#include "nrmi/stats.hpp"

namespace nrmi {

struct ManifestRecord {
  std::string path;                // as written in the manifest
  double mos = 0.0;
  std::filesystem::path resolved;  // path joined onto the manifest's directory

  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

struct ReportRecord {
  std::string path;
  double mos = 0.0;
  std::optional<double> nrmi;
  std::string error;  // empty when scored

  friend bool operator==(const ReportRecord&, const ReportRecord&) = default;
};

struct EvaluationReport {
  std::string dataset_name;
  std::size_t n_scored = 0;
  std::size_t n_failed = 0;
  std::optional<double> srcc;
  std::optional<double> plcc;
  std::string diagnostic;       // why correlations are absent, if they are
  std::size_t tied_scores = 0;  // scored records whose nrmi equals another's
  std::size_t tied_mos = 0;
  std::vector<ReportRecord> records;

  bool has_correlations() const noexcept { return srcc.has_value() && plcc.has_value(); }
  friend bool operator==(const EvaluationReport&, const EvaluationReport&) = default;
};

enum class ReportFormat { kCsv, kJson };

namespace detail {

inline std::vector<std::string> read_lines(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw IoError("cannot read manifest " + file.string());
  if (!lines.empty() && lines.front().starts_with("\xEF\xBB\xBF")) lines.front().erase(0, 3);
  return lines;
}

inline bool is_blank(std::string_view s) { return s.find_first_not_of(" \t") == std::string_view::npos; }

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_finite(std::string_view s) {
  auto v = parse_double(s);
  if (v && !std::isfinite(*v)) return std::nullopt;
  return v;
}

inline std::size_t count_tied(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::size_t tied = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    if (j - i > 1) tied += j - i;
    i = j;
  }
  return tied;
}

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace detail

inline std::vector<ManifestRecord> load_csv_manifest(const std::filesystem::path& file) {
  const auto lines = detail::read_lines(file);
  if (lines.empty()) throw FormatError("manifest is empty, expected header \"path,mos\"", 1);
  if (detail::trim(lines.front()) != "path,mos") throw FormatError("expected header \"path,mos\"", 1);
  const auto base = file.parent_path();
  std::vector<ManifestRecord> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::string_view line = lines[i];
    if (detail::is_blank(line)) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string_view::npos) throw FormatError("expected \"<path>,<mos>\"", i + 1);
    const auto path = detail::trim(line.substr(0, comma));
    if (path.empty()) throw FormatError("empty path", i + 1);
    const auto mos = detail::parse_finite(line.substr(comma + 1));
    if (!mos) throw FormatError("unparseable mos '" + std::string(line.substr(comma + 1)) + "'", i + 1);
    out.push_back({std::string(path), *mos, base / std::filesystem::path(std::string(path))});
  }
  return out;
}

inline std::vector<ManifestRecord> load_tid_manifest(const std::filesystem::path& file) {
  const auto lines = detail::read_lines(file);
  const auto base = file.parent_path();
  std::vector<ManifestRecord> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::is_blank(lines[i])) continue;
    std::istringstream tokens(lines[i]);
    std::string mos_text;
    std::string name;
    std::string extra;
    tokens >> mos_text >> name;
    if (name.empty() || (tokens >> extra)) throw FormatError("expected \"<mos> <filename>\"", i + 1);
    const auto mos = detail::parse_finite(mos_text);
    if (!mos) throw FormatError("unparseable mos '" + mos_text + "'", i + 1);
    out.push_back({name, *mos, base / name});
  }
  return out;
}

inline void write_csv_manifest(std::span<const ManifestRecord> records, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + file.string() + " for writing");
  out << "path,mos\n";
  for (const auto& r : records) out << r.path << ',' << format_double(r.mos) << '\n';
  if (!out) throw IoError("cannot write " + file.string());
}

inline void write_tid_manifest(std::span<const ManifestRecord> records, const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + file.string() + " for writing");
  for (const auto& r : records) out << format_double(r.mos) << ' ' << r.path << '\n';
  if (!out) throw IoError("cannot write " + file.string());
}

/// Scores every manifest image and correlates nrmi with mos over the successes.
/// Relative paths are joined onto `root` when it is non-empty, otherwise the
/// manifest-relative resolution from the loader is used.
inline EvaluationReport evaluate_dataset(std::span<const ManifestRecord> manifest, const std::filesystem::path& root,
                                         const NrmiConfig& cfg = {}, std::string dataset_name = {}) {
  EvaluationReport report;
  report.dataset_name = std::move(dataset_name);
  report.records.reserve(manifest.size());
  std::vector<double> scores;
  std::vector<double> mos;
  for (const auto& row : manifest) {
    ReportRecord rec{row.path, row.mos, std::nullopt, {}};
    std::filesystem::path file = row.path;
    if (!root.empty() && file.is_relative()) {
      file = root / file;
    } else if (!row.resolved.empty()) {
      file = row.resolved;
    }
    try {
      const auto q = score_image(load_image(file), cfg, row.path);
      rec.nrmi = q.nrmi;
      scores.push_back(q.nrmi);
      mos.push_back(row.mos);
    } catch (const std::exception& e) {
      rec.error = e.what();
      if (rec.error.empty()) rec.error = "unknown error";
    }
    (rec.nrmi ? report.n_scored : report.n_failed) += 1;
    report.records.push_back(std::move(rec));
  }
  report.tied_scores = detail::count_tied(scores);
  report.tied_mos = detail::count_tied(mos);

  if (scores.size() < 3) {
    report.diagnostic = "insufficient data: " + std::to_string(scores.size()) +
                        " scored image(s), correlations need at least 3";
    return report;
  }
  try {
    const PairedSamples pairs(std::move(scores), std::move(mos));
    report.srcc = spearman(pairs);
    report.plcc = pearson(pairs);
  } catch (const DegenerateVarianceError& e) {
    report.srcc.reset();
    report.plcc.reset();
    report.diagnostic = std::string("insufficient data: ") + e.what();
  }
  return report;
}

inline nlohmann::json to_json(const QualityRecord& q) {
  return {{"source", q.source},
          {"m_rmi", q.m_rmi},
          {"weight", q.weight},
          {"nrmi", q.nrmi},
          {"original_rows", q.original_rows},
          {"original_cols", q.original_cols},
          {"effective_rows", q.effective_rows},
          {"effective_cols", q.effective_cols},
          {"regularized", q.regularized}};
}

inline QualityRecord quality_record_from_json(const nlohmann::json& j) {
  try {
    QualityRecord q;
    q.source = j.at("source").get<std::string>();
    q.m_rmi = j.at("m_rmi").get<double>();
    q.weight = j.at("weight").get<double>();
    q.nrmi = j.at("nrmi").get<double>();
    q.original_rows = j.at("original_rows").get<std::size_t>();
    q.original_cols = j.at("original_cols").get<std::size_t>();
    q.effective_rows = j.at("effective_rows").get<std::size_t>();
    q.effective_cols = j.at("effective_cols").get<std::size_t>();
    q.regularized = j.at("regularized").get<bool>();
    return q;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid quality record: ") + e.what(), 0);
  }
}

inline nlohmann::json to_json(const EvaluationReport& r) {
  const auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json records = nlohmann::json::array();
  for (const auto& rec : r.records) {
    records.push_back({{"path", rec.path},
                       {"mos", rec.mos},
                       {"nrmi", opt(rec.nrmi)},
                       {"error", rec.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(rec.error)}});
  }
  return {{"dataset", r.dataset_name},
          {"n_scored", r.n_scored},
          {"n_failed", r.n_failed},
          {"srcc", opt(r.srcc)},
          {"plcc", opt(r.plcc)},
          {"diagnostic", r.diagnostic.empty() ? nlohmann::json(nullptr) : nlohmann::json(r.diagnostic)},
          {"tied_scores", r.tied_scores},
          {"tied_mos", r.tied_mos},
          {"records", std::move(records)}};
}

inline EvaluationReport report_from_json(const nlohmann::json& j) {
  const auto opt = [](const nlohmann::json& v) {
    return v.is_null() ? std::optional<double>{} : std::optional<double>{v.get<double>()};
  };
  const auto str = [](const nlohmann::json& v) { return v.is_null() ? std::string{} : v.get<std::string>(); };
  try {
    EvaluationReport r;
    r.dataset_name = j.at("dataset").get<std::string>();
    r.n_scored = j.at("n_scored").get<std::size_t>();
    r.n_failed = j.at("n_failed").get<std::size_t>();
    r.srcc = opt(j.at("srcc"));
    r.plcc = opt(j.at("plcc"));
    r.diagnostic = str(j.at("diagnostic"));
    r.tied_scores = j.at("tied_scores").get<std::size_t>();
    r.tied_mos = j.at("tied_mos").get<std::size_t>();
    for (const auto& rec : j.at("records")) {
      r.records.push_back({rec.at("path").get<std::string>(), rec.at("mos").get<double>(), opt(rec.at("nrmi")),
                           str(rec.at("error"))});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid report: ") + e.what(), 0);
  }
}

inline std::string report_to_csv(const EvaluationReport& r) {
  const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string("na"); };
  std::ostringstream out;
  out << "path,mos,nrmi,error\n";
  for (const auto& rec : r.records) {
    out << detail::csv_field(rec.path) << ',' << format_double(rec.mos) << ','
        << (rec.nrmi ? format_double(*rec.nrmi) : std::string()) << ',' << detail::csv_field(rec.error) << '\n';
  }
  out << "# dataset=" << r.dataset_name << '\n'
      << "# n_scored=" << r.n_scored << '\n'
      << "# n_failed=" << r.n_failed << '\n'
      << "# srcc=" << opt(r.srcc) << '\n'
      << "# plcc=" << opt(r.plcc) << '\n'
      << "# tied_scores=" << r.tied_scores << '\n'
      << "# tied_mos=" << r.tied_mos << '\n';
  if (!r.diagnostic.empty()) out << "# diagnostic=" << r.diagnostic << '\n';
  return out.str();
}

inline void write_report(const EvaluationReport& r, ReportFormat format, const std::filesystem::path& out_path) {
  const std::string text = format == ReportFormat::kCsv ? report_to_csv(r) : to_json(r).dump(2) + "\n";
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open report " + out_path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write report " + out_path.string());
}

inline EvaluationReport read_json_report(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open report " + file.string());
  const auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw FormatError("report " + file.string() + " is not valid JSON", 0);
  return report_from_json(j);
}

}  // namespace nrmi
