#pragma once

// nrmi command line: score | batch | eval | distort.
//
// Exit codes: 0 success, 1 partial failure in batch/eval (or too few scored
// images for correlations), 2 usage error, 3 fatal I/O or decode error.
// Data goes to `out`, diagnostics to `err`.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nrmi/nrmi.hpp"

namespace nrmi::cli {

enum ExitCode : int { kOk = 0, kPartial = 1, kUsage = 2, kFatal = 3 };

namespace detail {

struct MetricFlags {
  std::size_t radius = 1;
  double eps_eig = kDefaultEpsEig;
  std::string centering = "per-dimension";

  void attach(CLI::App* cmd) {
    cmd->add_option("--r", radius, "Block radius; blocks are (2r+1)x(2r+1)")->capture_default_str();
    cmd->add_option("--eps-eig", eps_eig, "Eigenvalue floor for log-determinants")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--centering", centering, "Sample centering mode")
        ->capture_default_str()
        ->check(CLI::IsMember({"per-dimension", "grand-mean"}));
  }

  NrmiConfig config() const {
    return NrmiConfig{radius, eps_eig,
                      centering == "grand-mean" ? CenteringMode::kGrandMean : CenteringMode::kPerDimension};
  }
};

struct ManifestFlags {
  std::string manifest;
  std::string root;
  bool tid_format = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--manifest", manifest, "Manifest file (CSV \"path,mos\" unless --tid-format)")->required();
    cmd->add_option("--root", root, "Image directory (default: the manifest's directory)");
    cmd->add_flag("--tid-format", tid_format, "Manifest uses \"<mos> <filename>\" lines");
  }

  std::vector<ManifestRecord> load() const {
    return tid_format ? load_tid_manifest(manifest) : load_csv_manifest(manifest);
  }
};

inline ReportFormat parse_format(const std::string& name) { return name == "json" ? ReportFormat::kJson : ReportFormat::kCsv; }

inline int fail(std::ostream& err, int code, const std::string& message) {
  err << "nrmi: " << message << '\n';
  return code;
}

/// Maps manifest-loading errors onto exit codes.
template <typename Fn>
int with_manifest(std::ostream& err, const ManifestFlags& flags, Fn&& fn) {
  std::vector<ManifestRecord> manifest;
  try {
    manifest = flags.load();
  } catch (const FormatError& e) {
    return fail(err, kUsage, flags.manifest + ": " + e.what());
  } catch (const IoError& e) {
    return fail(err, kFatal, e.what());
  }
  return fn(manifest);
}

inline std::string score_line(const QualityRecord& q) {
  return "nrmi=" + format_double(q.nrmi) + " m_rmi=" + format_double(q.m_rmi) + " weight=" + format_double(q.weight);
}

inline std::string level_label(double level) { return format_double(level); }

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"No-reference image quality scoring by regional mutual information", "nrmi"};
  app.require_subcommand(1);

  // score
  auto* score = app.add_subcommand("score", "Score one image");
  std::string score_path;
  bool score_json = false;
  detail::MetricFlags score_metric;
  score->add_option("image", score_path, "PGM or PNG file")->required();
  score->add_flag("--json", score_json, "Emit a JSON quality record");
  score_metric.attach(score);

  // batch
  auto* batch = app.add_subcommand("batch", "Score every image in a manifest and write a report");
  detail::ManifestFlags batch_manifest;
  detail::MetricFlags batch_metric;
  std::string batch_out;
  std::string batch_format = "csv";
  batch_manifest.attach(batch);
  batch_metric.attach(batch);
  batch->add_option("--out", batch_out, "Report path")->required();
  batch->add_option("--format", batch_format, "Report format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));

  // eval
  auto* eval = app.add_subcommand("eval", "Correlate scores with mean opinion scores (SRCC, PLCC)");
  detail::ManifestFlags eval_manifest;
  detail::MetricFlags eval_metric;
  std::string eval_out;
  std::string eval_format = "json";
  std::string eval_name;
  eval_manifest.attach(eval);
  eval_metric.attach(eval);
  eval->add_option("--out", eval_out, "Optional report path");
  eval->add_option("--format", eval_format, "Report format")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  eval->add_option("--name", eval_name, "Dataset name recorded in the report");

  // distort
  auto* distort = app.add_subcommand("distort", "Write a ladder of distorted copies of an image");
  std::string distort_input;
  std::string distort_kind;
  std::vector<double> distort_levels;
  std::uint64_t distort_seed = 0;
  std::string distort_out_dir;
  distort->add_option("input", distort_input, "PGM or PNG file")->required();
  distort->add_option("--kind", distort_kind, "gaussian-noise | box-blur | blockiness")->required();
  distort->add_option("--levels", distort_levels, "Strictly increasing levels, comma separated")
      ->required()
      ->delimiter(',');
  distort->add_option("--seed", distort_seed, "Noise seed")->capture_default_str();
  distort->add_option("--out-dir", distort_out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "nrmi: " << e.what() << "\n" << "Run with --help for more information.\n";
    return kUsage;
  }

  try {
    if (score->parsed()) {
      GrayImage img;
      try {
        img = load_image(score_path);
      } catch (const Error& e) {
        return detail::fail(err, kFatal, score_path + ": " + e.what());
      }
      QualityRecord q;
      try {
        q = score_image(img, score_metric.config(), score_path);
      } catch (const ConfigError& e) {
        return detail::fail(err, kUsage, e.what());
      } catch (const Error& e) {
        return detail::fail(err, kFatal, score_path + ": " + e.what());
      }
      out << (score_json ? to_json(q).dump() : detail::score_line(q)) << '\n';
      return kOk;
    }

    if (batch->parsed()) {
      return detail::with_manifest(err, batch_manifest, [&](const std::vector<ManifestRecord>& manifest) -> int {
        const auto report = evaluate_dataset(manifest, batch_manifest.root, batch_metric.config(),
                                             std::filesystem::path(batch_manifest.manifest).stem().string());
        try {
          write_report(report, detail::parse_format(batch_format), batch_out);
        } catch (const IoError& e) {
          return detail::fail(err, kFatal, e.what());
        }
        for (const auto& rec : report.records) {
          if (!rec.error.empty()) err << "nrmi: " << rec.path << ": " << rec.error << '\n';
        }
        return report.n_failed == 0 ? kOk : kPartial;
      });
    }

    if (eval->parsed()) {
      return detail::with_manifest(err, eval_manifest, [&](const std::vector<ManifestRecord>& manifest) -> int {
        const std::string name =
            eval_name.empty() ? std::filesystem::path(eval_manifest.manifest).stem().string() : eval_name;
        const auto report = evaluate_dataset(manifest, eval_manifest.root, eval_metric.config(), name);
        if (!eval_out.empty()) {
          try {
            write_report(report, detail::parse_format(eval_format), eval_out);
          } catch (const IoError& e) {
            return detail::fail(err, kFatal, e.what());
          }
        }
        for (const auto& rec : report.records) {
          if (!rec.error.empty()) err << "nrmi: " << rec.path << ": " << rec.error << '\n';
        }
        if (!report.has_correlations()) return detail::fail(err, kPartial, report.diagnostic);
        out << "srcc=" << format_double(*report.srcc) << " plcc=" << format_double(*report.plcc)
            << " n=" << report.n_scored << '\n';
        return report.n_failed == 0 ? kOk : kPartial;
      });
    }

    if (distort->parsed()) {
      DistortionKind kind;
      try {
        kind = parse_distortion_kind(distort_kind);
      } catch (const ConfigError& e) {
        return detail::fail(err, kUsage, e.what());
      }
      GrayImage img;
      try {
        img = load_image(distort_input);
      } catch (const Error& e) {
        return detail::fail(err, kFatal, distort_input + ": " + e.what());
      }
      std::vector<GrayImage> ladder;
      try {
        ladder = distortion_ladder(img, kind, distort_levels, distort_seed);
      } catch (const ConfigError& e) {
        return detail::fail(err, kUsage, e.what());
      }
      const std::filesystem::path dir = distort_out_dir;
      std::error_code ec;
      std::filesystem::create_directories(dir, ec);
      if (ec) return detail::fail(err, kFatal, "cannot create " + dir.string() + ": " + ec.message());
      const std::string stem = std::filesystem::path(distort_input).stem().string();
      for (std::size_t i = 0; i < ladder.size(); ++i) {
        const auto file = dir / (stem + "_" + std::string(to_string(kind)) + "_" +
                                 detail::level_label(distort_levels[i]) + ".pgm");
        try {
          write_file_bytes(file, encode_pgm(ladder[i]));
        } catch (const IoError& e) {
          return detail::fail(err, kFatal, e.what());
        }
        out << file.string() << '\n';
      }
      return kOk;
    }
  } catch (const std::exception& e) {
    return detail::fail(err, kFatal, e.what());
  }
  return kUsage;
}

}  // namespace nrmi::cli
