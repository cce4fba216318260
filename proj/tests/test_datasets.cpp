#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "nrmi/datasets.hpp"
#include "nrmi/distort.hpp"

namespace nrmi {
namespace {

using testing::ScratchDir;

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

void write_pgm(const std::filesystem::path& p, const GrayImage& img) { write_file_bytes(p, encode_pgm(img)); }

TEST(LoadCsvManifest, ParsesRowsAndResolvesPaths) {
  ScratchDir dir("csv");
  write_text(dir / "m.csv", "path,mos\r\na.png,4.5\r\nsub/b.png,2.0\r\n\r\n");
  const auto rows = load_csv_manifest(dir / "m.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].path, "a.png");
  EXPECT_EQ(rows[0].mos, 4.5);
  EXPECT_EQ(rows[0].resolved, dir.path() / "a.png");
  EXPECT_EQ(rows[1].path, "sub/b.png");
  EXPECT_EQ(rows[1].mos, 2.0);
}

TEST(LoadCsvManifest, EmptyFileHasNoHeader) {
  ScratchDir dir("csv");
  write_text(dir / "m.csv", "");
  try {
    load_csv_manifest(dir / "m.csv");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(LoadCsvManifest, BadMosReportsLine) {
  ScratchDir dir("csv");
  write_text(dir / "m.csv", "path,mos\na.png,abc\n");
  try {
    load_csv_manifest(dir / "m.csv");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(LoadCsvManifest, WrongHeaderAndMissingFile) {
  ScratchDir dir("csv");
  write_text(dir / "m.csv", "file,score\na.png,1\n");
  EXPECT_THROW(load_csv_manifest(dir / "m.csv"), FormatError);
  EXPECT_THROW(load_csv_manifest(dir / "missing.csv"), IoError);
}

TEST(LoadTidManifest, ParsesAndSkipsBlankLines) {
  ScratchDir dir("tid");
  write_text(dir / "mos.txt", "5.51 i01_01_1.bmp\n\n  4.0\ti01_01_2.bmp  \n");
  const auto rows = load_tid_manifest(dir / "mos.txt");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].path, "i01_01_1.bmp");
  EXPECT_EQ(rows[0].mos, 5.51);
  EXPECT_EQ(rows[1].path, "i01_01_2.bmp");
  EXPECT_EQ(rows[1].mos, 4.0);
}

TEST(LoadTidManifest, SwappedColumns) {
  ScratchDir dir("tid");
  write_text(dir / "mos.txt", "5.1 a.bmp\ni01.bmp 5.5\n");
  try {
    load_tid_manifest(dir / "mos.txt");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Manifests, WriteThenLoadReproducesRecords) {
  ScratchDir dir("roundtrip");
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> mos(0.0, 9.0);
  std::vector<ManifestRecord> records;
  for (int i = 0; i < 25; ++i) {
    const std::string name = "img_" + std::to_string(i) + ".png";
    records.push_back({name, mos(rng), dir.path() / name});
  }
  write_csv_manifest(records, dir / "m.csv");
  write_tid_manifest(records, dir / "mos.txt");
  EXPECT_EQ(load_csv_manifest(dir / "m.csv"), records);
  EXPECT_EQ(load_tid_manifest(dir / "mos.txt"), records);
}

class LadderDataset : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto img = testing::rings_image(60, 60);
    const std::vector<double> sigmas = {4, 12, 36};
    const auto ladder = distortion_ladder(img, DistortionKind::kGaussianNoise, sigmas, 2024);
    const std::vector<double> mos = {5, 3, 1};
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      const std::string name = "ladder_" + std::to_string(i) + ".pgm";
      write_pgm(dir / name, ladder[i]);
      manifest.push_back({name, mos[i], dir / name});
      scores.push_back(score_image(decode_image(read_file_bytes(dir / name))).nrmi);
    }
  }

  ScratchDir dir{"ladder"};
  std::vector<ManifestRecord> manifest;
  std::vector<double> scores;
};

TEST_F(LadderDataset, MonotoneLadderGivesPerfectRankCorrelation) {
  // the precondition: nrmi strictly monotone in noise on this ladder
  ASSERT_TRUE((scores[0] > scores[1] && scores[1] > scores[2]) || (scores[0] < scores[1] && scores[1] < scores[2]));
  const auto report = evaluate_dataset(manifest, {});
  EXPECT_EQ(report.n_scored, 3u);
  EXPECT_EQ(report.n_failed, 0u);
  ASSERT_TRUE(report.has_correlations());
  EXPECT_EQ(std::abs(*report.srcc), 1.0);
  EXPECT_EQ(*report.plcc, pearson(PairedSamples(scores, {5, 3, 1})));
}

TEST_F(LadderDataset, MissingFileIsCollected) {
  manifest.push_back({"nope.pgm", 2.0, dir / "nope.pgm"});
  const auto report = evaluate_dataset(manifest, {});
  EXPECT_EQ(report.n_scored, 3u);
  EXPECT_EQ(report.n_failed, 1u);
  EXPECT_EQ(report.records.size(), 4u);
  EXPECT_FALSE(report.records[3].error.empty());
  EXPECT_FALSE(report.records[3].nrmi.has_value());
  EXPECT_TRUE(report.has_correlations());
}

TEST_F(LadderDataset, RootOverridesManifestDirectory) {
  std::vector<ManifestRecord> relative;
  for (auto r : manifest) relative.push_back({r.path, r.mos, "/does/not/exist/" + r.path});
  EXPECT_EQ(evaluate_dataset(relative, {}).n_failed, 3u);
  EXPECT_EQ(evaluate_dataset(relative, dir.path()).n_scored, 3u);
}

TEST_F(LadderDataset, PermutationInvariant) {
  const auto base = evaluate_dataset(manifest, {});
  std::vector<ManifestRecord> perm = manifest;
  std::reverse(perm.begin(), perm.end());
  const auto other = evaluate_dataset(perm, {});
  EXPECT_NEAR(*other.srcc, *base.srcc, 1e-12);
  EXPECT_NEAR(*other.plcc, *base.plcc, 1e-12);
}

TEST(EvaluateDataset, EmptyManifestIsInsufficient) {
  const auto report = evaluate_dataset(std::vector<ManifestRecord>{}, {});
  EXPECT_EQ(report.n_scored + report.n_failed, 0u);
  EXPECT_FALSE(report.has_correlations());
  EXPECT_NE(report.diagnostic.find("insufficient"), std::string::npos);
}

TEST(EvaluateDataset, UnsupportedContainerIsPerRecordFailure) {
  ScratchDir dir("bmp");
  write_text(dir / "a.bmp", "BM not really a bitmap");
  const std::vector<ManifestRecord> m = {{"a.bmp", 1.0, dir / "a.bmp"}};
  const auto report = evaluate_dataset(m, {});
  EXPECT_EQ(report.n_failed, 1u);
  EXPECT_NE(report.records[0].error.find("unrecognized"), std::string::npos);
}

TEST(EvaluateDataset, TiesAreCountedAndTolerated) {
  ScratchDir dir("ties");
  std::vector<ManifestRecord> m;
  const std::vector<double> mos = {3, 3, 1, 5};
  for (int i = 0; i < 4; ++i) {
    const std::string name = std::to_string(i) + ".pgm";
    write_pgm(dir / name, testing::rings_image(30 + 3 * i, 30));
    m.push_back({name, mos[i], dir / name});
  }
  const auto report = evaluate_dataset(m, {});
  EXPECT_TRUE(report.has_correlations());
  EXPECT_EQ(report.tied_mos, 2u);
}

EvaluationReport sample_report() {
  EvaluationReport r;
  r.dataset_name = "toy";
  r.n_scored = 2;
  r.n_failed = 1;
  r.diagnostic = "insufficient data: 2 scored image(s), correlations need at least 3";
  r.records = {{"a.png", 4.5, 12.25, ""}, {"b,c.png", 2.0, 0.1 + 0.2, ""}, {"d.pgm", 1.0, std::nullopt, "boom \"x\""}};
  return r;
}

TEST(WriteReport, CsvLayout) {
  ScratchDir dir("report");
  write_report(sample_report(), ReportFormat::kCsv, dir / "r.csv");
  std::ifstream in(dir / "r.csv");
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  ASSERT_GE(lines.size(), 4u);
  EXPECT_EQ(lines[0], "path,mos,nrmi,error");
  EXPECT_EQ(lines[1], "a.png,4.5,12.25,");
  EXPECT_EQ(lines[2], "\"b,c.png\",2,0.30000000000000004,");
  EXPECT_EQ(lines[3], "d.pgm,1,,\"boom \"\"x\"\"\"");
  for (std::size_t i = 4; i < lines.size(); ++i) EXPECT_EQ(lines[i].front(), '#');
  EXPECT_NE(std::find(lines.begin(), lines.end(), "# srcc=na"), lines.end());
}

TEST(WriteReport, JsonRoundTrip) {
  ScratchDir dir("report");
  auto r = sample_report();
  write_report(r, ReportFormat::kJson, dir / "r.json");
  EXPECT_EQ(read_json_report(dir / "r.json"), r);
  r.srcc = -0.123456789012345678;
  r.plcc = 0.987654321;
  r.diagnostic.clear();
  write_report(r, ReportFormat::kJson, dir / "r2.json");
  EXPECT_EQ(read_json_report(dir / "r2.json"), r);
}

TEST(WriteReport, UnwritablePath) {
  EXPECT_THROW(write_report(sample_report(), ReportFormat::kCsv, "/nonexistent/dir/r.csv"), IoError);
}

TEST(QualityRecordJson, RoundTrip) {
  const auto q = score_image(testing::texture_image(20, 22), {}, "tex");
  EXPECT_EQ(quality_record_from_json(nlohmann::json::parse(to_json(q).dump())), q);
}

}  // namespace
}  // namespace nrmi
