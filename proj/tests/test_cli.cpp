#include <gtest/gtest.h>

#include <filesystem>
#include <regex>
#include <sstream>

#include "morphogrid/cli.hpp"
#include "morphogrid/io.hpp"
#include "xml_check.hpp"

namespace morphogrid {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("morphogrid_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string synthetic() {
    const CliResult r = run({"demo", "synthetic-vilmann", "--outdir", dir_.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    return path("synthetic-vilmann.json");
  }

  // Two specimens of k landmarks on a slightly irregular ring.
  std::string ring_file(int k) {
    std::ostringstream text;
    for (int s = 0; s < 2; ++s) {
      text << "LM=" << k << "\n";
      for (int i = 0; i < k; ++i) {
        const double a = 6.283185307179586 * i / k;
        const double r = 1.0 + 0.1 * ((i * 7) % 5) + 0.05 * s * i;
        text << r * std::cos(a) << " " << r * std::sin(a) * (1 + 0.2 * s) << "\n";
      }
      text << "ID=s" << s << "\n";
    }
    const std::string p = path("ring" + std::to_string(k) + ".tps");
    write_text_file(p, text.str());
    return p;
  }

  fs::path dir_;
};

std::string slurp(const std::string& p) { return read_text_file(p); }

TEST_F(CliTest, RotationsAtZeroThresholdListsEverySegment) {
  const std::string data = synthetic();
  const CliResult r = run({"rotations", data, "--threshold", "0", "--outdir", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# 28 of 28 segments"), std::string::npos) << r.out;
  const std::regex row("^[0-9]+-[0-9]+\t");
  std::istringstream lines(r.out);
  std::string line;
  int rows = 0;
  while (std::getline(lines, line)) rows += std::regex_search(line, row) ? 1 : 0;
  EXPECT_EQ(rows, 28);
  EXPECT_TRUE(oracle::xml_well_formed(slurp(path("rotations.svg"))));
}

TEST_F(CliTest, NonaffineRotationsWriteTheirOwnFigure) {
  const std::string data = synthetic();
  const CliResult r = run({"rotations", data, "--nonaffine", "--outdir", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("uniform component removed"), std::string::npos);
  EXPECT_TRUE(fs::exists(path("rotations_nonaffine.svg")));
}

TEST_F(CliTest, QuadraticFitOnFiveLandmarksNamesSix) {
  const CliResult r = run({"fit", ring_file(5), "--degree", "2", "--baseline", "1,2", "--outdir", dir_.string()});
  EXPECT_EQ(r.code, cli::kExitInputError);
  EXPECT_NE(r.err.find("6 landmarks"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

TEST_F(CliTest, CubicFitOnNineLandmarksNamesTen) {
  const CliResult r = run({"fit", ring_file(9), "--degree", "3", "--baseline", "1,2", "--outdir", dir_.string()});
  EXPECT_EQ(r.code, cli::kExitInputError);
  EXPECT_NE(r.err.find("10 landmarks"), std::string::npos) << r.err;
}

TEST_F(CliTest, FitIsByteDeterministic) {
  const std::string data = synthetic();
  fs::create_directories(path("a"));
  fs::create_directories(path("b"));
  const std::vector<std::string> flags{"--degree", "2", "--baseline", "3,8", "--extend", "left:2.0"};
  std::vector<std::string> a{"fit", data, "--outdir", path("a")};
  std::vector<std::string> b{"fit", data, "--outdir", path("b")};
  a.insert(a.end(), flags.begin(), flags.end());
  b.insert(b.end(), flags.begin(), flags.end());
  const CliResult ra = run(a);
  const CliResult rb = run(b);
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(rb.code, 0) << rb.err;
  EXPECT_EQ(ra.out, rb.out);
  EXPECT_EQ(slurp(path("a/fit_3-8.svg")), slurp(path("b/fit_3-8.svg")));
  EXPECT_EQ(slurp(path("a/fit_3-8.json")), slurp(path("b/fit_3-8.json")));
  EXPECT_TRUE(oracle::xml_well_formed(slurp(path("a/fit_3-8.svg"))));
}

TEST_F(CliTest, SurveyHasOnePanelPerBaseline) {
  const std::string data = synthetic();
  const CliResult r = run({"survey", data, "--outdir", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("# 28 baselines"), std::string::npos);
  const std::string svg = slurp(path("survey_all.svg"));
  std::size_t panels = 0;
  for (std::size_t at = svg.find("<g class=\"panel\">"); at != std::string::npos;
       at = svg.find("<g class=\"panel\">", at + 1))
    ++panels;
  EXPECT_EQ(panels, 28u);
}

TEST_F(CliTest, IngestAverageAndTwoPoint) {
  const std::string young = path("young.csv");
  const std::string old = path("old.csv");
  write_text_file(young, "id,x1,y1,x2,y2,x3,y3,x4,y4\ny1,0,0,1,0,1,1,0,1\ny2,0,0,1.1,0,1,1.1,0,1\n");
  write_text_file(old, "id,x1,y1,x2,y2,x3,y3,x4,y4\no1,0,0,2,0,2,1,0,1\no2,0,0,2.1,0,2,1,0,1.1\n");
  CliResult r = run({"ingest", young, old, "-o", path("all.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Dataset all = read_dataset(slurp(path("all.json")));
  EXPECT_EQ(all.sample.size(), 4u);
  EXPECT_EQ(all.sample.group_of("o2"), "old");
  EXPECT_EQ(all.provenance.sources.size(), 2u);

  r = run({"average", path("all.json"), "-o", path("means.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Dataset means = read_dataset(slurp(path("means.json")));
  ASSERT_EQ(means.sample.size(), 2u);
  EXPECT_EQ(means.sample.configurations()[0].units(), Units::kProcrustes);

  r = run({"twopoint", path("all.json"), "--baseline", "1,2", "-o", path("reg.json"), "--outdir", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const Dataset reg = read_dataset(slurp(path("reg.json")));
  for (const auto& c : reg.sample.configurations()) {
    EXPECT_EQ(c.position(0), (Point2{0, 0}));
    EXPECT_EQ(c.position(1), (Point2{1, 0}));
  }
  EXPECT_TRUE(oracle::xml_well_formed(slurp(path("twopoint_1-2.svg"))));
}

TEST_F(CliTest, DemoPrototypes) {
  for (const std::string kind : {"parallelogram", "rotated_parallelogram", "trapezoid", "kite"}) {
    const CliResult r = run({"demo", kind, "--outdir", dir_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(read_dataset(slurp(path("demo_" + kind + ".json"))).sample.size(), 2u);
    EXPECT_TRUE(oracle::xml_well_formed(slurp(path("demo_" + kind + ".svg"))));
  }
  EXPECT_EQ(run({"demo", "hexagon", "--outdir", dir_.string()}).code, cli::kExitInputError);
}

TEST_F(CliTest, ConfigFileMergesUnderExplicitFlags) {
  const std::string data = synthetic();
  write_text_file(path("cfg.json"), R"({"degree": 3, "baseline": "3,8", "extend": ["left:1.0"], "hull": true})");
  const CliResult r = run({"fit", data, "--config", path("cfg.json"), "--degree", "2", "--outdir", dir_.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("degree 2 fit on baseline IPS-SOS", 0), 0u) << r.out;
  EXPECT_NE(slurp(path("fit_3-8.json")).find("\"degree\": 2"), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
  const std::string data = synthetic();
  EXPECT_EQ(run({}).code, cli::kExitInputError);
  EXPECT_EQ(run({"fit", data, "--degree", "2", "--baseline", "3,8", "--bogus", "--outdir", dir_.string()}).code,
            cli::kExitInputError);
  EXPECT_EQ(run({"fit", data, "--degree", "4", "--baseline", "3,8", "--outdir", dir_.string()}).code,
            cli::kExitInputError);
  EXPECT_EQ(run({"fit", data, "--degree", "2", "--baseline", "3,3", "--outdir", dir_.string()}).code,
            cli::kExitInputError);
  EXPECT_EQ(run({"rotations", path("missing.json")}).code, cli::kExitInputError);
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);

  // coincident baseline landmarks are a numerical failure, not an input error
  write_text_file(path("flat.csv"), "id,x1,y1,x2,y2,x3,y3\na,1,1,1,1,0,3\n");
  const CliResult r = run({"twopoint", path("flat.csv"), "--baseline", "1,2"});
  EXPECT_EQ(r.code, cli::kExitNumericalError);
  EXPECT_NE(r.err.find("degenerate"), std::string::npos) << r.err;
}

TEST_F(CliTest, HomologyMismatchAcrossFilesNamesBoth) {
  write_text_file(path("a.csv"), "id,label,x,y\nfirst,P,0,0\nfirst,Q,1,0\nfirst,R,0,1\n");
  write_text_file(path("b.csv"), "id,label,x,y\nsecond,P,0,0\nsecond,Z,1,0\nsecond,R,0,1\n");
  const CliResult r = run({"ingest", path("a.csv"), path("b.csv"), "-o", path("x.json")});
  EXPECT_EQ(r.code, cli::kExitInputError);
  EXPECT_NE(r.err.find("first"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("second"), std::string::npos) << r.err;
}

}  // namespace
}  // namespace morphogrid
