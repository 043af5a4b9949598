#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "medsmooth/cli.hpp"
#include "medsmooth/offline.hpp"
#include "medsmooth/report.hpp"

using namespace medsmooth;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("medsmooth_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> small_certify(const fs::path& out) {
  return {"certify", "--scenes", "4", "--samples", "200", "--alpha", "0.999", "--out", out.string()};
}

std::vector<std::string> csv_rows(const std::string& text) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) rows.push_back(line);
  return rows;
}

std::vector<double> csv_fields(const std::string& row) {
  std::vector<double> v;
  std::istringstream in(row);
  std::string cell;
  while (std::getline(in, cell, ',')) v.push_back(std::stod(cell));
  return v;
}

}  // namespace

TEST_CASE("certify writes identical bytes on repeat runs") {
  TempDir a, b;
  const auto ra = run(small_certify(a.path));
  const auto rb = run(small_certify(b.path));
  REQUIRE(ra.code == kExitOk);
  REQUIRE(rb.code == kExitOk);
  CHECK(slurp(a.path / "report.json") == slurp(b.path / "report.json"));
  CHECK(slurp(a.path / "pr.csv") == slurp(b.path / "pr.csv"));
  CHECK(ra.out.find("certify: 4 images") != std::string::npos);
  CHECK(ra.err.find("elapsed") != std::string::npos);
}

TEST_CASE("evaluate reproduces the metrics of a certificate file") {
  TempDir a;
  REQUIRE(run(small_certify(a.path)).code == kExitOk);
  TempDir b;
  const auto r = run({"evaluate", "--input", (a.path / "report.json").string(), "--out",
                      b.path.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(slurp(b.path / "pr.csv") == slurp(a.path / "pr.csv"));
  CHECK(fs::exists(b.path / "metrics.json"));

  // A looser tau can only add certified boxes.
  TempDir c;
  REQUIRE(run({"evaluate", "--input", (a.path / "report.json").string(), "--tau", "0.3",
               "--out", c.path.string()})
              .code == kExitOk);
  const auto strict = csv_rows(slurp(a.path / "pr.csv"));
  const auto loose = csv_rows(slurp(c.path / "pr.csv"));
  REQUIRE(strict.size() == loose.size());
  for (std::size_t i = 1; i < strict.size(); ++i) {
    CHECK(csv_fields(loose[i])[4] >= csv_fields(strict[i])[4]);
  }
}

TEST_CASE("report files round trip") {
  TempDir a;
  REQUIRE(run(small_certify(a.path)).code == kExitOk);
  const auto text = slurp(a.path / "report.json");
  CHECK(render_report(parse_report(text)) == text);
}

TEST_CASE("sweep rows are ordered by radius with non-increasing certified recall") {
  TempDir a;
  const auto r = run({"sweep", "--scenes", "4", "--samples", "200", "--alpha", "0.99",
                      "--epsilons", "0.36,0.1,0.5,0.25", "--out", a.path.string()});
  REQUIRE(r.code == kExitOk);
  const auto rows = csv_rows(slurp(a.path / "sweep.csv"));
  REQUIRE(rows.size() == 1 + 4 * 5);
  CHECK(rows[0].rfind("epsilon,threshold", 0) == 0);
  for (std::size_t i = 6; i < rows.size(); ++i) {
    const auto now = csv_fields(rows[i]);
    const auto before = csv_fields(rows[i - 5]);
    CHECK(now[0] > before[0]);
    CHECK(now[1] == before[1]);
    CHECK(now[5] <= before[5]);
    CHECK(now[4] <= before[4] + 1e-12);
  }
  CHECK(fs::exists(a.path / "sweep.json"));
}

TEST_CASE("scene files drive certify") {
  TempDir a;
  SyntheticScene s;
  s.id = 4;
  s.objects = {{Box{5, 5, 25, 25}, 0, 0.9}};
  std::ofstream(a.path / "scenes.json") << render_scenes({s});
  const auto r = run({"certify", "--input", (a.path / "scenes.json").string(), "--samples", "100",
                      "--alpha", "0.99", "--out", a.path.string()});
  REQUIRE(r.code == kExitOk);
  const auto report = parse_report(slurp(a.path / "report.json"));
  REQUIRE(report.images.size() == 1);
  CHECK(report.images[0].id == "scene-4");
}

TEST_CASE("offline runs through the command line") {
  TempDir a;
  OfflineRun off;
  off.manifest = {"mock", 0.25, 50, 0};
  OfflineImage img;
  img.id = "x";
  img.size = ImageSize{40, 40};
  img.ground_truth = {{Box{5, 5, 20, 20}, 2}};
  img.samples.assign(50, {{Box{5, 5, 20, 20}, 2, 0.9}});
  off.images = {img};
  write_offline_run(off, a.path / "run");

  const auto ok = run({"certify", "--offline", (a.path / "run").string(), "--alpha", "0.99",
                       "--epsilon", "0.1",
                       "--out", a.path.string()});
  REQUIRE(ok.code == kExitOk);
  const auto report = parse_report(slurp(a.path / "report.json"));
  CHECK(report.config.samples == 50);
  CHECK(report.source == "offline:mock");
  CHECK(report.ap.ap_cert_lower == Catch::Approx(1.0));

  const auto bad_sigma = run({"certify", "--offline", (a.path / "run").string(), "--sigma", "0.5",
                              "--out", a.path.string()});
  CHECK(bad_sigma.code == kExitInputError);
  CHECK(bad_sigma.err.find("sigma") != std::string::npos);
  CHECK(std::count(bad_sigma.err.begin(), bad_sigma.err.end(), '\n') == 1);

  const auto bad_n = run({"certify", "--offline", (a.path / "run").string(), "--samples", "49",
                          "--out", a.path.string()});
  CHECK(bad_n.code == kExitInputError);

  const auto both = run({"certify", "--offline", (a.path / "run").string(), "--input", "x.json"});
  CHECK(both.code == kExitInputError);
}

TEST_CASE("exit codes") {
  TempDir a;
  CHECK(run({"certify", "--epsilon", "5", "--scenes", "1", "--samples", "10", "--out",
             a.path.string()})
            .code == kExitCertificationImpossible);
  CHECK(run({"certify", "--sort", "diagonal"}).code == kExitInputError);
  CHECK(run({"certify", "--alpha", "1.5", "--out", a.path.string()}).code == kExitInputError);
  CHECK(run({"evaluate", "--input", (a.path / "none.json").string()}).code == kExitInputError);
  CHECK(run({"frobnicate"}).code == kExitInputError);
  CHECK(run({}).code == kExitInputError);
  CHECK(run({"certify", "--help"}).code == kExitOk);
}

TEST_CASE("detect writes smoothed detections") {
  TempDir a;
  const auto r = run({"detect", "--scenes", "2", "--samples", "51", "--out", a.path.string()});
  REQUIRE(r.code == kExitOk);
  const auto text = slurp(a.path / "detections.json");
  CHECK(text.find("\"scene-1\"") != std::string::npos);
}

TEST_CASE("compare-smoothing writes the curve table") {
  TempDir a;
  const auto r = run({"compare-smoothing", "--function", "step", "--sigma", "0.5", "--samples",
                      "4000", "--points", "9", "--x-min", "-1", "--x-max", "1", "--out",
                      a.path.string()});
  REQUIRE(r.code == kExitOk);
  const auto rows = csv_rows(slurp(a.path / "smoothing.csv"));
  REQUIRE(rows.size() == 10);
  CHECK(rows[0] == "x,base,mean,median,mean_lo,mean_hi,median_lo,median_hi");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto f = csv_fields(rows[i]);
    CHECK((f[3] == 0.0 || f[3] == 1.0));
    CHECK(f[4] <= f[2]);
    CHECK(f[2] <= f[5]);
    CHECK(f[6] <= f[3]);
    CHECK(f[3] <= f[7]);
  }
  // At x = 1 the mean is Phi(2) = 0.977.
  CHECK(csv_fields(rows.back())[2] == Catch::Approx(0.977).margin(0.01));
  CHECK(run({"compare-smoothing", "--function", "wiggle"}).code == kExitInputError);
}
