#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oscidmd/config.hpp"
#include "oscidmd/model_io.hpp"
#include "oscidmd/snapshot_io.hpp"
#include "support.hpp"

using namespace oscidmd;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("oscidmd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome run(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string(OSCIDMD_CLI_PATH) + " --out " + dir_.string() + " " + args + " >" +
                            out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  fs::path write_data(const std::string& name, const ComplexMatrix& data, double tau = 0.01) const {
    SnapshotMatrix X{data, tau, {0.0, 1.0, std::max<Index>(data.rows(), 2)}, 1.0};
    write_snapshots(path(name), X);
    return path(name);
  }

  static std::string config(const std::string& name) { return std::string(OSCIDMD_CONFIG_DIR) + "/" + name; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SimulateForwardPropagationConfig) {
  const auto r = run("simulate " + config("exp-4.1.ini"));
  ASSERT_EQ(r.code, 0) << r.err;
  const SnapshotMatrix X = read_snapshots(path("snapshots.bin"));
  EXPECT_EQ(X.dim(), 200);
  EXPECT_EQ(X.snapshots(), 100);
  EXPECT_NE(r.out.find("n 200"), std::string::npos);
}

TEST_F(Cli, SimulateHarmonicConfigShape) {
  const auto r = run("simulate " + config("exp-4.2.ini") + " -o " + path("x.bin").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const SnapshotMatrix X = read_snapshots(path("x.bin"));
  EXPECT_EQ(X.dim(), 250);
  EXPECT_EQ(X.snapshots(), 80);
}

TEST_F(Cli, SimulateZeroStepsGivesOneColumn) {
  ASSERT_EQ(run("simulate " + config("zero-steps.ini")).code, 0);
  EXPECT_EQ(read_snapshots(path("snapshots.bin")).snapshots(), 1);
}

TEST_F(Cli, SimulateIsByteReproducible) {
  ASSERT_EQ(run("simulate " + config("exp-4.1.ini") + " -o " + path("a.bin").string()).code, 0);
  ASSERT_EQ(run("simulate " + config("exp-4.1.ini") + " -o " + path("b.bin").string()).code, 0);
  EXPECT_EQ(slurp(path("a.bin")), slurp(path("b.bin")));
}

TEST_F(Cli, SimulateMissingFieldExitsTwoNamingField) {
  std::string text = slurp(config("exp-4.1.ini"));
  text.erase(text.find("tau_e = 0.01"), 13);
  std::ofstream(path("bad.ini")) << text;
  const auto r = run("simulate " + path("bad.ini").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("time.tau_e"), std::string::npos) << r.err;
}

TEST_F(Cli, SimulateMalformedConfigReportsLine) {
  std::ofstream(path("bad.ini")) << "[grid]\na = 0\n= broken\n";
  const auto r = run("simulate " + path("bad.ini").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line"), std::string::npos) << r.err;
}

TEST_F(Cli, FitUnknownMethodExitsTwo) {
  const auto data = write_data("x.bin", testing_support::random_matrix(4, 5, 1));
  EXPECT_EQ(run("fit " + data.string() + " -m exact").code, 2);
}

TEST_F(Cli, FitDegenerateDataExitsThree) {
  const auto data = write_data("zero.bin", ComplexMatrix::Zero(4, 5));
  const auto r = run("fit " + data.string() + " -m classical");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("degenerate"), std::string::npos);
}

TEST_F(Cli, FitClassicalOnConstantData) {
  const auto data = write_data("c.bin", testing_support::random_vector(6, 2).replicate(1, 10));
  const auto r = run("fit " + data.string() + " -m classical");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("rank 1\n"), std::string::npos) << r.out;
  const auto model = std::get<ClassicalDmdModel>(read_model(path("model.bin")));
  EXPECT_NEAR(std::abs(model.eigenvalues(0) - 1.0), 0.0, 1e-12);
  EXPECT_NE(r.out.find("|lambda| 1"), std::string::npos) << r.out;
}

TEST_F(Cli, FitCnRankBoundedByColumns) {
  ASSERT_EQ(run("simulate " + config("exp-4.2.ini")).code, 0);
  const auto r = run("fit " + path("snapshots.bin").string() + " -m cn");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto model = std::get<ReducedHermitianModel>(read_model(path("model.bin")));
  EXPECT_GE(model.rank(), 1);
  EXPECT_LE(model.rank(), 79);
}

TEST_F(Cli, FitPidmdWarnsOnLargeDimension) {
  const auto data = write_data("big.bin", ComplexMatrix::Ones(10000, 2));
  // A single training column stops the fit right after the size check.
  const auto r = run("fit " + data.string() + " -m pidmd --count 1");
  EXPECT_NE(r.err.find("warning: piDMD requests a full O(n^3) solve at n = 10000"), std::string::npos) << r.err;
  const auto small = write_data("small.bin", testing_support::random_matrix(8, 4, 3));
  const auto s = run("fit " + small.string() + " -m pidmd");
  EXPECT_EQ(s.code, 0);
  EXPECT_EQ(s.err.find("warning"), std::string::npos);
}

TEST_F(Cli, PredictZeroStepsEchoesInitialState) {
  const ComplexMatrix data = testing_support::random_matrix(6, 8, 4);
  const auto snaps = write_data("x.bin", data);
  ASSERT_EQ(run("fit " + snaps.string() + " -m cn").code, 0);
  ASSERT_EQ(run("predict " + path("model.bin").string() + " -i " + snaps.string() + " -N 0").code, 0);
  const SnapshotMatrix P = read_snapshots(path("prediction.bin"));
  ASSERT_EQ(P.snapshots(), 1);
  EXPECT_EQ(P.data.col(0), data.col(0));
}

TEST_F(Cli, PredictModesAgree) {
  ASSERT_EQ(run("simulate " + config("exp-4.2.ini")).code, 0);
  const std::string snaps = path("snapshots.bin").string();
  for (const char* method : {"cn", "si", "classical", "pidmd"}) {
    ASSERT_EQ(run("fit " + snaps + " -m " + method).code, 0) << method;
    std::vector<ComplexMatrix> outs;
    for (const char* mode : {"block", "single", "parallel"}) {
      const auto r = run("--threads 4 predict " + path("model.bin").string() + " -i " + snaps + " -N 120 --mode " + mode);
      ASSERT_EQ(r.code, 0) << r.err;
      outs.push_back(read_snapshots(path("prediction.bin")).data);
    }
    ASSERT_EQ(outs[0].cols(), 121);
    EXPECT_LE((outs[0] - outs[1]).cwiseAbs().maxCoeff(), 1e-12) << method;
    EXPECT_LE((outs[0] - outs[2]).cwiseAbs().maxCoeff(), 1e-12) << method;
  }
}

TEST_F(Cli, PredictSemiImplicitNeedsTwoStates) {
  const ComplexMatrix data = testing_support::random_matrix(6, 8, 5);
  const auto snaps = write_data("x.bin", data);
  const auto single = write_data("x0.bin", data.leftCols(1));
  ASSERT_EQ(run("fit " + snaps.string() + " -m si").code, 0);
  const auto r = run("predict " + path("model.bin").string() + " -i " + single.string() + " -N 4");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("two initial states"), std::string::npos);
  EXPECT_EQ(run("predict " + path("model.bin").string() + " -i " + snaps.string() + " -N 4").code, 0);
}

TEST_F(Cli, PredictWithTruthWritesMetrics) {
  ASSERT_EQ(run("simulate " + config("exp-4.2.ini")).code, 0);
  const std::string snaps = path("snapshots.bin").string();
  ASSERT_EQ(run("fit " + snaps + " -m cn --count 40").code, 0);
  const auto r = run("predict " + path("model.bin").string() + " -i " + snaps + " -N 79 --truth " + snaps);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("method,e_rel,dM_final,dE_final,fit_seconds,predict_seconds\ncn,"), std::string::npos);
  std::istringstream csv(slurp(path("metrics.csv")));
  std::string line;
  int rows = -1;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 80);
}

TEST_F(Cli, UnknownPresetListsPresets) {
  const auto r = run("experiment exp-9.9");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("exp-4.1"), std::string::npos);
  EXPECT_NE(r.err.find("exp-4.5"), std::string::npos);
}

TEST_F(Cli, ExperimentRerunFromManifestIsByteIdentical) {
  ASSERT_EQ(run("experiment exp-4.1 --no-timings").code, 0);
  const fs::path first = path("exp-4.1");
  ASSERT_TRUE(fs::exists(first / "manifest.json"));
  ASSERT_TRUE(fs::exists(first / "magnitude_truth.csv"));
  for (const char* m : {"cn", "si", "classical", "pidmd"})
    EXPECT_TRUE(fs::exists(first / ("magnitude_" + std::string(m) + ".csv"))) << m;
  fs::rename(first, path("first"));
  ASSERT_EQ(run("experiment --manifest " + (path("first") / "manifest.json").string()).code, 0);
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(path("first"))) {
    EXPECT_EQ(slurp(e.path()), slurp(first / e.path().filename())) << e.path().filename();
    ++compared;
  }
  EXPECT_GE(compared, 10u);
}

TEST_F(Cli, BenchReportsBothPhases) {
  const auto r = run("--format csv bench exp-4.1 --methods cn,si");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("method,n,rank,fit_seconds,predict_seconds\n"), std::string::npos);
  EXPECT_NE(r.out.find("\ncn,200,"), std::string::npos);
  EXPECT_NE(r.out.find("\nsi,200,"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("exp-4.1")));
}
