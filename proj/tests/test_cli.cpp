#include "support/battery.hpp"

#include "cli_app.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

namespace {

using namespace cone_kkt;
using test_support::fixture_path;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "cone-kkt");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("cone_kkt_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return path(name);
  }
  std::string cert(const Vector& x, const Vector& z) const {
    const ProblemSpec p = fixtures::p1();
    const Certificate c{x, z};
    const auto f = io::make_certificate_file(p, c, verify_certificate(p, c), 1e-6);
    io::save_json(dir_ / "given.cert.json", io::certificate_to_json(f));
    return path("given.cert.json");
  }

  std::filesystem::path dir_;
};

TEST_F(Cli, SolveP1WritesCertificate) {
  const std::string out = path("p1.cert.json");
  const CliResult r = cli({"solve", fixture_path("p1.json").string(), "--out", out});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("verdict: accepted"), std::string::npos);
  const io::CertificateFile f = io::load_certificate(out);
  EXPECT_NEAR(f.x0(0), 0.5, 1e-6);
  EXPECT_NEAR(f.x0(1), 1.0, 1e-6);
  EXPECT_TRUE(f.accepted);
  EXPECT_FALSE(f.notes.empty());
}

TEST_F(Cli, SolveDefaultOutputNextToProblem) {
  std::filesystem::copy_file(fixture_path("p0.json"), dir_ / "p0.json");
  EXPECT_EQ(cli({"solve", path("p0.json")}).code, 0);
  EXPECT_TRUE(std::filesystem::exists(dir_ / "p0.cert.json"));
}

TEST_F(Cli, SolveStarvedExitsThreeWithoutWriting) {
  const std::string out = path("starved.cert.json");
  const CliResult r = cli({"solve", fixture_path("p1.json").string(), "--max-iters", "10", "--out", out});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("\"converged\": false"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(out));
}

TEST_F(Cli, SolveMalformedExitsTwo) {
  const CliResult r = cli({"solve", write("malformed.json", "{ not json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(cli({"solve", path("absent.json")}).code, 2);
}

TEST_F(Cli, SolveIndefiniteExitsTwo) {
  io::json j = io::problem_to_json(fixtures::p1());
  j["Q"] = {{-1.0, 0.0}, {0.0, 1.0}};
  EXPECT_EQ(cli({"solve", write("indef.json", j.dump())}).code, 2);
}

TEST_F(Cli, CheckExactCertificate) {
  const CliResult r = cli({"check", fixture_path("p1.json").string(),
                     cert(test_support::vec({0.5, 1}), test_support::vec({1, 0}))});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("verdict: accepted"), std::string::npos);
  EXPECT_EQ(r.out.find("VIOLATED"), std::string::npos);
}

TEST_F(Cli, CheckZeroMultiplierRejected) {
  const CliResult r = cli({"check", fixture_path("p1.json").string(),
                     cert(test_support::vec({0.5, 1}), test_support::vec({0, 0}))});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("stationarity"), std::string::npos);
  EXPECT_NE(r.out.find("1.000000e+00"), std::string::npos);
  EXPECT_NE(r.out.find("verdict: rejected"), std::string::npos);
}

TEST_F(Cli, CheckMismatchedDimsExitsTwo) {
  const std::string c = cert(test_support::vec({0.5, 1}), test_support::vec({1, 0}));
  EXPECT_EQ(cli({"check", fixture_path("p2.json").string(), c}).code, 2);
}

TEST_F(Cli, ProbeP2) {
  const std::string out = path("probe.json");
  const CliResult r = cli({"probe", fixture_path("p2.json").string(), "--out", out});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("slater: fails: empty interior"), std::string::npos);
  EXPECT_NE(r.out.find("equivalence: not applicable"), std::string::npos);
  EXPECT_NE(r.out.find("estimated over 68 directions"), std::string::npos);
  const io::json j = io::read_json(out);
  EXPECT_NEAR(j["epsilon"]["eps_hat"].get<double>(), 1.0, 1e-3);
}

TEST_F(Cli, ProbeP1) {
  const std::string out = path("probe.json");
  const CliResult r = cli({"probe", fixture_path("p1.json").string(), "--out", out});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("slater: holds"), std::string::npos);
  EXPECT_NE(r.out.find("equivalence: consistent"), std::string::npos);
  const io::json j = io::read_json(out);
  EXPECT_NEAR(j["epsilon"]["eps_hat"].get<double>(), 0.5, 1e-3);
  EXPECT_NEAR(j["slater"]["margin"].get<double>(), 0.5, 1e-3);
}

TEST_F(Cli, ProbeP0BasisOnly) {
  const std::string out = path("probe.json");
  const CliResult r = cli({"probe", fixture_path("p0.json").string(), "--dirs", "0", "--out", out});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("estimated over 4 directions"), std::string::npos);
  EXPECT_NEAR(io::read_json(out)["epsilon"]["eps_hat"].get<double>(), 1.0, 1e-3);
}

TEST_F(Cli, ProbeStarvedPhaseOneExitsThree) {
  const CliResult r = cli({"probe", fixture_path("p2.json").string(), "--max-iters", "1"});
  EXPECT_EQ(r.code, 3);
}

TEST_F(Cli, OracleP1) {
  const std::string out = path("oracle.json");
  const CliResult r = cli({"oracle", fixture_path("p1.json").string(), "--out", out});
  EXPECT_EQ(r.code, 0);
  const io::json j = io::read_json(out);
  EXPECT_NEAR(j["value"].get<double>(), 0.25, 1e-12);
  EXPECT_NEAR(j["solver"]["value"].get<double>(), 0.25, 1e-8);
}

TEST_F(Cli, OracleP2) {
  const CliResult r = cli({"oracle", fixture_path("p2.json").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("unique_multiplier=false"), std::string::npos);
}

TEST_F(Cli, OracleGuardExitsFour) {
  ProblemSpec p;
  p.name = "big";
  p.objective = {Matrix::Identity(20, 20), Vector::Zero(20), 0.0};
  p.A = LinearMap(Matrix::Identity(20, 20));
  p.b = Vector::Ones(20);
  p.K = ConeSpec::orthant(20);
  p.P = ConeSpec::orthant(20);
  const CliResult r = cli({"oracle", write("big.json", io::problem_to_json(p).dump())});
  EXPECT_EQ(r.code, 4);
}

TEST_F(Cli, OracleInfeasibleExitsOne) {
  io::json j = io::problem_to_json(fixtures::p1());
  j["b"] = {-1.0, 2.0};
  EXPECT_EQ(cli({"oracle", write("infeasible.json", j.dump())}).code, 1);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"solve"}).code, 2);
  EXPECT_EQ(cli({"solve", fixture_path("p1.json").string(), "--step-scale", "abc"}).code, 2);
  EXPECT_EQ(cli({"solve", fixture_path("p1.json").string(), "--step-scale", "1.5"}).code, 2);
}

TEST_F(Cli, BinaryEndToEnd) {
  const std::string out = path("bin.cert.json");
  const std::string cmd = std::string(CONE_KKT_CLI_PATH) + " solve " +
                          fixture_path("p2.json").string() + " --out " + out + " > /dev/null";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 0);
  EXPECT_TRUE(io::load_certificate(out).accepted);
}

}  // namespace
