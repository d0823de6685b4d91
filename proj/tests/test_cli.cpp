#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "vnmix/io.hpp"
#include "vnmix/oracle.hpp"

using namespace vnmix;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("vnmix_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string write(const std::string& name, const std::string& content) const {
    std::ofstream(path(name)) << content;
    return path(name);
  }
  std::string write(const std::string& name, const Functional& w) const { return write(name, io::to_json(w).dump()); }

  static std::string slurp(const std::string& file) {
    std::ifstream in(file);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  CliResult run(const std::string& args) const {
    const auto out = path("stdout.txt"), err = path("stderr.txt");
    const std::string cmd = std::string("\"") + VNMIX_CLI_PATH + "\" " + args + " > \"" + out + "\" 2> \"" + err + "\"";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path dir_;
};

const AlgebraSpec k22 = AlgebraSpec::validate({2, 2});

Functional with_center(std::uint64_t seed, double a, double b) {
  return oracle::random_state(k22, seed, {std::vector<double>{a, b}, std::nullopt});
}

json strip_timestamp(json j) {
  j.erase("timestamp");
  return j;
}

}  // namespace

TEST_F(CliTest, ReachYes) {
  const auto w = write("w.json", with_center(1, 0.4, 0.6));
  const auto r = write("r.json", with_center(2, 0.4, 0.6));
  const auto res = run("reach --omega " + w + " --rho " + r);
  ASSERT_EQ(res.code, 0) << res.err;
  const auto j = json::parse(res.out);
  EXPECT_EQ(j["verdict"], "yes");
  EXPECT_EQ(j["theorem"], kCenterCriterion);
  EXPECT_TRUE(j.contains("timestamp"));
}

TEST_F(CliTest, ReachNo) {
  const auto w = write("w.json", with_center(1, 0.4, 0.6));
  const auto r = write("r.json", with_center(2, 0.6, 0.4));
  const auto res = run("reach --omega " + w + " --rho " + r + " --with-oracle");
  ASSERT_EQ(res.code, 1) << res.err;
  const auto j = json::parse(res.out);
  EXPECT_EQ(j["verdict"], "no");
  EXPECT_FALSE(j["certificate"].is_null());
  EXPECT_EQ(j["oracle"]["verdict"], "no");
}

TEST_F(CliTest, ReachIndeterminate) {
  const auto a = AlgebraSpec::validate({1, 1});
  const auto w = write("w.json", Functional(a, {Matrix::diag({0.5}), Matrix::diag({0.5})}));
  const auto r = write("r.json", Functional(a, {Matrix::diag({0.5 + 5e-10}), Matrix::diag({0.5 - 5e-10})}));
  const auto res = run("reach --omega " + w + " --rho " + r);
  EXPECT_EQ(res.code, 2) << res.err;
  EXPECT_EQ(json::parse(res.out)["verdict"], "indeterminate");
}

TEST_F(CliTest, MalformedInputCitesFieldPath) {
  const auto w = write("w.json", with_center(1, 0.5, 0.5));
  const auto bad = write("bad.json", R"({"algebra": {"blocks": [2, 2]}, "densities": [[[0.5, 0], [0, 0.5]], [[1, 0]]]})");
  const auto res = run("reach --omega " + w + " --rho " + bad);
  EXPECT_EQ(res.code, 3);
  EXPECT_NE(res.err.find("densities[1]"), std::string::npos) << res.err;
  EXPECT_EQ(run("reach --omega " + w + " --rho " + path("missing.json")).code, 3);
  EXPECT_EQ(run("reach --omega " + w + " --rho " + w + " --tol-dec -1").code, 3);
  EXPECT_EQ(run("reach --omega " + w).code, 3);
}

TEST_F(CliTest, TransportFailureCarriesCertificate) {
  const auto a = AlgebraSpec::validate({2});
  const auto w = write("w.json", Functional(a, {Matrix::diag({0.5, 0.5})}));
  const auto r = write("r.json", Functional(a, {Matrix::diag({1.2, -0.2})}));
  const auto res = run("transport --omega " + w + " --rho " + r);
  ASSERT_EQ(res.code, 1) << res.err;
  const auto j = json::parse(res.out);
  EXPECT_EQ(j["verdict"], "no");
  EXPECT_EQ(j["certificate"]["ideal"], json::array({1}));
}

TEST_F(CliTest, TransportSuccessWritesKrausFile) {
  const auto w = oracle::random_hermitian(k22, 5);
  const auto wf = write("w.json", w);
  const auto rf = write("r.json", oracle::random_companion(w, 6));
  const auto res = run("transport --omega " + wf + " --rho " + rf + " --out " + path("psi.json"));
  ASSERT_EQ(res.code, 0) << res.err;
  const auto j = io::read_json_file(path("psi.json"));
  EXPECT_TRUE(j.contains("kraus"));
  EXPECT_LE(j["verification"]["unitality"].get<double>(), 1e-9);
  EXPECT_LE(j["verification"]["composition"].get<double>(), 1e-8);
  const auto ch = io::channel_from_json(j);
  EXPECT_TRUE(ch.kraus->is_unital(1e-9));
}

TEST_F(CliTest, RerunsAreIdenticalApartFromTimestamp) {
  const auto w = write("w.json", with_center(1, 0.4, 0.6));
  const auto r = write("r.json", with_center(2, 0.4, 0.6));
  const auto a = run("reach --omega " + w + " --rho " + r + " --with-oracle --seed 9 --out " + path("a.json"));
  const auto b = run("reach --omega " + w + " --rho " + r + " --with-oracle --seed 9 --out " + path("b.json"));
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  const auto ja = io::read_json_file(path("a.json")), jb = io::read_json_file(path("b.json"));
  EXPECT_EQ(strip_timestamp(ja).dump(), strip_timestamp(jb).dump());
  // only the timestamp line may differ in the raw bytes
  std::istringstream sa(slurp(path("a.json"))), sb(slurp(path("b.json")));
  std::string la, lb;
  while (std::getline(sa, la)) {
    ASSERT_TRUE(static_cast<bool>(std::getline(sb, lb)));
    if (la.find("\"timestamp\"") == std::string::npos) EXPECT_EQ(la, lb);
  }
  EXPECT_FALSE(static_cast<bool>(std::getline(sb, lb)));
}

TEST_F(CliTest, OracleRecheck) {
  const auto w = write("w.json", with_center(1, 0.4, 0.6));
  const auto r = write("r.json", with_center(2, 0.4, 0.6));
  ASSERT_EQ(run("reach --omega " + w + " --rho " + r + " --out " + path("rep.json")).code, 0);
  const auto good = run("oracle --report " + path("rep.json"));
  EXPECT_EQ(good.code, 0) << good.err;
  auto j = io::read_json_file(path("rep.json"));
  j["verdict"] = "no";
  write("tampered.json", j.dump());
  const auto bad = run("oracle --report " + path("tampered.json"));
  EXPECT_EQ(bad.code, 4) << bad.err;
  EXPECT_EQ(json::parse(bad.out)["agrees"], false);
}

TEST_F(CliTest, ConvertRoundtrip) {
  const auto phi = random_elementary(k22, 3, 11);
  write("k.json", io::to_json(phi).dump());
  ASSERT_EQ(run("convert --channel " + path("k.json") + " --to choi --out " + path("c.json")).code, 0);
  ASSERT_EQ(run("convert --channel " + path("c.json") + " --to kraus --out " + path("k2.json")).code, 0);
  const auto back = io::channel_from_json(io::read_json_file(path("k2.json")));
  EXPECT_LE(choi_of(*back.kraus).max_difference(choi_of(phi)), 1e-9);
  EXPECT_EQ(run("convert --channel " + path("k.json") + " --to other").code, 3);
}

TEST_F(CliTest, ExactChannel) {
  const auto a = AlgebraSpec::validate({2});
  const auto w = write("w.json", Functional(a, {Matrix::diag({1.0, 0.0})}));
  const auto r = write("r.json", Functional(a, {Matrix::diag({0.5, 0.5})}));
  const auto res = run("exact-channel --omega " + w + " --rho " + r);
  ASSERT_EQ(res.code, 0) << res.err;
  const auto j = json::parse(res.out);
  EXPECT_LE(j["verification"]["unitality"].get<double>(), 1e-8);
  EXPECT_LE(j["verification"]["composition"].get<double>(), 1e-7);

  const auto b = AlgebraSpec::validate({1, 1});
  const auto w2 = write("w2.json", Functional(b, {Matrix::diag({0.5}), Matrix::diag({0.5})}));
  const auto r2 = write("r2.json", Functional(b, {Matrix::diag({0.7}), Matrix::diag({0.3})}));
  EXPECT_EQ(run("exact-channel --omega " + w2 + " --rho " + r2).code, 1);
}

TEST_F(CliTest, MaxmixAndTables) {
  const auto w = write("w.json", with_center(3, 1.0, 0.0));
  EXPECT_EQ(run("maxmix --omega " + w).code, 0);
  EXPECT_EQ(run("maxmix --omega " + w + " --ideal 2").code, 0);
  EXPECT_EQ(run("maxmix --omega " + w + " --ideal 1").code, 3);
  const auto norms = run("ideal-norms --omega " + w);
  ASSERT_EQ(norms.code, 0);
  EXPECT_EQ(json::parse(norms.out)["ideals"].size(), 4u);
  const auto jd = run("jordan --omega " + w);
  ASSERT_EQ(jd.code, 0);
  EXPECT_NEAR(json::parse(jd.out)["norm"].get<double>(), 1.0, 1e-12);
}

TEST_F(CliTest, SelftestSingleSuite) {
  const auto res = run("selftest --suite 5 --seed 42");
  EXPECT_EQ(res.code, 0) << res.out << res.err;
  EXPECT_NE(res.out.find("criterion 5"), std::string::npos);
  EXPECT_NE(res.out.find("PASS"), std::string::npos);
}
