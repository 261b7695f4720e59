#include "cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using sandwich::cli::run;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("sandwich_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("bernoulli-exact prints both benchmark eigenvalues") {
    const auto r = invoke({"bernoulli-exact", "--rho", "0.1", "--m", "10", "--m1", "5"});
    CHECK(r.code == 0);
    CHECK(r.out.find("lambda1 = 0.9939533824") != std::string::npos);
    CHECK(r.out.find("lambda2 = 0.1979476793") != std::string::npos);
    const auto twenty = invoke({"bernoulli-exact", "--rho", "1/10", "--m", "20"});
    CHECK(twenty.out.find("lambda1 = 0.99996") != std::string::npos);
    CHECK(twenty.out.find("lambda2 = 0.151948") != std::string::npos);
  }

  TEST_CASE("usage errors exit with 1") {
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"frobnicate"}).code == 1);
    CHECK(invoke({"bernoulli-exact", "--rho", "0.6"}).code == 1);
    CHECK(invoke({"bernoulli-exact", "--rho", "abc"}).code == 1);
    CHECK(invoke({"bernoulli-exact", "--m", "7"}).code == 1);
    CHECK(invoke({"normal", "--m", "13"}).code == 1);
    CHECK(invoke({"sweep", "--chain", "gibbs"}).code == 1);
    CHECK(invoke({"verify", "--mutate", "nonsense"}).code == 1);
    CHECK(invoke({"--help"}).code == 0);
  }

  TEST_CASE("sweep with an empty range prints only the header") {
    const auto r = invoke({"sweep", "--m-min", "10", "--m-max", "4"});
    CHECK(r.code == 0);
    CHECK(r.out == "rho,m,dominant\n");
    const auto fs = invoke({"sweep", "--rho", "0.1", "--m-min", "2", "--m-max", "2", "--chain", "fs"});
    CHECK(fs.out.find("0.10000000000000001,2,0.1023999") != std::string::npos);
  }

  TEST_CASE("normal writes a curve and a manifest that replays identically") {
    const auto dir = scratch_dir("normal");
    const auto r = invoke({"normal", "--dataset", "2", "--m", "1,2", "--row-samples", "300", "--seed", "4",
                           "--dump-matrices", "--out", dir.string()});
    REQUIRE(r.code == 0);
    const std::string curve = slurp(dir / "normal_curve.csv");
    CHECK(curve.rfind("m,variant,lambda_hat,seed,N\n", 0) == 0);
    CHECK(fs::exists(dir / "matrix_m2_fs.txt"));
    const std::string manifest = slurp(dir / "manifest.json");
    CHECK(manifest.find("\"seed\": 4") != std::string::npos);
    CHECK(manifest.find("normal_curve.csv") != std::string::npos);

    const auto again = scratch_dir("normal_again");
    CHECK(invoke({"replay", (dir / "manifest.json").string(), "--out", again.string()}).code == 0);
    CHECK(slurp(again / "normal_curve.csv") == curve);
    CHECK(slurp(again / "matrix_m2_fs.txt") == slurp(dir / "matrix_m2_fs.txt"));
  }

  TEST_CASE("simulate is reproducible") {
    const auto a = scratch_dir("sim_a");
    const auto b = scratch_dir("sim_b");
    for (const auto& d : {a, b})
      REQUIRE(invoke({"simulate", "--iters", "20000", "--seed", "8", "--chain", "fs", "--out", d.string()}).code == 0);
    CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
    CHECK(slurp(a / "sojourn.json") == slurp(b / "sojourn.json"));
    const auto n = invoke({"simulate", "--model", "normal", "--iters", "5", "--seed", "2"});
    CHECK(n.code == 0);
    CHECK(n.out.rfind("iteration,mu1,mu2,tau2_1,tau2_2,p\n", 0) == 0);
    CHECK(invoke({"simulate", "--model", "potts"}).code == 1);
  }

  TEST_CASE("verify passes and the injected defect is named") {
    const auto ok = invoke({"verify"});
    CHECK(ok.code == 0);
    const auto bad = invoke({"verify", "--mutate", "lambda2-sign"});
    CHECK(bad.code == 3);
    CHECK(bad.out.find("FAIL  closed-form vs numeric spectrum") != std::string::npos);
  }

  TEST_CASE("permute") {
    const auto r = invoke({"permute", "--state", "33413343", "--perm", "(1324)"});
    CHECK(r.out == "22132212\n");
    const auto o = invoke({"permute", "--state", "121", "--k", "3", "--orbit"});
    CHECK(o.out.find("orbit size 6") != std::string::npos);
  }
}
