#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "dyadic/serialize.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    fs::path p = fs::temp_directory_path() / ("dyadic_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(f), {});
}

struct Result {
  int code;
  std::string out;
};

Result lab(const std::string& args, const std::string& env = "") {
  const fs::path log = scratch() / "stdout.txt";
  const std::string cmd = env + " \"" DYADIC_LAB_PATH "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(log)};
}

std::string out_dir(const std::string& name) { return "--out \"" + (scratch() / name).string() + "\" "; }

}  // namespace

TEST_CASE("perturb then verify, and a tampered certificate") {
  const auto r = lab(out_dir("perturb") + "perturb --t0 baker:16 --m 1 --eps 1/32 --A rand:1/2:1 --B rand:1/2:2");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("certified") != std::string::npos);
  const fs::path cert = scratch() / "perturb" / "certificate.json";
  REQUIRE(fs::exists(cert));
  REQUIRE(fs::exists(scratch() / "perturb" / "manifest.json"));

  const auto ok = lab(out_dir("verify") + "verify --certificate \"" + cert.string() + "\"");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("certificate verified") != std::string::npos);

  // Flip one cell of B: the recorded intersection no longer matches.
  dyadic::Json j = dyadic::Json::parse(slurp(cert));
  std::string hex = j["b"]["hex"];
  hex[0] = hex[0] == '0' ? '1' : '0';
  j["b"]["hex"] = hex;
  const fs::path tampered = scratch() / "tampered.json";
  std::ofstream(tampered) << j.dump();
  const auto bad = lab(out_dir("tampered") + "verify --certificate \"" + tampered.string() + "\"");
  CHECK(bad.code == 1);
  CHECK(bad.out.find("violation: bound_lhs mismatch") != std::string::npos);
}

TEST_CASE("whirly on the snapped third writes a none row") {
  const auto r = lab(out_dir("whirly") + "whirly --t rot:1/3:10 --m 1 --no-zero");
  CHECK(r.code == 1);
  const std::string csv = slurp(scratch() / "whirly" / "whirly.csv");
  CHECK(csv.rfind("generator,A,B,m,n,defect,intersection\n", 0) == 0);
  CHECK(csv.find(",none,,") != std::string::npos);
}

TEST_CASE("exit codes for bad input and resource caps") {
  CHECK(lab(out_dir("bad") + "whirly --t spin:3").code == 2);
  CHECK(lab(out_dir("bad") + "whirly --t baker:8 --A \"[0,1/3)\"").code == 2);
  CHECK(lab(out_dir("bad") + "rigidity").code == 2);
  CHECK(lab(out_dir("cap") + "--resolution-cap 8 rigidity --t baker:12 --m 1").code == 3);
  CHECK(lab(out_dir("cap") + "rigidity --t baker:12 --m 1", "DYADIC_RESOLUTION_CAP=8").code == 3);
  CHECK(lab(out_dir("cap") + "rigidity --t baker:8 --m 1 --max-power 300", "DYADIC_RESOLUTION_CAP=8").code <= 1);
}

TEST_CASE("json config supplies missing flags") {
  const fs::path config = scratch() / "config.json";
  std::ofstream(config) << R"({"t": "shift:1:4", "alpha": "1/5", "m": 2, "eps": "1/10", "max-power": 200})";
  const auto r = lab(out_dir("skew") + "skew --config \"" + config.string() + "\"");
  CHECK(r.code == 0);
  CHECK(r.out.find("80") != std::string::npos);
  const auto manifest = dyadic::Json::parse(slurp(scratch() / "skew" / "manifest.json"));
  CHECK(manifest["subcommand"] == "skew");
  CHECK(manifest["exit_code"] == 0);
  // Flags on the command line win over the file.
  const auto r2 = lab(out_dir("skew2") + "skew --config \"" + config.string() + "\" --alpha 1/3");
  CHECK(r2.out.find("48") != std::string::npos);
}

TEST_CASE("cleanup") { fs::remove_all(scratch()); }
