// Drives the latgauss binary end to end through the shell.
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

const fs::path& workdir() {
  static const fs::path d = [] {
    fs::path p = fs::temp_directory_path() / ("latgauss_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return d;
}

Run cli(const std::string& args) {
  const std::string cmd = std::string(LATGAUSS_CLI) + " " + args + " 2>&1";
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t k = std::fread(buf, 1, sizeof buf, p)) out.append(buf, k);
  const int status = ::pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string path(const std::string& name) { return (workdir() / name).string(); }

void write(const std::string& name, const std::string& text) { std::ofstream(path(name)) << text; }

std::string slurp(const std::string& name) {
  std::ifstream in(path(name));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("gen-lattice, preprocess, decode") {
  REQUIRE(cli("gen-lattice --kind random-integer --n 3 --bound 5 --seed 4 --out " + path("b.lat")).code == 0);
  const auto pre = cli("preprocess --lattice " + path("b.lat") + " --eps 1e-3 --seed 2 --out " + path("b.adv"));
  REQUIRE(pre.code == 0);
  CHECK(pre.out.find("iterations=") != std::string::npos);

  // A lattice point decodes to itself.
  const auto g = cli("gen-lattice --kind integer-identity --n 3 --out " + path("z.lat"));
  REQUIRE(g.code == 0);
  REQUIRE(cli("preprocess --lattice " + path("z.lat") + " --eps 1e-3 --out " + path("z.adv")).code == 0);
  const auto d = cli("decode --advice " + path("z.adv") + " --target 1.05,-2,3/100");
  CHECK(d.code == 0);
  CHECK(d.out.find("vector: 1,-2,0") != std::string::npos);
  CHECK(d.out.find("step,norm,f_value") != std::string::npos);
}

TEST_CASE("verify flags a corrupted advice file by name") {
  REQUIRE(cli("gen-lattice --kind integer-identity --n 2 --out " + path("v.lat")).code == 0);
  REQUIRE(cli("preprocess --lattice " + path("v.lat") + " --eps 1e-3 --out " + path("v.adv")).code == 0);
  const auto good = cli("verify --advice " + path("v.adv"));
  CHECK(good.code == 0);
  CHECK(good.out.find("FAIL") == std::string::npos);

  // Perturb the last numeric token of the file; the frame identity must break.
  std::string text = slurp("v.adv");
  const auto pos = text.find_last_of("0123456789");
  REQUIRE(pos != std::string::npos);
  text[pos] = text[pos] == '7' ? '3' : '7';
  write("bad.adv", text);
  const auto bad = cli("verify --advice " + path("bad.adv"));
  CHECK(bad.code != 0);
  CHECK(bad.out.find("FAIL decoder.frame-identity[" + path("bad.adv") + "]") != std::string::npos);
}

TEST_CASE("experiment writes CSV and reports verdicts through the exit code") {
  write("ok.cfg", "experiment = contraction\nn = 2\ntrials = 20\neps = 1e-3\n");
  const auto ok = cli("experiment --config " + path("ok.cfg") + " --out " + path("ok.csv"));
  CHECK(ok.code == 0);
  CHECK(ok.out.find("PASS contraction-quarter") != std::string::npos);
  CHECK(slurp("ok.csv").rfind("config_hash,seed,fixture,trial", 0) == 0);

  // Same config, different thread count: same bytes.
  REQUIRE(cli("experiment --config " + path("ok.cfg") + " --threads 2 --out " + path("ok2.csv")).code == 0);
  CHECK(slurp("ok.csv") == slurp("ok2.csv"));

  write("bad.cfg", "experiment = contraction\ntrialz = 3\n");
  const auto bad = cli("experiment --config " + path("bad.cfg"));
  CHECK(bad.code == 3);
  CHECK(bad.out.find("trialz") != std::string::npos);
}

TEST_CASE("reduce runs against the exact oracle") {
  REQUIRE(cli("gen-lattice --kind random-integer --n 3 --bound 4 --seed 5 --out " + path("r.lat")).code == 0);
  const auto r = cli("reduce kannan --lattice " + path("r.lat") + " --target 1/2,1/3,5/4");
  CHECK(r.code == 0);
  CHECK(r.out.find("oracle_dist:") != std::string::npos);
}

TEST_CASE("usage errors") {
  CHECK(cli("").code != 0);
  CHECK(cli("gen-lattice --kind hexagonal").code == 3);
  CHECK(cli("decode --advice /nonexistent/x.adv --target 0").code == 3);
}
