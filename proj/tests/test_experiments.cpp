#include "doctest.h"
#include "latgauss/experiments.hpp"
#include "latgauss/gaussian.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

using namespace latgauss;

namespace {

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto c = ExperimentConfig::parse_text(
      "# comment\n"
      "experiment = contraction\n"
      "  eps = 1/1000   # trailing comment\n"
      "trials=7\n"
      "n_values = 6, 8,10\n");
  CHECK(c.experiment() == ExperimentKind::Contraction);
  CHECK(c.real("eps", 0) == doctest::Approx(1e-3));
  CHECK(c.count("trials", 0) == 7);
  CHECK(c.count("fixtures", 3) == 3);
  CHECK(c.counts("n_values", {}) == std::vector<std::uint64_t>{6, 8, 10});
  CHECK(c.seed() == 1);

  CHECK_THROWS_AS(ExperimentConfig::parse_text("trials = 3\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse_text("experiment = nope\n"), ConfigError);
  try {
    ExperimentConfig::parse_text("experiment = contraction\ntrials 3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK_THROWS_AS(ExperimentConfig::parse_text("experiment = contraction\nn = 2\nn = 3\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse_text("experiment = contraction\ntrials = -1\n").count("trials", 0),
                  ConfigError);
  auto bad = ExperimentConfig::make(ExperimentKind::Contraction, {{"trailz", "3"}});
  CHECK_THROWS_AS(run_experiment(bad), ConfigError);
}

TEST_CASE("config hash: canonical, order-free, ignores threads") {
  const auto a = ExperimentConfig::parse_text("experiment = contraction\nn = 2\ntrials = 5\n");
  const auto b = ExperimentConfig::parse_text("trials=5\n# x\nn=2\nexperiment=contraction\nthreads = 4\n");
  const auto c = ExperimentConfig::parse_text("experiment = contraction\nn = 3\ntrials = 5\n");
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.hash_hex().size() == 16);
  // FNV-1a reference values
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(derive_seed(1, "x") != derive_seed(1, "y"));
  CHECK(derive_seed(1, "x") == derive_seed(1, "x"));
}

TEST_CASE("zero trials give the header only") {
  for (auto [kind, key] : std::vector<std::pair<ExperimentKind, std::string>>{
           {ExperimentKind::Contraction, "trials"}, {ExperimentKind::DecodeSuccess, "trials"},
           {ExperimentKind::ReductionAudit, "trials"}}) {
    const auto r = run_experiment(ExperimentConfig::make(kind, {{key, "0"}, {"n", "2"}}));
    CHECK(r.rows == 0);
    CHECK(count_lines(r.csv) == 1);
    CHECK(r.csv.rfind("config_hash,seed,", 0) == 0);
  }
}

TEST_CASE("output is byte-identical across thread counts") {
  const std::vector<ExperimentConfig> configs{
      ExperimentConfig::make(ExperimentKind::Contraction, {{"n", "3"}, {"trials", "40"}, {"eps", "1e-3"}}),
      ExperimentConfig::make(ExperimentKind::DecodeSuccess, {{"n", "3"}, {"trials", "30"}, {"eps", "1e-3"}}),
      ExperimentConfig::make(ExperimentKind::ReductionAudit, {{"reduction", "kannan"}, {"n", "4"}, {"trials", "20"}})};
  for (auto c : configs) {
    c.set("threads", "1");
    const auto one = run_experiment(c);
    c.set("threads", "3");
    const auto three = run_experiment(c);
    CHECK(one.csv == three.csv);
    CHECK(one.rows > 0);
    // every row leads with the config hash
    std::istringstream in(one.csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) CHECK(line.rfind(c.hash_hex() + ",", 0) == 0);
  }
}

TEST_CASE("parallel_for visits every index once and forwards exceptions") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h == 1);
  CHECK_THROWS(parallel_for(10, 3, [](std::size_t i) {
    if (i == 5) throw std::runtime_error("boom");
  }));
}

TEST_CASE("quantile99 is the ceil(0.99 m)-th order statistic") {
  std::vector<Real> xs;
  for (int i = 100; i >= 1; --i) xs.push_back(i);
  CHECK(quantile99(xs) == 99);
  xs.push_back(101);
  CHECK(quantile99(xs) == 100);  // ceil(99.99) = 100
  CHECK(quantile99({5}) == 5);
  CHECK(std::isnan(quantile99({})));
}

TEST_CASE("uniform_in_ball stays inside and fills the radius") {
  Rng rng(3, 0);
  Real maxn = 0;
  for (int i = 0; i < 2000; ++i) {
    const RealVec v = uniform_in_ball(rng, 4, 2);
    CHECK(v.size() == 4);
    CHECK(v.norm() <= 2);
    maxn = std::max(maxn, v.norm());
  }
  CHECK(maxn > 1.9);
}

TEST_CASE("checkerboard closed form agrees with a direct coset sum") {
  // rho(D_n + e1) / rho(D_n), by brute force over the box [-6, 6]^n
  for (std::size_t n : {2u, 3u}) {
    Real even = 0, odd = 0;
    std::vector<int> z(n, -6);
    for (;;) {
      Real r2 = 0;
      int sum = 0;
      for (int x : z) r2 += Real(x) * x, sum += x;
      (std::abs(sum) % 2 == 0 ? even : odd) += std::exp(-kPi * r2);
      std::size_t i = 0;
      while (i < n && ++z[i] > 6) z[i++] = -6;
      if (i == n) break;
    }
    CHECK(static_cast<double>(checkerboard_f_e1(n)) == doctest::Approx(static_cast<double>(odd / even)).epsilon(1e-12));
    const auto d = generate_lattice({GeneratorKind::Checkerboard, n}, 1);
    RealVec e1 = RealVec::Zero(static_cast<Eigen::Index>(n));
    e1(0) = 1;
    CHECK(static_cast<double>(periodic_f(d, e1, 1e-12L).value) ==
          doctest::Approx(static_cast<double>(odd / even)).epsilon(1e-10));
  }
}

TEST_CASE("local-maxima at n = 7 and 8 reproduces the closed form") {
  const auto r = run_experiment(ExperimentConfig::make(ExperimentKind::LocalMaxima, {{"n_values", "7,8"}}));
  CHECK(r.rows == 2);
  for (const auto& v : r.verdicts)
    if (v.name.rfind("value-near-one", 0) != 0) CHECK_MESSAGE(v.passed, v.name << ": " << v.detail);
  CHECK(static_cast<double>(checkerboard_f_e1(7)) == doctest::Approx(0.5417).epsilon(1e-3));
  // theta_3(i)^4 = 2 theta_2(i)^4 (Jacobi, with theta_2(i) = theta_4(i)) makes n = 8 exactly 3/5.
  CHECK(static_cast<double>(checkerboard_f_e1(8)) == doctest::Approx(0.6).epsilon(1e-15));
}
