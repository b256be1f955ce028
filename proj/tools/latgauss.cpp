#include "latgauss/verify.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace latgauss;

namespace {

RationalVector parse_target(const std::string& text) {
  RationalVector t;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw DomainError("empty target coordinate");
    t.push_back(parse_rational(item.substr(b, e - b + 1)));
  }
  return t;
}

std::string join(const RationalVector& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_rational(v[i]);
  return s;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

void print_verdicts(const std::vector<Verdict>& vs, std::ostream& os) {
  for (const auto& v : vs) os << (v.passed ? "PASS " : "FAIL ") << v.name << (v.detail.empty() ? "" : "  " + v.detail) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice decoding by gradient ascent on the periodic Gaussian"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-lattice", "write a generated lattice basis");
  std::string gen_kind = "random-integer", gen_out;
  std::size_t gen_n = 4;
  long long gen_bound = 10;
  std::uint64_t gen_seed = 1;
  gen->add_option("--kind", gen_kind, "integer-identity | checkerboard | random-integer | random-dual-orthogonal");
  gen->add_option("--n", gen_n, "rank")->check(CLI::PositiveNumber);
  gen->add_option("--bound", gen_bound, "entry bound B");
  gen->add_option("--seed", gen_seed);
  gen->add_option("--out", gen_out, "output file (stdout if omitted)");

  auto* pre = app.add_subcommand("preprocess", "sample dual advice and build the decoder frame");
  std::string pre_lattice, pre_out;
  Real pre_eps = 1e-4L;
  std::size_t pre_N = 0;
  std::uint64_t pre_seed = 1;
  pre->add_option("--lattice", pre_lattice)->required();
  pre->add_option("--eps", pre_eps);
  pre->add_option("--n-advice", pre_N, "advice size N (0: ceil(2 n log(1/eps) / sqrt(eps)))");
  pre->add_option("--seed", pre_seed);
  pre->add_option("--out", pre_out)->required();

  auto* dec = app.add_subcommand("decode", "decode one target with stored advice");
  std::string dec_advice, dec_target;
  dec->add_option("--advice", dec_advice)->required();
  dec->add_option("--target", dec_target, "comma separated coordinates")->required();

  auto* red = app.add_subcommand("reduce", "run a reduction on one target");
  std::string red_kind, red_lattice, red_target, red_inner = "oracle";
  Real red_alpha = 0.5L, red_tau = 1, red_g = 1;
  std::size_t red_h = 0, red_trials = 100;
  std::uint64_t red_seed = 1;
  red->add_option("kind", red_kind, "kannan | master | promise | sparsify")
      ->required()
      ->check(CLI::IsMember({"kannan", "master", "promise", "sparsify"}));
  red->add_option("--lattice", red_lattice)->required();
  red->add_option("--target", red_target)->required();
  red->add_option("--alpha", red_alpha, "promise parameter of the inner solver");
  red->add_option("--tau", red_tau, "sparsification radius factor");
  red->add_option("--inner", red_inner)->check(CLI::IsMember({"oracle", "bdd"}));
  red->add_option("--trials", red_trials, "sparsification trials");
  red->add_option("--seed", red_seed);
  red->add_option("--master-g", red_g, "master scheme: index gap g");
  red->add_option("--master-h", red_h, "master scheme: block overlap h");

  auto* exp = app.add_subcommand("experiment", "run one experiment config, write CSV");
  std::string exp_config, exp_out;
  std::size_t exp_threads = 0;
  exp->add_option("--config", exp_config)->required();
  exp->add_option("--out", exp_out, "CSV file (stdout if omitted)");
  exp->add_option("--threads", exp_threads, "worker threads (overrides the config)");

  auto* ver = app.add_subcommand("verify", "check every module invariant at desk scale");
  VerifyOptions vopts;
  ver->add_option("--advice", vopts.advice_path, "also check the frame identity of this advice file");
  ver->add_option("--seed", vopts.seed);
  ver->add_option("--threads", vopts.threads);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      std::ostringstream os;
      write_lattice(os, generate_lattice({parse_generator_kind(gen_kind), gen_n, gen_bound}, gen_seed));
      write_text(gen_out, os.str());
    } else if (*pre) {
      const LatticeBasis B = read_lattice_file(pre_lattice);
      std::size_t N = pre_N;
      if (N == 0)
        N = static_cast<std::size_t>(
            std::ceil(2 * static_cast<Real>(B.rank()) * std::log(1 / pre_eps) / std::sqrt(pre_eps)));
      const DecoderAdvice a = preprocess(B, pre_eps, N, pre_seed);
      write_decoder_advice_file(pre_out, a);
      std::printf("N=%zu scale=%.12Lg iterations=%zu radius=%.12Lg\n", N, a.scale, a.iterations, decoding_radius(a));
    } else if (*dec) {
      const DecoderAdvice a = read_decoder_advice_file(dec_advice);
      const DecodeResult r = decode(a, parse_target(dec_target));
      std::cout << "vector: " << join(r.vector) << '\n'
                << "status: " << to_string(r.status) << '\n'
                << "iterations: " << r.iterations_run << '\n'
                << "step,norm,f_value\n";
      for (std::size_t k = 0; k < r.trace.size(); ++k) {
        std::printf("%zu,%.12Lg,", k, r.trace[k].norm);
        if (std::isnan(r.trace[k].f_value))
          std::printf("nan\n");
        else
          std::printf("%.12Lg\n", r.trace[k].f_value);
      }
      return r.status == DecodeStatus::ExactClaimed ? 0 : 2;
    } else if (*red) {
      const LatticeBasis B = read_lattice_file(red_lattice);
      const RationalVector t = parse_target(red_target);
      std::unique_ptr<InnerSolver> inner;
      if (red_inner == "oracle")
        inner = std::make_unique<ExactInner>();
      else
        inner = std::make_unique<BddInner>(bdd_param_plan(red_alpha, B.rank()).eps, 2, red_seed);
      RationalVector y;
      Rational d2;
      bool found = false;
      if (red_kind == "sparsify") {
        SparsifyOptions o;
        o.trials = red_trials;
        const SparsifyResult r = sparsify_reduce(B, t, red_tau, *inner, red_seed, o);
        found = r.found;
        y = r.vector;
        d2 = r.dist2;
        std::cout << "trials: " << r.trials_run << " inner_failures: " << r.inner_failures << '\n';
      } else {
        ReductionResult r;
        if (red_kind == "kannan")
          r = kannan_reduce(B, t, *inner);
        else if (red_kind == "master")
          r = master_reduce(master_preprocess(B, red_g, red_h, *inner), t);
        else
          r = cvp_promise_reduce(B, t, *inner);
        found = r.found;
        y = r.vector;
        d2 = r.dist2;
      }
      if (!found) {
        std::cout << "status: not-found\n";
        return 2;
      }
      std::printf("vector: %s\ndist: %.12Lg\n", join(y).c_str(), std::sqrt(to_real(d2)));
      std::printf("oracle_dist: %.12Lg\n", std::sqrt(to_real(dist2_to_lattice(B, t))));
    } else if (*exp) {
      ExperimentConfig c = ExperimentConfig::parse_file(exp_config);
      if (exp_threads > 0) c.set("threads", std::to_string(exp_threads));
      const ExperimentReport r = run_experiment(c);
      write_text(exp_out, r.csv);
      print_verdicts(r.verdicts, std::cerr);
      return r.passed() ? 0 : 1;
    } else if (*ver) {
      const auto vs = verify_suite(vopts);
      print_verdicts(vs, std::cout);
      std::size_t fails = 0;
      for (const auto& v : vs) fails += !v.passed;
      std::cout << vs.size() - fails << " of " << vs.size() << " properties hold\n";
      return fails == 0 ? 0 : 1;
    }
  } catch (const BudgetExceededError& e) {
    std::cerr << "error: " << e.what() << " (partial count " << e.partial_count()
              << "; raise LATGAUSS_BUDGET to continue)\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
