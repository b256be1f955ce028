#include "latgauss/experiments.hpp"
#include "latgauss/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

namespace latgauss {

bool ExperimentReport::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < std::min(threads, count); ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

RealVec uniform_in_ball(Rng& rng, std::size_t n, Real radius) {
  RealVec v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const Real u1 = 1 - rng.uniform();  // in (0, 1]
    const Real u2 = rng.uniform();
    v(i) = std::sqrt(-2 * std::log(u1)) * std::cos(2 * kPi * u2);
  }
  const Real len = v.norm();
  if (len == 0) return v;
  return v * (radius * std::pow(rng.uniform(), Real(1) / static_cast<Real>(n)) / len);
}

Real quantile99(std::vector<Real> xs) {
  if (xs.empty()) return std::numeric_limits<Real>::quiet_NaN();
  const std::size_t k = static_cast<std::size_t>(std::ceil(0.99L * static_cast<Real>(xs.size()))) - 1;
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(k), xs.end());
  return xs[k];
}

Real checkerboard_f_e1(std::size_t n) {
  Real z = 0, h = 0;
  for (int k = -30; k <= 30; ++k) {
    z += std::exp(-kPi * k * k);
    h += std::exp(-kPi * (k + 0.5L) * (k + 0.5L));
  }
  const Real zn = std::pow(z, static_cast<Real>(n)), hn = std::pow(h, static_cast<Real>(n));
  return (zn - hn) / (zn + hn);
}

namespace {

std::string fmt(Real x) {
  if (std::isnan(x)) return "nan";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12Lg", x);
  return buf;
}

std::string fmt_count(std::uint64_t x) { return std::to_string(x); }

class Csv {
 public:
  Csv(const ExperimentConfig& c, const std::vector<std::string>& columns)
      : prefix_(c.hash_hex() + "," + std::to_string(c.seed())) {
    text_ = "config_hash,seed";
    for (const auto& col : columns) text_ += "," + col;
    text_ += "\n";
  }
  void row(const std::vector<std::string>& cells) {
    text_ += prefix_;
    for (const auto& cell : cells) text_ += "," + cell;
    text_ += "\n";
    ++rows_;
  }
  ExperimentReport report(std::vector<Verdict> verdicts) const {
    ExperimentReport r;
    r.csv = text_;
    r.rows = rows_;
    r.verdicts = std::move(verdicts);
    return r;
  }

 private:
  std::string prefix_;
  std::string text_;
  std::size_t rows_ = 0;
};

std::size_t threads_of(const ExperimentConfig& c) { return c.count("threads", 1); }

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

RationalVector random_rational_target(Rng& rng, std::size_t m, std::int64_t range, std::int64_t den) {
  RationalVector t(m);
  for (auto& x : t) x = Rational(uniform_int(rng, -range * den, range * den), den);
  return t;
}

RealVec unit_direction(Rng& rng, std::size_t n) {
  for (;;) {
    RealVec v = uniform_in_ball(rng, n, 1);
    if (v.norm() > 0) return v / v.norm();
  }
}

std::string rate(std::size_t hits, std::size_t total) {
  return fmt_count(hits) + "/" + fmt_count(total) + " = " +
         fmt(total ? static_cast<Real>(hits) / static_cast<Real>(total) : Real(0));
}

Real certified_step_error(const Derivatives& d) {
  const Real f = d.value.value, bf = d.value.truncation_bound, bg = d.gradient.truncation_bound;
  if (!(f > bf)) return std::numeric_limits<Real>::infinity();
  return (bg + d.gradient.value.norm() * bf / f) / (2 * kPi * (f - bf));
}

// Rounding allowance for long double evaluation of the step residual.
constexpr Real kRoundingSlack = 1e-15L;

// ---------------------------------------------------------------- decode-success

ExperimentReport decode_success(const ExperimentConfig& c) {
  c.require_known({"lattice", "n", "bound", "eps", "N", "advice_c", "trials", "radius_fraction", "coefficient_range"});
  const auto spec = c.lattice(GeneratorKind::RandomInteger, 4);
  const Real eps = c.real("eps", 1e-4L);
  const std::size_t trials = c.count("trials", 100);
  const Real fraction = c.real("radius_fraction", 0.9L);
  const auto range = static_cast<std::int64_t>(c.count("coefficient_range", 3));
  Csv csv(c, {"trial", "offset_norm", "radius", "status", "iterations", "final_norm", "matches_oracle"});
  if (trials == 0) return csv.report({});

  const std::uint64_t seed = c.seed();
  const LatticeBasis B = generate_lattice(spec, derive_seed(seed, "lattice"));
  const std::size_t n = B.rank();
  const std::size_t N =
      c.has("N") ? c.count("N", 0)
                 : static_cast<std::size_t>(std::ceil(c.real("advice_c", 2) * static_cast<Real>(n) *
                                                      std::log(1 / eps) / std::sqrt(eps)));
  const DecoderAdvice a = preprocess(B, eps, N, derive_seed(seed, "advice"));
  const Real R = decoding_radius(a);

  struct Row {
    Real offset = 0, final_norm = 0;
    DecodeStatus status = DecodeStatus::ExactClaimed;
    std::size_t iterations = 0;
    bool match = false;
  };
  std::vector<Row> rows(trials);
  const std::uint64_t tseed = derive_seed(seed, "targets");
  parallel_for(trials, threads_of(c), [&](std::size_t i) {
    Rng rng(tseed, i);
    Coefficients x(n);
    for (auto& xi : x) xi = uniform_int(rng, -range, range);
    const RealVec e = uniform_in_ball(rng, B.ambient_dim(), fraction * R);
    const RationalVector t = add(B.combine(x), to_rational(e));
    const DecodeResult d = decode(a, t);
    Row& r = rows[i];
    r.offset = e.norm();
    r.status = d.status;
    r.iterations = d.iterations_run;
    r.final_norm = d.trace.empty() ? Real(0) : d.trace.back().norm;
    r.match = d.vector == cvp_oracle(B, t);
  });
  std::size_t hits = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const Row& r = rows[i];
    hits += r.match;
    csv.row({fmt_count(i), fmt(r.offset), fmt(R), to_string(r.status), fmt_count(r.iterations), fmt(r.final_norm),
             r.match ? "1" : "0"});
  }
  const Real need = c.tolerance("success_min", 0.99L);
  std::vector<Verdict> v;
  v.push_back({"frame-identity", frame_identity_holds(a), "N = " + fmt_count(N)});
  v.push_back({"decode-matches-oracle", static_cast<Real>(hits) >= need * static_cast<Real>(trials),
               rate(hits, trials) + ", need >= " + fmt(need)});
  if (c.has("tol.iterations")) {
    const auto want = static_cast<std::size_t>(c.tolerance("iterations", 0));
    v.push_back({"iteration-count", a.iterations == want,
                 "planned " + fmt_count(a.iterations) + ", expected " + fmt_count(want)});
  }
  return csv.report(std::move(v));
}

// ---------------------------------------------------------------- estimator-error

ExperimentReport estimator_error(const ExperimentConfig& c) {
  c.require_known({"lattice", "n", "bound", "eps", "N0", "octaves", "draws", "t_fraction"});
  const auto spec = c.lattice(GeneratorKind::RandomInteger, 4);
  const Real eps = c.real("eps", 1e-3L);
  const std::size_t N0 = c.count("N0", 50), octaves = c.count("octaves", 4), draws = c.count("draws", 200);
  const Real frac = c.real("t_fraction", 0.5L);
  Csv csv(c, {"N", "value_q99", "gradient_q99"});
  if (draws == 0) return csv.report({});

  const std::uint64_t seed = c.seed();
  const LatticeBasis B = generate_lattice(spec, derive_seed(seed, "lattice"));
  const Real eta = smoothing_parameter(B.dual(), eps).eta;
  const auto sd = s_eps_delta_max(eps);
  Rng trng(derive_seed(seed, "target"));
  const RealVec t = unit_direction(trng, B.ambient_dim()) * (frac * sd.delta_max * sd.s_eps);
  // rho(eta L) = 1 + eps, so the primal sum is short
  const Derivatives exact = derivatives_f_primal(B.scaled_by(to_rational(eta)), t, 1e-12L);

  std::vector<Real> qv, qg;
  const std::uint64_t aseed = derive_seed(seed, "advice");
  for (std::size_t o = 0; o <= octaves; ++o) {
    const std::size_t N = N0 << o;
    std::vector<Real> ev(draws), eg(draws);
    parallel_for(draws, threads_of(c), [&](std::size_t d) {
      const AdviceW a = generate_advice(B, eps, N, Rng(aseed, o * draws + d)(), eta, eta);
      const EstimatorPoint p = evaluate_f_W(a, t);
      ev[d] = std::abs(p.value - exact.value.value);
      eg[d] = (p.gradient - exact.gradient.value).norm() / t.norm();
    });
    qv.push_back(quantile99(ev));
    qg.push_back(quantile99(eg));
    csv.row({fmt_count(N), fmt(qv.back()), fmt(qg.back())});
  }
  auto decreasing = [](const std::vector<Real>& q) {
    for (std::size_t i = 1; i < q.size(); ++i)
      if (!(q[i] < q[i - 1])) return false;
    return true;
  };
  std::vector<Verdict> v;
  v.push_back({"value-error-q99-decreasing", decreasing(qv), "reference certified to " + fmt(exact.value.truncation_bound)});
  v.push_back({"gradient-error-q99-decreasing", decreasing(qg),
               "reference certified to " + fmt(exact.gradient.truncation_bound)});
  return csv.report(std::move(v));
}

// ---------------------------------------------------------------- contraction

ExperimentReport contraction(const ExperimentConfig& c) {
  c.require_known({"lattice", "n", "bound", "eps", "trials", "fixtures"});
  const auto spec = c.lattice(GeneratorKind::RandomInteger, 4);
  const Real eps = c.real("eps", 1e-3L);
  const std::size_t trials = c.count("trials", 200), fixtures = c.count("fixtures", 1);
  Csv csv(c, {"fixture", "trial", "t_norm", "residual", "quarter_bound", "certified_error", "ok"});
  if (trials == 0 || fixtures == 0) return csv.report({});

  const std::uint64_t seed = c.seed();
  const auto sd = s_eps_delta_max(eps);
  const Real R = sd.delta_max * sd.s_eps;
  struct Row {
    Real t_norm, residual, cert;
    bool ok;
  };
  std::size_t failures = 0, total = 0;
  Real worst = 0;
  for (std::size_t f = 0; f < fixtures; ++f) {
    const LatticeBasis B = generate_lattice(spec, Rng(derive_seed(seed, "lattice"), f)());
    // rho(scale * L) = 1 + eps for scale = eta_eps(L*)
    const LatticeBasis S = B.scaled_by(to_rational(smoothing_parameter(B.dual(), eps).eta));
    std::vector<Row> rows(trials);
    const std::uint64_t tseed = derive_seed(seed, "targets");
    parallel_for(trials, threads_of(c), [&](std::size_t i) {
      Rng rng(tseed, f * trials + i);
      // every fourth target sits on the boundary sphere
      const RealVec t = i % 4 == 0 ? RealVec(unit_direction(rng, S.ambient_dim()) * R)
                                   : uniform_in_ball(rng, S.ambient_dim(), R);
      const Derivatives d = derivatives_f_primal(S, t, 1e-12L);
      const RealVec e = d.gradient.value / (2 * kPi * d.value.value) + t;
      const Real cert = certified_step_error(d) + kRoundingSlack * (1 + t.norm());
      rows[i] = {t.norm(), e.norm(), cert, e.norm() <= t.norm() / 4 + cert};
    });
    for (std::size_t i = 0; i < trials; ++i) {
      const Row& r = rows[i];
      failures += !r.ok;
      ++total;
      if (r.t_norm > 0) worst = std::max(worst, r.residual / r.t_norm);
      csv.row({fmt_count(f), fmt_count(i), fmt(r.t_norm), fmt(r.residual), fmt(r.t_norm / 4), fmt(r.cert),
               r.ok ? "1" : "0"});
    }
  }
  return csv.report({{"contraction-quarter", failures == 0,
                      fmt_count(failures) + " failures in " + fmt_count(total) + ", worst residual/|t| = " + fmt(worst)}});
}

// ---------------------------------------------------------------- reduction-audit

std::unique_ptr<InnerSolver> make_inner(const ExperimentConfig& c, const std::string& fallback, Real adv_alpha,
                                        std::size_t top_rank) {
  const std::string kind = c.text("inner", fallback);
  if (kind == "oracle") return std::make_unique<ExactInner>();
  if (kind == "adversary")
    return std::make_unique<PromiseAdversaryInner>(c.real("adversary_alpha", adv_alpha), c.real("gamma", 1));
  if (kind == "bdd") {
    const Real alpha = c.real("bdd_alpha", 0.15L);
    return std::make_unique<BddInner>(bdd_param_plan(alpha, top_rank).eps, c.real("bdd_c", 2),
                                      derive_seed(c.seed(), "bdd"));
  }
  throw ConfigError("unknown inner solver '" + kind + "' (oracle | adversary | bdd)");
}

ExperimentReport reduction_audit(const ExperimentConfig& c) {
  c.require_known({"reduction", "inner", "alpha", "gamma", "adversary_alpha", "bdd_alpha", "bdd_c", "g", "h",
                   "lattice", "n", "bound", "trials", "target_range"});
  const auto spec = c.lattice(GeneratorKind::RandomInteger, 6);
  const std::string reduction = c.text("reduction", "kannan");
  if (reduction != "kannan" && reduction != "master" && reduction != "promise")
    throw ConfigError("unknown reduction '" + reduction + "' (kannan | master | promise)");
  const Real alpha = c.real("alpha", 0.5L), gamma = c.real("gamma", 1), g = c.real("g", 1);
  const std::size_t h = c.count("h", 0), trials = c.count("trials", 50), n = spec.n;
  const auto trange = static_cast<std::int64_t>(c.count("target_range", 10));
  Csv csv(c, {"trial", "dist", "output_dist", "factor", "bound", "total_dim", "ok"});
  if (trials == 0) return csv.report({});

  const auto inner = make_inner(c, "oracle", reduction == "promise" ? 1 : alpha, n);
  Real bound = 0;
  if (reduction == "kannan")
    bound = kannan_gamma_prime(n, alpha, [&](std::size_t) { return gamma; });
  else if (reduction == "master")
    bound = master_gamma_prime(n, g, alpha);
  else
    bound = gamma * std::sqrt(static_cast<Real>(n) + 3) / 2;
  // long double rounding of the bound itself
  const Rational bound2 = to_rational(bound * bound * (1 + 1e-15L));

  struct Row {
    Real dist = 0, out = 0;
    std::size_t dim = 0;
    bool ok = false, dim_ok = true;
  };
  std::vector<Row> rows(trials);
  const std::uint64_t lseed = derive_seed(c.seed(), "lattice"), tseed = derive_seed(c.seed(), "targets");
  parallel_for(trials, threads_of(c), [&](std::size_t i) {
    const LatticeBasis B = generate_lattice(spec, Rng(lseed, i)());
    Rng trng(tseed, i);
    const RationalVector t = random_rational_target(trng, B.ambient_dim(), trange, 64);
    ReductionResult r;
    Row& row = rows[i];
    if (reduction == "kannan") {
      r = kannan_reduce(B, t, *inner);
    } else if (reduction == "master") {
      const MasterAdvice m = master_preprocess(B, g, h, *inner);
      r = master_reduce(m, t);
      row.dim = m.total_dimension();
      row.dim_ok = h == 0 ? row.dim == n : row.dim <= n * (h + 1);
    } else {
      r = cvp_promise_reduce(B, t, *inner);
    }
    const Rational d2 = dist2_to_lattice(B, t);
    row.dist = std::sqrt(to_real(d2));
    row.out = r.found ? std::sqrt(to_real(r.dist2)) : std::numeric_limits<Real>::infinity();
    row.ok = r.found && B.contains(r.vector) && r.dist2 <= bound2 * d2;
  });
  std::size_t fails = 0, dim_fails = 0;
  Real worst = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    const Row& r = rows[i];
    const Real factor = r.dist > 0 ? r.out / r.dist : (r.out == 0 ? Real(1) : std::numeric_limits<Real>::infinity());
    worst = std::max(worst, factor);
    fails += !r.ok;
    dim_fails += !r.dim_ok;
    csv.row({fmt_count(i), fmt(r.dist), fmt(r.out), fmt(factor), fmt(bound),
             reduction == "master" ? fmt_count(r.dim) : "", r.ok ? "1" : "0"});
  }
  std::vector<Verdict> v;
  v.push_back({reduction + "-factor", fails == 0,
               fmt_count(fails) + " of " + fmt_count(trials) + " above " + fmt(bound) + ", worst " + fmt(worst) +
                   " (inner " + inner->name() + ")"});
  if (reduction == "master")
    v.push_back({"master-dimension-sum", dim_fails == 0,
                 fmt_count(dim_fails) + " violations of " + std::string(h == 0 ? "sum = n" : "sum <= n(h+1)")});
  return csv.report(std::move(v));
}

// ---------------------------------------------------------------- sparsify-audit

ExperimentReport sparsify_audit(const ExperimentConfig& c) {
  c.require_known({"lattice", "n", "bound", "tau", "inner", "gamma", "adversary_alpha", "bdd_alpha", "bdd_c",
                   "lemma_draws", "lemma_radius", "trial_draws", "runs", "trials_per_run", "full_runs",
                   "target_range", "target_mode"});
  const auto spec = c.lattice(GeneratorKind::RandomInteger, 5);
  const Real tau = c.real("tau", 1), gamma = c.real("gamma", 1);
  const std::size_t lemma_draws = c.count("lemma_draws", 1000), trial_draws = c.count("trial_draws", 400),
                    runs = c.count("runs", 20), per_run = c.count("trials_per_run", 3000),
                    full_runs = std::min<std::size_t>(c.count("full_runs", 1), runs);
  const auto trange = static_cast<std::int64_t>(c.count("target_range", 10));
  Csv csv(c, {"section", "index", "hit", "stat"});
  if (lemma_draws + trial_draws + runs == 0) return csv.report({});

  const std::uint64_t seed = c.seed();
  const LatticeBasis input = generate_lattice(spec, derive_seed(seed, "lattice"));
  const LatticeBasis B = input.scaled_by(Rational(denominator_lcm(input)));
  const std::size_t m = B.ambient_dim();
  std::vector<Verdict> v;
  auto three_sigma = [](Real q, std::size_t draws) {
    return q + 3 * std::sqrt(q * (1 - q) / static_cast<Real>(draws));
  };

  if (lemma_draws > 0) {
    const Rational r2 = to_rational(c.real("lemma_radius", 1.5L)) * to_rational(c.real("lemma_radius", 1.5L)) *
                        lambda1_squared(B);
    const auto pts = enumerate_coefficients(B, zero_vector(m), r2);
    const std::size_t N = pts.size();
    const std::uint64_t p = next_prime(2 * N);
    const Real thresh = static_cast<Real>(N) * static_cast<Real>(p) / static_cast<Real>(p + N - 1);
    std::vector<std::pair<bool, std::size_t>> draws(lemma_draws);
    const std::uint64_t lseed = derive_seed(seed, "lemma");
    parallel_for(lemma_draws, threads_of(c), [&](std::size_t d) {
      const SparseCoset s = sparse_coset_sample(B, p, Rng(lseed, d)());
      std::set<std::uint64_t> residues;
      bool hit = false;
      for (const auto& x : pts) {
        const auto res = s.residue(x);
        residues.insert(res);
        if (res == 0 && std::any_of(x.begin(), x.end(), [](std::int64_t a) { return a != 0; })) hit = true;
      }
      draws[d] = {hit, residues.size()};
    });
    std::size_t hits = 0, small10 = 0, small25 = 0;
    for (std::size_t d = 0; d < lemma_draws; ++d) {
      hits += draws[d].first;
      const auto sz = static_cast<Real>(draws[d].second);
      small10 += sz <= 0.10L * thresh;
      small25 += sz <= 0.25L * thresh;
      csv.row({"lemma", fmt_count(d), draws[d].first ? "1" : "0", fmt_count(draws[d].second)});
    }
    const Real q = static_cast<Real>(N) / static_cast<Real>(p);
    auto frac = [&](std::size_t k) { return static_cast<Real>(k) / static_cast<Real>(lemma_draws); };
    v.push_back({"short-vector-in-sublattice <= N/p", frac(hits) <= three_sigma(q, lemma_draws),
                 rate(hits, lemma_draws) + " vs N/p = " + fmt(q) + " (N = " + fmt_count(N) + ", p = " + fmt_count(p) + ")"});
    v.push_back({"few-cosets q=0.10", frac(small10) <= three_sigma(0.10L, lemma_draws), rate(small10, lemma_draws)});
    v.push_back({"few-cosets q=0.25", frac(small25) <= three_sigma(0.25L, lemma_draws), rate(small25, lemma_draws)});
  }

  if (trial_draws + runs == 0) return csv.report(std::move(v));
  Rng trng(derive_seed(seed, "target"));
  const std::string mode = c.text("target_mode", "random");
  RationalVector t;
  if (mode == "random") {
    t = random_rational_target(trng, m, trange, 8);
  } else if (mode == "deep") {
    // half the sum of the HKZ rows plus a jitter below 1/16 per coordinate: far from
    // the lattice when the Gram-Schmidt profile is uneven
    t = zero_vector(m);
    const LatticeBasis H = hkz_basis(B);
    for (const auto& row : H.vectors()) axpy(t, Rational(1, 2), row);
    t = add(t, scaled(random_rational_target(trng, m, 1, 64), Rational(1, 16)));
  } else {
    throw ConfigError("target_mode must be random or deep");
  }
  const Rational dist2 = dist2_to_lattice(B, t);
  const Rational tau2 = to_rational(tau) * to_rational(tau);
  const Rational accept2 = to_rational(gamma) * to_rational(gamma) * (1 + tau2) * dist2;
  const std::uint64_t p = next_prime(2 * ball_count(B, tau2 * dist2));
  const auto inner = make_inner(c, "adversary", std::sqrt(1 + 1 / (tau * tau)), B.rank());
  auto success = [&](const std::optional<RationalVector>& y) { return y && norm2(sub(*y, t)) <= accept2; };

  if (trial_draws > 0) {
    std::vector<std::pair<bool, Real>> out(trial_draws);
    const std::uint64_t s0 = derive_seed(seed, "trials");
    parallel_for(trial_draws, threads_of(c), [&](std::size_t i) {
      const auto y = sparsify_trial(B, t, p, Rng(s0, i)(), *inner);
      out[i] = {success(y), y ? std::sqrt(to_real(norm2(sub(*y, t)) / dist2)) : std::numeric_limits<Real>::quiet_NaN()};
    });
    std::size_t hits = 0;
    for (std::size_t i = 0; i < trial_draws; ++i) {
      hits += out[i].first;
      csv.row({"trial", fmt_count(i), out[i].first ? "1" : "0", fmt(out[i].second)});
    }
    v.push_back({"per-trial-success >= 1/400", 400 * hits >= trial_draws,
                 rate(hits, trial_draws) + " (p = " + fmt_count(p) + ", inner " + inner->name() + ")"});
  }

  if (runs > 0) {
    // a run succeeds iff one of its trials does (nearest wins), so trials stop at the first success
    std::vector<std::pair<bool, std::size_t>> out(runs);
    const std::uint64_t s0 = derive_seed(seed, "runs");
    parallel_for(runs, threads_of(c), [&](std::size_t r) {
      const std::uint64_t rs = Rng(s0, r)();
      out[r] = {false, per_run};
      for (std::size_t j = 0; j < per_run; ++j)
        if (success(sparsify_trial(B, t, p, Rng(rs, j)(), *inner))) {
          out[r] = {true, j + 1};
          break;
        }
    });
    std::size_t hits = 0;
    for (std::size_t r = 0; r < runs; ++r) {
      hits += out[r].first;
      csv.row({"run", fmt_count(r), out[r].first ? "1" : "0", fmt_count(out[r].second)});
    }
    const Real need = c.tolerance("end_to_end_min", 0.999L);
    v.push_back({"end-to-end-success", static_cast<Real>(hits) >= need * static_cast<Real>(runs),
                 rate(hits, runs) + " with " + fmt_count(per_run) + " trials per run, need >= " + fmt(need)});

    std::size_t agree = 0;
    SparsifyOptions o;
    o.trials = per_run;
    for (std::size_t r = 0; r < full_runs; ++r) {
      const auto res = sparsify_reduce(B, t, tau, *inner, Rng(s0, r)(), o);
      const bool ok = res.found && B.contains(res.vector) && res.dist2 <= accept2;
      agree += ok == out[r].first;
      csv.row({"full", fmt_count(r), ok ? "1" : "0", res.found ? fmt(std::sqrt(to_real(res.dist2 / dist2))) : "nan"});
    }
    if (full_runs > 0)
      v.push_back({"full-run-agrees-with-trials", agree == full_runs, rate(agree, full_runs)});
  }
  return csv.report(std::move(v));
}

// ---------------------------------------------------------------- local-maxima

ExperimentReport local_maxima(const ExperimentConfig& c) {
  c.require_known({"n_values", "output", "slice_points", "slice_extent"});
  const auto ns = c.counts("n_values", {7, 8});
  const std::string output = c.text("output", "summary");
  for (auto n : ns)
    if (n < 2) throw ConfigError("local-maxima needs n >= 2");
  if (output == "slice") {
    const std::size_t n = ns.front(), k = c.count("slice_points", 41);
    const Real ext = c.real("slice_extent", 1.5L);
    Csv csv(c, {"n", "x", "y", "f", "f_certified"});
    const LatticeBasis L = generate_lattice({GeneratorKind::Checkerboard, n, 10}, 0);
    std::vector<ScalarEvaluation> vals(k * k);
    parallel_for(k * k, threads_of(c), [&](std::size_t idx) {
      RealVec t = RealVec::Zero(static_cast<Eigen::Index>(n));
      const Real step = k > 1 ? 2 * ext / static_cast<Real>(k - 1) : 0;
      t(0) = -ext + step * static_cast<Real>(idx / k);
      t(1) = -ext + step * static_cast<Real>(idx % k);
      vals[idx] = periodic_f(L, t, 1e-12L);
    });
    bool in_range = true;
    const Real step = k > 1 ? 2 * ext / static_cast<Real>(k - 1) : 0;
    for (std::size_t idx = 0; idx < k * k; ++idx) {
      const Real x = -ext + step * static_cast<Real>(idx / k), y = -ext + step * static_cast<Real>(idx % k);
      in_range = in_range && vals[idx].value - vals[idx].truncation_bound <= 1 && vals[idx].value + vals[idx].truncation_bound > 0;
      csv.row({fmt_count(n), fmt(x), fmt(y), fmt(vals[idx].value), fmt(vals[idx].truncation_bound)});
    }
    return csv.report({{"slice-values-in-(0,1]", in_range, fmt_count(k * k) + " grid points"}});
  }
  if (output != "summary") throw ConfigError("output must be summary or slice");

  const Real grad_zero = c.tolerance("grad_zero", 1e-9L), gap = c.tolerance("value_gap", 1e-3L);
  Csv csv(c, {"n", "f", "f_closed_form", "grad_norm", "grad_certified", "max_eigenvalue", "hessian_certified"});
  std::vector<Verdict> v;
  for (auto n : ns) {
    const LatticeBasis L = generate_lattice({GeneratorKind::Checkerboard, n, 10}, 0);
    RealVec e1 = RealVec::Zero(static_cast<Eigen::Index>(n));
    e1(0) = 1;
    const Derivatives d = derivatives_f(L, e1, 1e-10L);
    const Eigen::SelfAdjointEigenSolver<RealMat> es(d.hessian.value, Eigen::EigenvaluesOnly);
    const Real lmax = es.eigenvalues().maxCoeff();
    const Real f = d.value.value, closed = checkerboard_f_e1(n);
    csv.row({fmt_count(n), fmt(f), fmt(closed), fmt(d.gradient.value.norm()), fmt(d.gradient.truncation_bound),
             fmt(lmax), fmt(d.hessian.truncation_bound)});
    const std::string tag = " n=" + fmt_count(n);
    v.push_back({"gradient-zero" + tag, d.gradient.value.norm() <= grad_zero + d.gradient.truncation_bound,
                 "|grad f(e1)| = " + fmt(d.gradient.value.norm())});
    v.push_back({"value-near-one" + tag, f >= 1 - gap,
                 "f(e1) = " + fmt(f) + " (closed form " + fmt(closed) + "), need >= " + fmt(1 - gap)});
    v.push_back({"hessian-negative-definite" + tag, lmax + d.hessian.truncation_bound < 0,
                 "max eigenvalue " + fmt(lmax) + " +- " + fmt(d.hessian.truncation_bound)});
  }
  return csv.report(std::move(v));
}

// ---------------------------------------------------------------- smoothing-profile

ExperimentReport smoothing_profile(const ExperimentConfig& c) {
  c.require_known({"alpha", "n_values", "fixtures", "lattice", "bound"});
  const Real alpha = c.real("alpha", 0.15L);
  const auto ns = c.counts("n_values", {6, 8, 10});
  const std::size_t fixtures = c.count("fixtures", 10);
  Csv csv(c, {"n", "fixture", "eps", "dual_eta", "lambda1", "radius", "chain_1", "chain_2", "ok"});
  std::size_t fails = 0, chain_fails = 0, total = 0;
  Real worst = std::numeric_limits<Real>::infinity();
  const std::uint64_t lseed = derive_seed(c.seed(), "lattice");
  for (auto n : ns) {
    const ParamPlan plan = bdd_param_plan(alpha, n);
    const auto sd = s_eps_delta_max(plan.eps);
    const Real s = sd.s_eps, nn = static_cast<Real>(n);
    struct Row {
      Real eta, l1, radius, c1, c2;
      bool ok, chain;
    };
    std::vector<Row> rows(fixtures + 1);
    parallel_for(fixtures + 1, threads_of(c), [&](std::size_t f) {
      // fixture 0 is Z^n, the rest come from the configured generator
      LatticeGeneratorSpec spec = c.lattice(GeneratorKind::RandomInteger, n);
      spec.n = n;
      const LatticeBasis B = f == 0 ? LatticeBasis::identity(n) : generate_lattice(spec, Rng(lseed, n * 100003 + f)());
      const Real eta = smoothing_parameter(B.dual(), plan.eps).eta;
      const Real l1 = std::sqrt(to_real(lambda1_squared(B)));
      const Real radius = decoding_radius_from_eta(eta, plan.eps);
      const Real c1 = sd.delta_max * s * l1 / (s + std::sqrt(nn / (2 * kPi)));
      const Real c2 = (kPi * s * s - 4) / (2 * kPi * s * s + std::sqrt(2 * kPi * nn * s * s)) * l1;
      const Real rel = 1e-12L;
      const bool chain = radius >= c1 * (1 - rel) && std::abs(c1 - c2) <= rel * c1 && c2 >= alpha * l1 * (1 - rel);
      rows[f] = {eta, l1, radius, c1, c2, radius >= alpha * l1, chain};
    });
    for (std::size_t f = 0; f <= fixtures; ++f) {
      const Row& r = rows[f];
      ++total;
      fails += !r.ok;
      chain_fails += !r.chain;
      worst = std::min(worst, r.radius / r.l1);
      csv.row({fmt_count(n), fmt_count(f), fmt(plan.eps), fmt(r.eta), fmt(r.l1), fmt(r.radius), fmt(r.c1), fmt(r.c2),
               r.ok && r.chain ? "1" : "0"});
    }
  }
  return csv.report({{"radius-covers-alpha-lambda1", fails == 0,
                      fmt_count(fails) + " of " + fmt_count(total) + " below, smallest radius/lambda1 = " + fmt(worst) +
                          " vs alpha = " + fmt(alpha)},
                     {"radius-inequality-chain", chain_fails == 0, fmt_count(chain_fails) + " of " + fmt_count(total)}});
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  switch (config.experiment()) {
    case ExperimentKind::DecodeSuccess: return decode_success(config);
    case ExperimentKind::EstimatorError: return estimator_error(config);
    case ExperimentKind::Contraction: return contraction(config);
    case ExperimentKind::ReductionAudit: return reduction_audit(config);
    case ExperimentKind::SparsifyAudit: return sparsify_audit(config);
    case ExperimentKind::LocalMaxima: return local_maxima(config);
    case ExperimentKind::SmoothingProfile: return smoothing_profile(config);
  }
  throw ConfigError("unknown experiment");
}

}  // namespace latgauss
