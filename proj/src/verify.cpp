#include "latgauss/verify.hpp"
#include "latgauss/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <functional>

namespace latgauss {

namespace {

std::string fmt(Real x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6Lg", x);
  return buf;
}

Verdict make(const std::string& name, bool ok, const std::string& detail = "") { return {name, ok, detail}; }

// Runs body; an exception becomes a failing verdict with the message.
Verdict guarded(const std::string& name, const std::function<Verdict()>& body) {
  try {
    Verdict v = body();
    v.name = name;
    return v;
  } catch (const std::exception& e) {
    return make(name, false, std::string("exception: ") + e.what());
  }
}

LatticeBasis random_fixture(std::size_t n, long long bound, std::uint64_t seed) {
  return generate_lattice({GeneratorKind::RandomInteger, n, bound}, seed);
}

RationalVector random_target(Rng& rng, std::size_t m, std::int64_t range, std::int64_t den) {
  RationalVector t(m);
  for (auto& x : t)
    x = Rational(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(2 * range * den + 1))) - range * den,
                 den);
  return t;
}

}  // namespace

Real periodic_f_upper_bound(Real r, Real eps) {
  const Real s = s_eps_formula(eps);
  const Real rho = std::exp(-kPi * r * r);
  const Real integral = (std::erf(std::sqrt(kPi) * (s + r)) - std::erf(std::sqrt(kPi) * (s - r))) / 2;
  return rho * (1 / (1 + eps) + eps / (1 + eps) * std::cosh(2 * kPi * s * r)) + 2 * kPi * r * integral;
}

Verdict poisson_consistency(std::size_t pairs, std::uint64_t seed, Real tol, std::size_t threads) {
  std::vector<Real> excess(pairs);
  parallel_for(pairs, threads, [&](std::size_t i) {
    Rng rng(seed, i);
    const std::size_t n = 1 + i % 4;
    // half-integral scalings keep both the primal and the dual sums moderate
    const LatticeBasis B = random_fixture(n, 3, rng()).scaled_by(Rational(static_cast<long>(1 + rng.below(4)), 2));
    RealVec t(static_cast<Eigen::Index>(n));
    for (Eigen::Index k = 0; k < t.size(); ++k) t(k) = 4 * rng.uniform() - 2;
    const ScalarEvaluation p = periodic_f(B, t, tol), d = periodic_f_dual(B, t, tol);
    excess[i] = std::abs(p.value - d.value) - (p.truncation_bound + d.truncation_bound);
  });
  std::size_t bad = 0;
  Real worst = -std::numeric_limits<Real>::infinity();
  for (Real e : excess) {
    bad += e > 0;
    worst = std::max(worst, e);
  }
  return make("poisson-identity", bad == 0,
              std::to_string(bad) + " of " + std::to_string(pairs) + " pairs outside, max(|diff| - bounds) = " + fmt(worst));
}

std::vector<Verdict> gaussian_sandwich(const std::vector<Real>& eps_values, std::size_t targets, std::uint64_t seed,
                                       Real tol, std::size_t threads) {
  std::vector<Verdict> out;
  const std::vector<std::pair<std::string, LatticeBasis>> fixtures = {
      {"Z^4", LatticeBasis::identity(4)}, {"random rank 4", random_fixture(4, 10, derive_seed(seed, "sandwich"))}};
  std::size_t low_bad = 0, up_bad = 0, total = 0;
  Real low_worst = std::numeric_limits<Real>::infinity(), up_margin = std::numeric_limits<Real>::infinity();
  for (Real eps : eps_values)
    for (std::size_t fx = 0; fx < fixtures.size(); ++fx) {
      const LatticeBasis& B = fixtures[fx].second;
      const LatticeBasis S = B.scaled_by(to_rational(smoothing_parameter(B.dual(), eps).eta));
      const Real s = s_eps_formula(eps);
      std::vector<std::pair<Real, Real>> res(targets);
      const std::uint64_t tseed = derive_seed(seed, "sandwich-targets");
      parallel_for(targets, threads, [&](std::size_t i) {
        Rng rng(tseed, (fx * 16 + static_cast<std::size_t>(-std::log10(eps))) * 1000003 + i);
        const RealVec t = uniform_in_ball(rng, S.ambient_dim(), s);
        const ScalarEvaluation f = periodic_f(S, t, tol);
        const Real rho = std::exp(-kPi * t.squaredNorm());
        // lower: f >= rho(t) - 2 tol; upper: f - bound <= U(|t|)
        res[i] = {f.value - (rho - 2 * tol),
                  periodic_f_upper_bound(t.norm(), eps) * (1 + 1e-15L) - (f.value - f.truncation_bound)};
      });
      for (const auto& [lo, up] : res) {
        ++total;
        low_bad += lo < 0;
        up_bad += up < 0;
        low_worst = std::min(low_worst, lo);
        up_margin = std::min(up_margin, up);
      }
    }
  out.push_back(make("lower-bound f >= rho(t)", low_bad == 0,
                     std::to_string(low_bad) + " of " + std::to_string(total) + ", min slack " + fmt(low_worst)));
  out.push_back(make("upper-bound on f at rho(L) = 1 + eps", up_bad == 0,
                     std::to_string(up_bad) + " of " + std::to_string(total) + ", min slack " + fmt(up_margin)));
  return out;
}

std::vector<Verdict> verify_suite(const VerifyOptions& opts) {
  const std::uint64_t seed = opts.seed;
  const std::size_t th = opts.threads;
  std::vector<Verdict> v;
  auto add = [&](const std::string& name, const std::function<Verdict()>& body) { v.push_back(guarded(name, body)); };
  auto add_all = [&](const std::string& prefix, const std::function<std::vector<Verdict>()>& body) {
    try {
      for (auto& x : body()) {
        x.name = prefix + x.name;
        v.push_back(std::move(x));
      }
    } catch (const std::exception& e) {
      v.push_back(make(prefix + "*", false, std::string("exception: ") + e.what()));
    }
  };
  auto experiment = [&](ExperimentKind kind, const std::map<std::string, std::string>& kv) {
    auto c = ExperimentConfig::make(kind, kv);
    c.set("seed", std::to_string(seed));
    c.set("threads", std::to_string(th));
    return run_experiment(c).verdicts;
  };

  // generators
  add("generators.checkerboard-even-sum", [&] {
    bool ok = true;
    for (std::size_t n = 2; n <= 6; ++n) {
      const LatticeBasis L = generate_lattice({GeneratorKind::Checkerboard, n, 10}, 0);
      // generators have even coordinate sum and index 2 in Z^n, so L is the whole even-sum sublattice
      for (const auto& row : L.vectors()) {
        Rational sum = 0;
        for (const auto& x : row) sum += x;
        ok = ok && denominator(sum) == 1 && numerator(sum) % 2 == 0;
      }
      ok = ok && L.det2() == 4;
    }
    const bool l1 = lambda1_squared(generate_lattice({GeneratorKind::Checkerboard, 2, 10}, 0)) == 2;
    return make("", ok && l1, l1 ? "" : "lambda_1(checkerboard(2))^2 != 2");
  });
  add("generators.random-integer-full-rank-and-seeded", [&] {
    bool ok = true;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const LatticeGeneratorSpec spec{GeneratorKind::RandomInteger, 2 + s % 5, 2};
      const LatticeBasis a = generate_lattice(spec, s), b = generate_lattice(spec, s);
      ok = ok && a.rank() == spec.n && a == b;
    }
    return make("", ok);
  });
  add("generators.dual-orthogonal-determinant", [&] {
    bool ok = true;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const LatticeGeneratorSpec spec{GeneratorKind::RandomDualOrthogonal, 2 + s % 4, 4};
      Rational det = 1;
      for (long long d : dual_orthogonal_scales(spec, s)) det *= Rational(d * d);
      ok = ok && generate_lattice(spec, s).det2() == det;
    }
    return make("", ok);
  });

  // lattice-core
  add("lattice.gram-schmidt-exact", [&] {
    bool ok = true;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const LatticeBasis B = random_fixture(5, 10, derive_seed(seed, "gs") + s);
      const auto& gs = B.gram_schmidt();
      for (std::size_t i = 0; i < 5; ++i) {
        RationalVector r = gs.orthogonal[i];
        for (std::size_t j = 0; j < i; ++j) {
          axpy(r, gs.mu[i][j], gs.orthogonal[j]);
          ok = ok && dot(gs.orthogonal[i], gs.orthogonal[j]) == 0;
        }
        ok = ok && r == B.row(i);
      }
    }
    return make("", ok);
  });
  add("lattice.dual-identity-and-involution", [&] {
    bool ok = true;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const LatticeBasis B = random_fixture(2 + s, 10, derive_seed(seed, "dual") + s);
      const LatticeBasis& D = B.dual();
      for (std::size_t i = 0; i < B.rank(); ++i)
        for (std::size_t j = 0; j < B.rank(); ++j) ok = ok && dot(B.row(i), D.row(j)) == Rational(i == j ? 1 : 0);
      ok = ok && dual_basis(D) == B;
    }
    return make("", ok);
  });
  add("lattice.babai-error-bound", [&] {
    bool ok = true;
    Rng rng(derive_seed(seed, "babai"));
    for (int k = 0; k < 30; ++k) {
      const LatticeBasis B = random_fixture(5, 10, rng());
      const RationalVector t = random_target(rng, 5, 20, 16);
      Rational half = 0;
      for (const auto& x : B.gram_schmidt().norm2) half += x;
      ok = ok && 4 * norm2(sub(babai_nearest_plane(B, t), t)) <= half;
    }
    return make("", ok);
  });
  add("enumeration.closest-vector-optimal", [&] {
    bool ok = true;
    Rng rng(derive_seed(seed, "cvp"));
    for (int k = 0; k < 20; ++k) {
      const LatticeBasis B = random_fixture(4, 10, rng());
      const RationalVector t = random_target(rng, 4, 20, 16);
      const LatticePoint c = cvp_oracle_full(B, t);
      ok = ok && B.contains(c.vector) && c.norm2 <= norm2(sub(babai_nearest_plane(B, t), t));
      for (const auto& x : enumerate_coefficients(B, t, c.norm2)) ok = ok && norm2(sub(B.combine(x), t)) >= c.norm2;
    }
    return make("", ok);
  });
  add("enumeration.hkz-conditions", [&] {
    bool ok = true;
    for (std::uint64_t s = 0; s < 5; ++s) {
      const LatticeBasis B = random_fixture(5, 10, derive_seed(seed, "hkz") + s);
      const LatticeBasis H = hkz_basis(B);
      ok = ok && is_hkz(H) && same_lattice(H, B);
    }
    return make("", ok);
  });

  // gaussian-analysis
  v.push_back(guarded("gaussian.poisson-identity", [&] { return poisson_consistency(20, derive_seed(seed, "poisson"), 1e-8L, th); }));
  add_all("gaussian.", [&] { return gaussian_sandwich({1e-3L}, 60, seed, 1e-12L, th); });
  add("gaussian.smoothing-sandwich", [&] {
    bool ok = true;
    for (std::uint64_t s = 0; s < 4; ++s) {
      const SmoothingResult r = smoothing_parameter(random_fixture(3, 5, derive_seed(seed, "eta") + s), 1e-4L);
      ok = ok && r.sandwich_lo <= r.eta && r.eta <= r.sandwich_hi;
    }
    return make("", ok);
  });
  add("gaussian.sampler-membership", [&] {
    const LatticeBasis B = random_fixture(3, 5, derive_seed(seed, "dgs"));
    const DgsSampleSet d = sample_discrete_gaussian(B, 3, 200, seed);
    bool ok = true;
    for (std::size_t i = 0; i < d.size(); ++i) ok = ok && B.contains(d.vector(i));
    return make("", ok);
  });

  // periodic-estimator
  add("estimator.advice-in-dual-and-periodic", [&] {
    const LatticeBasis B = random_fixture(3, 5, derive_seed(seed, "advice"));
    const Real eps = 1e-3L;
    const Real eta = smoothing_parameter(B.dual(), eps).eta;
    const AdviceW a = generate_advice(B, eps, 300, seed, eta, eta);
    bool ok = true;
    for (std::size_t i = 0; i < a.N(); ++i)
      for (std::size_t j = 0; j < B.rank(); ++j) ok = ok && denominator(dot(a.exact(i), B.row(j))) == 1;
    Rng rng(seed);
    Real worst = 0;
    for (int k = 0; k < 20; ++k) {
      const RealVec t = uniform_in_ball(rng, 3, 1);
      const RealVec shift = to_real(B.row(rng.below(3))) * eta;
      worst = std::max(worst, std::abs(f_W(a, t) - f_W(a, t + shift)));
    }
    return make("", ok && worst < 1e-12L, "max periodicity gap " + fmt(worst));
  });
  add_all("estimator.", [&] {
    return experiment(ExperimentKind::EstimatorError, {{"n", "3"}, {"N0", "50"}, {"octaves", "2"}, {"draws", "200"}});
  });

  // bdd-decoder
  add_all("decoder.", [&] {
    return experiment(ExperimentKind::DecodeSuccess, {{"n", "3"}, {"eps", "1e-4"}, {"trials", "30"}, {"tol.success_min", "1"}});
  });
  add_all("decoder.", [&] {
    return experiment(ExperimentKind::Contraction, {{"n", "3"}, {"trials", "60"}, {"fixtures", "2"}});
  });
  if (!opts.advice_path.empty()) {
    add("decoder.frame-identity[" + opts.advice_path + "]", [&] {
      const DecoderAdvice a = read_decoder_advice_file(opts.advice_path);
      const bool ok = frame_identity_holds(a);
      return make("", ok, ok ? "" : "<v*_i, v_j> != delta_ij for the stored frame");
    });
  }

  // reductions
  add_all("reductions.", [&] {
    return experiment(ExperimentKind::ReductionAudit, {{"reduction", "kannan"}, {"n", "5"}, {"trials", "6"}});
  });
  add_all("reductions.", [&] {
    return experiment(ExperimentKind::ReductionAudit, {{"reduction", "master"}, {"n", "5"}, {"trials", "6"}});
  });
  add_all("reductions.", [&] {
    return experiment(ExperimentKind::ReductionAudit, {{"reduction", "promise"}, {"n", "5"}, {"trials", "4"}});
  });
  add("reductions.primality", [&] {
    bool ok = true;
    for (std::uint64_t k = 0; k < 5000; ++k) {
      bool pr = k >= 2;
      for (std::uint64_t d = 2; d * d <= k && pr; ++d) pr = k % d != 0;
      ok = ok && is_prime(k) == pr;
    }
    return make("", ok);
  });
  add("reductions.sparse-coset-membership-and-index", [&] {
    const LatticeBasis B = random_fixture(4, 6, derive_seed(seed, "coset"));
    bool ok = true;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const SparseCoset c = sparse_coset_sample(B, 11, s);
      const LatticeBasis sub = c.sublattice();
      ok = ok && c.contains(B.combine(c.coset_point())) && sub.det2() == B.det2() * 121;
      for (const auto& row : sub.vectors()) ok = ok && B.contains(row);
    }
    return make("", ok);
  });
  add_all("reductions.", [&] {
    return experiment(ExperimentKind::SparsifyAudit, {{"n", "4"},
                                                      {"lemma_draws", "300"},
                                                      {"trial_draws", "100"},
                                                      {"runs", "5"},
                                                      {"trials_per_run", "200"},
                                                      {"full_runs", "1"},
                                                      {"tol.end_to_end_min", "1"}});
  });

  // local maximum of the checkerboard lattice; the value gap is not an invariant
  add("cli.local-maximum-n7", [&] {
    const auto vs = experiment(ExperimentKind::LocalMaxima, {{"n_values", "7"}});
    bool ok = true;
    std::string detail;
    for (const auto& x : vs)
      if (x.name.rfind("value-near-one", 0) != 0) {
        ok = ok && x.passed;
        detail += x.name + ": " + (x.passed ? "pass" : "FAIL") + "; ";
      }
    return make("", ok, detail);
  });

  // harness
  add("cli.determinism-across-runs-and-threads", [&] {
    auto c = ExperimentConfig::make(ExperimentKind::Contraction, {{"n", "3"}, {"trials", "24"}});
    c.set("seed", std::to_string(seed));
    const std::string a = run_experiment(c).csv;
    const std::string b = run_experiment(c).csv;
    c.set("threads", "3");
    const std::string d = run_experiment(c).csv;
    return make("", a == b && a == d);
  });
  return v;
}

}  // namespace latgauss
