#include "latgauss/reductions.hpp"

#include "latgauss/rng.hpp"

#include <algorithm>
#include <map>

namespace latgauss {

namespace {

class ExactPrepared : public PreparedInner {
 public:
  explicit ExactPrepared(LatticeBasis b) : basis_(std::move(b)) {}
  std::optional<Coefficients> solve(const RationalVector& target) const override {
    return cvp_oracle_full(basis_, target).coefficients;
  }

 private:
  LatticeBasis basis_;
};

class AdversaryPrepared : public PreparedInner {
 public:
  AdversaryPrepared(LatticeBasis b, Rational phi2_over_l1, Rational gamma2)
      : basis_(std::move(b)), l1_(lambda1_squared(basis_)), alpha2_(std::move(phi2_over_l1)), gamma2_(std::move(gamma2)) {}

  std::optional<Coefficients> solve(const RationalVector& target) const override {
    LatticePoint cp = cvp_oracle_full(basis_, target);
    if (cp.norm2 > alpha2_ * l1_) {
      cp.coefficients[0] = checked_add(cp.coefficients[0], 7);
      return cp.coefficients;
    }
    if (gamma2_ == 1 || cp.norm2 == 0) return cp.coefficients;
    Coefficients best = cp.coefficients;
    Rational best2 = cp.norm2;
    for (auto& c : enumerate_coefficients(basis_, target, gamma2_ * cp.norm2)) {
      const Rational d2 = norm2(sub(basis_.combine(c), target));
      if (d2 > best2 || (d2 == best2 && c > best)) {
        best2 = d2;
        best = std::move(c);
      }
    }
    return best;
  }

 private:
  LatticeBasis basis_;
  Rational l1_, alpha2_, gamma2_;
};

class BddPrepared : public PreparedInner {
 public:
  explicit BddPrepared(DecoderAdvice a) : advice_(std::move(a)) {}
  std::optional<Coefficients> solve(const RationalVector& target) const override {
    DecodeResult r = decode(advice_, target);
    if (r.status == DecodeStatus::OffLattice || r.status == DecodeStatus::FrameAbort) return std::nullopt;
    return r.coefficients;
  }

 private:
  DecoderAdvice advice_;
};

Candidate failed_candidate(std::size_t level) {
  Candidate c;
  c.level = level;
  return c;
}

// y = lift of a over b_{i+1..n}, z = Babai(t - y, b_1..b_i), candidate y + z.
Candidate complete_candidate(const LatticeBasis& hkz, const ProjectedLattice& proj, const Coefficients& a,
                             const RationalVector& t, std::size_t level) {
  const std::size_t i = proj.drop_count;
  Candidate c;
  c.level = level;
  c.ok = true;
  const RationalVector y = proj.lift(a);
  const RationalVector resid = sub(t, y);
  const RationalVector perp = proj.project(resid);
  c.projected2 = norm2(perp);
  const BabaiResult z = babai_nearest_plane_full(hkz.slice(0, i), resid);
  c.babai2 = norm2(sub(z.vector, sub(resid, perp)));
  c.vector = add(y, z.vector);
  c.coefficients = proj.lift_coefficients(a);
  for (std::size_t j = 0; j < i; ++j) c.coefficients[j] = checked_add(c.coefficients[j], z.coefficients[j]);
  c.dist2 = norm2(sub(c.vector, t));
  return c;
}

ReductionResult pick_nearest(const LatticeBasis& hkz, std::vector<Candidate> cands) {
  ReductionResult r;
  r.basis = hkz;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    if (!cands[k].ok) continue;
    if (!r.found || cands[k].dist2 < r.dist2) {
      r.found = true;
      r.dist2 = cands[k].dist2;
      r.chosen = k;
    }
  }
  if (r.found) {
    r.vector = cands[r.chosen].vector;
    r.coefficients = cands[r.chosen].coefficients;
  }
  r.candidates = std::move(cands);
  return r;
}

std::optional<Coefficients> solve_level(const std::shared_ptr<const PreparedInner>& inner, const LatticeBasis& b,
                                        const RationalVector& target) {
  if (b.rank() == 0) return Coefficients{};
  auto sol = inner->solve(target);
  if (sol && sol->size() != b.rank()) return std::nullopt;
  return sol;
}

Rational exact_square(Real x) { return to_rational(x) * to_rational(x); }

}  // namespace

std::shared_ptr<const PreparedInner> ExactInner::prepare(const LatticeBasis& basis) const {
  return std::make_shared<ExactPrepared>(basis);
}

std::shared_ptr<const PreparedInner> PromiseAdversaryInner::prepare(const LatticeBasis& basis) const {
  if (basis.rank() == 0) return nullptr;
  return std::make_shared<AdversaryPrepared>(basis, exact_square(alpha_), exact_square(gamma_));
}

std::size_t BddInner::advice_size(std::size_t rank) const {
  return static_cast<std::size_t>(std::ceil(c_ * static_cast<Real>(rank) * std::log(1 / eps_) / std::sqrt(eps_)));
}

std::shared_ptr<const PreparedInner> BddInner::prepare(const LatticeBasis& basis) const {
  if (basis.rank() == 0) return nullptr;
  return std::make_shared<BddPrepared>(preprocess(basis, eps_, advice_size(basis.rank()), seed_ + basis.rank()));
}

Real kannan_gamma_prime(std::size_t n, Real alpha, const std::function<Real(std::size_t)>& gamma) {
  Real best = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    const Real g = i == n ? 0 : gamma(n - i);
    best = std::max(best, std::sqrt(g * g + static_cast<Real>(i) / (4 * alpha * alpha)));
  }
  return best;
}

KannanAdvice kannan_preprocess(const LatticeBasis& basis, const InnerSolver& inner) {
  KannanAdvice a;
  a.hkz = hkz_basis(basis);
  for (std::size_t i = 0; i <= a.hkz.rank(); ++i) {
    a.levels.push_back(project_lattice(a.hkz, i));
    a.per_level.push_back(inner.prepare(a.levels.back().projected_basis));
  }
  return a;
}

ReductionResult kannan_reduce(const KannanAdvice& a, const RationalVector& target) {
  const RationalVector t = a.hkz.project_to_span(target);
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < a.levels.size(); ++i) {
    const auto& lv = a.levels[i];
    auto x = solve_level(a.per_level[i], lv.projected_basis, lv.project(t));
    if (!x) {
      cands.push_back(failed_candidate(i));
      continue;
    }
    cands.push_back(complete_candidate(a.hkz, lv, *x, t, i));
  }
  auto r = pick_nearest(a.hkz, std::move(cands));
  if (r.found) r.dist2 = norm2(sub(r.vector, target));
  return r;
}

ReductionResult kannan_reduce(const LatticeBasis& basis, const RationalVector& target, const InnerSolver& inner) {
  return kannan_reduce(kannan_preprocess(basis, inner), target);
}

std::vector<std::size_t> master_indices(const LatticeBasis& basis, Real c) {
  if (!(c >= 1)) throw DomainError("master_indices requires c >= 1");
  const auto& bn = basis.gram_schmidt().norm2;
  const std::size_t n = basis.rank();
  // prefix maxima of |b~_j|^2, with M[0] = 0 for the empty prefix
  std::vector<Rational> M(n + 1, Rational(0));
  for (std::size_t j = 1; j <= n; ++j) M[j] = std::max(M[j - 1], bn[j - 1]);
  const Rational c2 = exact_square(c);
  std::vector<std::size_t> idx{n};
  while (idx.back() > 0) {
    const std::size_t ik = idx.back();
    std::size_t next = 0;
    for (std::size_t i = ik; i-- > 0;)
      if (M[i] * c2 < M[ik]) {
        next = i;
        break;
      }
    idx.push_back(next);
  }
  return idx;
}

std::size_t MasterAdvice::total_dimension() const {
  std::size_t s = 0;
  for (const auto& b : blocks) s += b.rank();
  return s;
}

Real master_gamma_prime(std::size_t n, Real g, Real alpha) { return g * std::sqrt(static_cast<Real>(n)) / (2 * alpha); }

MasterAdvice master_preprocess(const LatticeBasis& basis, Real g, std::size_t h, const InnerSolver& inner) {
  const std::size_t n = basis.rank();
  if (!(g >= 1)) throw DomainError("master reduction requires g >= 1");
  if (n > 0 && h >= n) throw DomainError("master reduction requires h < n");
  if (std::pow(g, static_cast<Real>(h) - 1) > std::sqrt(static_cast<Real>(n)) * (1 + 1e-15L))
    throw DomainError("master reduction requires g^(h-1) <= sqrt(n)");
  MasterAdvice a;
  a.hkz = hkz_basis(basis);
  a.r = h + 1;
  a.c = g;
  a.indices = master_indices(a.hkz, g);
  for (std::size_t k = 0; k < a.indices.size(); ++k) {
    const std::size_t ik = a.indices[k];
    const std::size_t upper = a.indices[k >= a.r ? k - a.r : 0];
    a.projections.push_back(project_lattice(a.hkz, ik));
    a.blocks.push_back(a.projections.back().projected_basis.slice(0, upper - ik));
    a.per_block.push_back(inner.prepare(a.blocks.back()));
  }
  return a;
}

ReductionResult master_reduce(const MasterAdvice& a, const RationalVector& target) {
  const RationalVector t = a.hkz.project_to_span(target);
  const std::size_t L = a.indices.size();
  // S(t, k) as coefficients over b_{i_k+1..n}
  std::vector<std::optional<Coefficients>> S(L);
  for (std::size_t k = 0; k < L; ++k) {
    const auto& P = a.projections[k];
    const RationalVector pt = P.project(t);
    if (k <= a.r) {
      S[k] = solve_level(a.per_block[k], a.blocks[k], pt);
      continue;
    }
    const auto& prev = S[k - a.r];
    if (!prev) continue;
    const std::size_t off = a.indices[k - a.r] - a.indices[k];
    RationalVector y = zero_vector(a.hkz.ambient_dim());
    for (std::size_t j = 0; j < prev->size(); ++j)
      if ((*prev)[j] != 0) axpy(y, Rational((*prev)[j]), P.projected_basis.row(off + j));
    auto d = solve_level(a.per_block[k], a.blocks[k], sub(pt, y));
    if (!d) continue;
    Coefficients out = *d;
    out.insert(out.end(), prev->begin(), prev->end());
    S[k] = std::move(out);
  }
  std::vector<Candidate> cands;
  for (std::size_t k = 0; k < L; ++k) {
    if (!S[k]) {
      cands.push_back(failed_candidate(k));
      continue;
    }
    cands.push_back(complete_candidate(a.hkz, a.projections[k], *S[k], t, k));
  }
  auto r = pick_nearest(a.hkz, std::move(cands));
  if (r.found) r.dist2 = norm2(sub(r.vector, target));
  return r;
}

LatticeBasis g_hkz_basis(const LatticeBasis& basis, const InnerSolver& inner) {
  const std::size_t n = basis.rank();
  if (n == 0) return basis;
  const LatticeBasis& cur = *basis.reduced().basis;
  // shortest-vector candidates: for each i, b_i minus a close point of the
  // lattice with b_i doubled; the result has an odd i-th coefficient
  std::optional<Coefficients> best;
  Rational best2;
  for (std::size_t i = 0; i < n; ++i) {
    RationalMatrix rows = cur.vectors();
    rows[i] = scaled(rows[i], Rational(2));
    LatticeBasis bi(rows, cur.ambient_dim());
    auto sol = inner.prepare(bi)->solve(cur.row(i));
    if (!sol) continue;
    Coefficients v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = -(*sol)[j];
    v[i] = checked_add(1, checked_mul(-2, (*sol)[i]));
    const Rational v2 = norm2(cur.combine(v));
    if (!best || v2 < best2) {
      best = v;
      best2 = v2;
    }
  }
  if (!best) throw LatticeError("g-HKZ construction: inner solver failed at every index");
  const LatticeBasis first = complete_to_basis(cur, make_primitive(*best));
  if (n == 1) return first;
  ProjectedLattice proj = project_lattice(first, 1);
  const LatticeBasis sub = g_hkz_basis(proj.projected_basis, inner);
  RationalMatrix rows{first.row(0)};
  for (std::size_t j = 0; j < sub.rank(); ++j) {
    auto c = proj.projected_basis.coefficients(sub.row(j));
    if (!c) throw LatticeError("g-HKZ construction: projected basis lost lattice membership");
    rows.push_back(proj.lift(*c));
  }
  return size_reduce(LatticeBasis(rows, basis.ambient_dim()));
}

ReductionResult cvp_promise_reduce(const LatticeBasis& basis, const RationalVector& target, const InnerSolver& inner) {
  const LatticeBasis hkz = g_hkz_basis(basis, inner);
  const RationalVector t = hkz.project_to_span(target);
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i <= hkz.rank(); ++i) {
    ProjectedLattice lv = project_lattice(hkz, i);
    auto prep = inner.prepare(lv.projected_basis);
    auto x = solve_level(prep, lv.projected_basis, lv.project(t));
    if (!x) {
      cands.push_back(failed_candidate(i));
      continue;
    }
    cands.push_back(complete_candidate(hkz, lv, *x, t, i));
  }
  auto r = pick_nearest(hkz, std::move(cands));
  if (r.found) r.dist2 = norm2(sub(r.vector, target));
  return r;
}

namespace {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

std::uint64_t reduce_mod(std::int64_t x, std::uint64_t p) {
  const auto m = static_cast<std::int64_t>(p);
  std::int64_t r = x % m;
  return static_cast<std::uint64_t>(r < 0 ? r + m : r);
}

}  // namespace

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::uint64_t witnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (auto w : witnesses)
    if (n % w == 0) return n == w;
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // this witness set is deterministic for all n < 3.3e24
  for (auto w : witnesses) {
    std::uint64_t x = powmod(w, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s && composite; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) composite = false;
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t next_prime(std::uint64_t n) {
  if (n <= 2) return 2;
  for (std::uint64_t k = n | 1;; k += 2)
    if (is_prime(k)) return k;
}

std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t p) {
  if (a % p == 0) throw DomainError("zero has no inverse");
  return powmod(a, p - 2, p);
}

std::uint64_t SparseCoset::residue(const Coefficients& a) const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s = (s + mulmod(z[i], reduce_mod(a[i], p), p)) % p;
  return s;
}

bool SparseCoset::contains(const RationalVector& y) const {
  auto a = basis.coefficients(y);
  return a && residue(*a) == c;
}

namespace {

std::size_t pivot(const std::vector<std::uint64_t>& z) {
  for (std::size_t k = 0; k < z.size(); ++k)
    if (z[k] != 0) return k;
  throw DomainError("z vanishes mod p");
}

}  // namespace

Coefficients SparseCoset::coset_point() const {
  const std::size_t k = pivot(z);
  Coefficients x(basis.rank(), 0);
  x[k] = static_cast<std::int64_t>(mulmod(c, mod_inverse(z[k], p), p));
  return x;
}

LatticeBasis SparseCoset::sublattice() const {
  const std::size_t k = pivot(z);
  const std::uint64_t inv = mod_inverse(z[k], p);
  RationalMatrix rows;
  for (std::size_t j = 0; j < basis.rank(); ++j) {
    if (j == k) {
      rows.push_back(scaled(basis.row(k), Rational(static_cast<long long>(p))));
      continue;
    }
    // b_j + a_j b_k with a_j = -z_j / z_k mod p has residue zero
    const std::uint64_t aj = (p - mulmod(z[j], inv, p)) % p;
    RationalVector v = basis.row(j);
    axpy(v, Rational(static_cast<long long>(aj)), basis.row(k));
    rows.push_back(std::move(v));
  }
  return LatticeBasis(rows, basis.ambient_dim());
}

SparseCoset sparse_coset_sample(const LatticeBasis& basis, std::uint64_t p, std::uint64_t seed) {
  if (!is_prime(p)) throw DomainError("sparsification modulus must be prime");
  if (basis.rank() == 0) throw DomainError("sparsification needs rank >= 1");
  SparseCoset s;
  s.basis = basis;
  s.p = p;
  Rng rng(seed, 0);
  do {
    s.z.assign(basis.rank(), 0);
    for (auto& v : s.z) v = rng.below(p);
  } while (std::all_of(s.z.begin(), s.z.end(), [](auto v) { return v == 0; }));
  s.c = rng.below(p);
  return s;
}

std::uint64_t ball_count(const LatticeBasis& basis, const Rational& radius2) {
  return enumerate_coefficients(basis, zero_vector(basis.ambient_dim()), radius2).size();
}

Integer denominator_lcm(const LatticeBasis& basis) {
  Integer lcm = 1;
  for (const auto& row : basis.vectors())
    for (const auto& x : row) {
      const Integer d = denominator(x);
      lcm = lcm / boost::multiprecision::gcd(lcm, d) * d;
    }
  return lcm;
}

std::optional<RationalVector> sparsify_trial(const LatticeBasis& B, const RationalVector& t, std::uint64_t p,
                                             std::uint64_t trial_seed, const InnerSolver& inner) {
  const SparseCoset s = sparse_coset_sample(B, p, trial_seed);
  const LatticeBasis sub = s.sublattice();
  const RationalVector y = B.combine(s.coset_point());
  auto sol = inner.prepare(sub)->solve(latgauss::sub(t, y));
  if (!sol) return std::nullopt;
  return add(sub.combine(*sol), y);
}

SparsifyResult sparsify_reduce(const LatticeBasis& basis, const RationalVector& target, Real tau,
                               const InnerSolver& inner, std::uint64_t seed, const SparsifyOptions& opts) {
  if (!(tau > 0)) throw DomainError("sparsification requires tau > 0");
  // clear denominators so the working basis is integral
  const Rational scale(denominator_lcm(basis));
  const LatticeBasis B = basis.scaled_by(scale);
  const RationalVector t = scaled(target, scale);

  SparsifyResult res;
  if (opts.mode == SparsifyOptions::Mode::Oracle) {
    const Rational r2 = exact_square(tau) * dist2_to_lattice(B, t);
    res.primes.push_back(next_prime(2 * ball_count(B, r2)));
  } else {
    for (std::size_t i = 1; i <= opts.prime_budget; ++i) res.primes.push_back(next_prime((std::uint64_t(1) << i) + 1));
  }
  std::uint64_t trial = 0;
  for (const std::uint64_t p : res.primes) {
    for (std::size_t k = 0; k < opts.trials; ++k, ++trial) {
      ++res.trials_run;
      auto cand = sparsify_trial(B, t, p, Rng(seed, trial)(), inner);
      if (!cand) {
        ++res.inner_failures;
        continue;
      }
      Rational d2 = norm2(latgauss::sub(*cand, t));
      if (!res.found || d2 < res.dist2) {
        res.found = true;
        res.dist2 = std::move(d2);
        res.vector = std::move(*cand);
      }
    }
  }
  if (res.found) {
    res.vector = scaled(res.vector, 1 / scale);
    res.dist2 /= scale * scale;
  }
  return res;
}

}  // namespace latgauss
