#include "latgauss/lattice.hpp"

#include <fstream>
#include <mutex>
#include <sstream>

namespace latgauss {

struct LatticeBasis::Cache {
  GramSchmidtData gs;
  RealMat rows_r, gs_rows_r, mu_r;
  RealVec gsn_r;
  std::once_flag dual_once;
  std::unique_ptr<LatticeBasis> dual;
  std::once_flag red_once;
  std::unique_ptr<ReducedForm> red;
};

namespace {

GramSchmidtData compute_gs(const RationalMatrix& rows) {
  const std::size_t n = rows.size();
  GramSchmidtData gs;
  gs.orthogonal.resize(n);
  gs.mu.assign(n, RationalVector(n, Rational(0)));
  gs.norm2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    RationalVector v = rows[i];
    for (std::size_t j = 0; j < i; ++j) {
      Rational mu = dot(rows[i], gs.orthogonal[j]) / gs.norm2[j];
      gs.mu[i][j] = mu;
      axpy(v, -mu, gs.orthogonal[j]);
    }
    gs.mu[i][i] = 1;
    gs.norm2[i] = norm2(v);
    if (gs.norm2[i].is_zero()) throw RankDeficientError("basis rows are linearly dependent");
    gs.orthogonal[i] = std::move(v);
  }
  return gs;
}

// Solve G X = B exactly by Gauss-Jordan; G symmetric positive definite.
RationalMatrix solve_gram(RationalMatrix g, RationalMatrix rhs) {
  const std::size_t n = g.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && g[piv][col].is_zero()) ++piv;
    if (piv == n) throw RankDeficientError("singular Gram matrix");
    std::swap(g[piv], g[col]);
    std::swap(rhs[piv], rhs[col]);
    const Rational inv = Rational(1) / g[col][col];
    for (auto& x : g[col]) x *= inv;
    for (auto& x : rhs[col]) x *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || g[r][col].is_zero()) continue;
      const Rational f = g[r][col];
      axpy(g[r], -f, g[col]);
      axpy(rhs[r], -f, rhs[col]);
    }
  }
  return rhs;
}

}  // namespace

LatticeBasis::LatticeBasis() : LatticeBasis(RationalMatrix{}, 0) {}

LatticeBasis::LatticeBasis(RationalMatrix rows)
    : LatticeBasis(std::move(rows), std::size_t(-1)) {}

LatticeBasis::LatticeBasis(RationalMatrix rows, std::size_t ambient_dim) : rows_(std::move(rows)) {
  if (ambient_dim == std::size_t(-1)) {
    if (rows_.empty()) throw DomainError("ambient dimension required for an empty basis");
    ambient_dim = rows_[0].size();
  }
  m_ = ambient_dim;
  for (const auto& r : rows_)
    if (r.size() != m_) throw DomainError("basis rows have inconsistent length");
  if (rows_.size() > m_) throw RankDeficientError("more basis vectors than ambient dimension");
  cache_ = std::make_shared<Cache>();
  cache_->gs = compute_gs(rows_);
  const auto n = static_cast<Eigen::Index>(rows_.size());
  const auto m = static_cast<Eigen::Index>(m_);
  cache_->rows_r.resize(n, m);
  cache_->gs_rows_r.resize(n, m);
  cache_->mu_r.resize(n, n);
  cache_->gsn_r.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    for (Eigen::Index j = 0; j < m; ++j) {
      cache_->rows_r(i, j) = to_real(rows_[ui][static_cast<std::size_t>(j)]);
      cache_->gs_rows_r(i, j) = to_real(cache_->gs.orthogonal[ui][static_cast<std::size_t>(j)]);
    }
    for (Eigen::Index j = 0; j < n; ++j) cache_->mu_r(i, j) = to_real(cache_->gs.mu[ui][static_cast<std::size_t>(j)]);
    cache_->gsn_r(i) = to_real(cache_->gs.norm2[ui]);
  }
}

LatticeBasis LatticeBasis::from_integers(const std::vector<std::vector<long long>>& rows) {
  RationalMatrix r;
  for (const auto& row : rows) {
    RationalVector v;
    for (long long x : row) v.emplace_back(x);
    r.push_back(std::move(v));
  }
  return LatticeBasis(std::move(r));
}

LatticeBasis LatticeBasis::identity(std::size_t n) {
  RationalMatrix r(n, RationalVector(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) r[i][i] = 1;
  return LatticeBasis(std::move(r), n);
}

const GramSchmidtData& LatticeBasis::gram_schmidt() const { return cache_->gs; }

const LatticeBasis& LatticeBasis::dual() const {
  std::call_once(cache_->dual_once, [this] {
    const std::size_t n = rank();
    RationalMatrix g(n, RationalVector(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) g[i][j] = g[j][i] = dot(rows_[i], rows_[j]);
    cache_->dual = std::make_unique<LatticeBasis>(n ? solve_gram(g, rows_) : RationalMatrix{}, m_);
  });
  return *cache_->dual;
}

const ReducedForm& LatticeBasis::reduced() const {
  std::call_once(cache_->red_once, [this] { cache_->red = std::make_unique<ReducedForm>(lll_reduce(*this)); });
  return *cache_->red;
}

const RealMat& LatticeBasis::real_rows() const { return cache_->rows_r; }
const RealVec& LatticeBasis::real_gs_norm2() const { return cache_->gsn_r; }
const RealMat& LatticeBasis::real_mu() const { return cache_->mu_r; }
const RealMat& LatticeBasis::real_gs_rows() const { return cache_->gs_rows_r; }

RationalVector LatticeBasis::combine(const Coefficients& c) const {
  RationalVector v = zero_vector(m_);
  for (std::size_t i = 0; i < rows_.size(); ++i)
    if (c[i] != 0) axpy(v, Rational(c[i]), rows_[i]);
  return v;
}

RealVec LatticeBasis::combine_real(const Coefficients& c) const {
  RealVec v = RealVec::Zero(static_cast<Eigen::Index>(m_));
  for (std::size_t i = 0; i < rows_.size(); ++i)
    if (c[i] != 0) v += static_cast<Real>(c[i]) * cache_->rows_r.row(static_cast<Eigen::Index>(i)).transpose();
  return v;
}

RationalVector LatticeBasis::span_coordinates(const RationalVector& v) const {
  const LatticeBasis& d = dual();
  RationalVector c(rank());
  for (std::size_t i = 0; i < rank(); ++i) c[i] = dot(d.row(i), v);
  return c;
}

RationalVector LatticeBasis::project_to_span(const RationalVector& v) const {
  RationalVector c = span_coordinates(v);
  RationalVector p = zero_vector(m_);
  for (std::size_t i = 0; i < rank(); ++i) axpy(p, c[i], rows_[i]);
  return p;
}

RealVec LatticeBasis::project_to_span(const RealVec& v) const {
  if (rank() == m_) return v;
  const RealMat& d = dual().real_rows();
  RealVec coords = d * v;
  return cache_->rows_r.transpose() * coords;
}

std::optional<Coefficients> LatticeBasis::coefficients(const RationalVector& v) const {
  if (v.size() != m_) return std::nullopt;
  RationalVector c = span_coordinates(v);
  Coefficients out(rank());
  for (std::size_t i = 0; i < rank(); ++i) {
    if (boost::multiprecision::denominator(c[i]) != 1) return std::nullopt;
    Integer z = boost::multiprecision::numerator(c[i]);
    if (z > Integer(std::numeric_limits<std::int64_t>::max()) ||
        z < Integer(std::numeric_limits<std::int64_t>::min()))
      return std::nullopt;
    out[i] = z.convert_to<std::int64_t>();
  }
  if (rank() < m_ && combine(out) != v) return std::nullopt;  // off the span
  return out;
}

LatticeBasis LatticeBasis::slice(std::size_t begin, std::size_t end) const {
  return LatticeBasis(RationalMatrix(rows_.begin() + static_cast<long>(begin), rows_.begin() + static_cast<long>(end)), m_);
}

LatticeBasis LatticeBasis::scaled_by(const Rational& c) const {
  RationalMatrix r = rows_;
  for (auto& row : r)
    for (auto& x : row) x *= c;
  return LatticeBasis(std::move(r), m_);
}

RationalVector LatticeBasis::project_out_prefix(const RationalVector& v, std::size_t i) const {
  RationalVector p = v;
  const auto& gs = cache_->gs;
  for (std::size_t j = 0; j < i; ++j) axpy(p, -(dot(v, gs.orthogonal[j]) / gs.norm2[j]), gs.orthogonal[j]);
  return p;
}

Rational LatticeBasis::det2() const {
  Rational d = 1;
  for (const auto& x : cache_->gs.norm2) d *= x;
  return d;
}

GramSchmidtData gram_schmidt(const LatticeBasis& basis) { return basis.gram_schmidt(); }

LatticeBasis dual_basis(const LatticeBasis& basis) { return basis.dual(); }

bool same_lattice(const LatticeBasis& a, const LatticeBasis& b) {
  if (a.rank() != b.rank() || a.ambient_dim() != b.ambient_dim()) return false;
  for (const auto& r : a.vectors())
    if (!b.contains(r)) return false;
  for (const auto& r : b.vectors())
    if (!a.contains(r)) return false;
  return true;
}

BabaiResult babai_nearest_plane_full(const LatticeBasis& basis, const RationalVector& target) {
  const std::size_t n = basis.rank();
  const auto& gs = basis.gram_schmidt();
  RationalVector tau(n);
  for (std::size_t j = 0; j < n; ++j) tau[j] = dot(target, gs.orthogonal[j]) / gs.norm2[j];
  Coefficients x(n, 0);
  std::vector<Integer> xi(n);
  for (std::size_t jj = n; jj-- > 0;) {
    Rational c = tau[jj];
    for (std::size_t k = jj + 1; k < n; ++k)
      if (xi[k] != 0) c -= Rational(xi[k]) * gs.mu[k][jj];
    xi[jj] = round_rational(c);
    x[jj] = to_int64(xi[jj]);
  }
  return {basis.combine(x), x};
}

RationalVector babai_nearest_plane(const LatticeBasis& basis, const RationalVector& target) {
  return babai_nearest_plane_full(basis, target).vector;
}

ReducedForm lll_reduce(const LatticeBasis& basis, const Rational& delta) {
  const std::size_t n = basis.rank();
  RationalMatrix b = basis.vectors();
  std::vector<std::vector<Integer>> u(n, std::vector<Integer>(n, Integer(0)));
  for (std::size_t i = 0; i < n; ++i) u[i][i] = 1;
  GramSchmidtData gs = basis.gram_schmidt();
  auto& mu = gs.mu;
  auto& bn = gs.norm2;

  auto red = [&](std::size_t k, std::size_t l) {
    if (abs(mu[k][l]) <= Rational(1, 2)) return;
    const Integer q = round_rational(mu[k][l]);
    const Rational qr(q);
    axpy(b[k], -qr, b[l]);
    for (std::size_t j = 0; j < n; ++j) u[k][j] -= q * u[l][j];
    mu[k][l] -= qr;
    for (std::size_t j = 0; j < l; ++j) mu[k][j] -= qr * mu[l][j];
  };

  std::size_t k = 1;
  while (n > 1 && k < n) {
    red(k, k - 1);
    if (bn[k] < (delta - mu[k][k - 1] * mu[k][k - 1]) * bn[k - 1]) {
      const Rational m = mu[k][k - 1];
      const Rational bb = bn[k] + m * m * bn[k - 1];
      mu[k][k - 1] = m * bn[k - 1] / bb;
      bn[k] = bn[k - 1] * bn[k] / bb;
      bn[k - 1] = bb;
      std::swap(b[k], b[k - 1]);
      std::swap(u[k], u[k - 1]);
      for (std::size_t j = 0; j + 1 < k; ++j) std::swap(mu[k - 1][j], mu[k][j]);
      for (std::size_t i = k + 1; i < n; ++i) {
        const Rational t = mu[i][k];
        mu[i][k] = mu[i][k - 1] - m * t;
        mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k];
      }
      if (k > 1) --k;
    } else {
      for (std::size_t l = k - 1; l-- > 0;) red(k, l);
      ++k;
    }
  }
  ReducedForm out;
  out.basis = std::make_shared<LatticeBasis>(std::move(b), basis.ambient_dim());
  out.transform.assign(n, Coefficients(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out.transform[i][j] = to_int64(u[i][j]);
  return out;
}

LatticeBasis size_reduce(const LatticeBasis& basis) {
  const std::size_t n = basis.rank();
  RationalMatrix b = basis.vectors();
  RationalMatrix mu = basis.gram_schmidt().mu;
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = i; j-- > 0;) {
      if (abs(mu[i][j]) <= Rational(1, 2)) continue;
      const Rational q(round_rational(mu[i][j]));
      axpy(b[i], -q, b[j]);
      for (std::size_t k = 0; k < j; ++k) mu[i][k] -= q * mu[j][k];
      mu[i][j] -= q;
    }
  }
  return LatticeBasis(std::move(b), basis.ambient_dim());
}

Coefficients ProjectedLattice::lift_coefficients(const Coefficients& c) const {
  Coefficients full(base.rank(), 0);
  for (std::size_t j = 0; j < c.size(); ++j) full[drop_count + j] = c[j];
  return full;
}

RationalVector ProjectedLattice::lift(const Coefficients& c) const { return base.combine(lift_coefficients(c)); }

RationalVector ProjectedLattice::project(const RationalVector& v) const {
  return base.project_out_prefix(v, drop_count);
}

ProjectedLattice project_lattice(const LatticeBasis& basis, std::size_t drop_count) {
  if (drop_count > basis.rank()) throw DomainError("projection index exceeds rank");
  RationalMatrix rows;
  for (std::size_t j = drop_count; j < basis.rank(); ++j) rows.push_back(basis.project_out_prefix(basis.row(j), drop_count));
  return ProjectedLattice{basis, drop_count, LatticeBasis(std::move(rows), basis.ambient_dim())};
}

LatticeBasis read_lattice(std::istream& in) {
  std::size_t n = 0, m = 0;
  if (!(in >> n >> m)) throw DomainError("lattice header must be \"n m\"");
  RationalMatrix rows(n, RationalVector(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      std::string tok;
      if (!(in >> tok)) throw DomainError("lattice file truncated");
      rows[i][j] = parse_rational(tok);
    }
  return LatticeBasis(std::move(rows), m);
}

LatticeBasis read_lattice_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open lattice file " + path);
  return read_lattice(in);
}

void write_lattice(std::ostream& out, const LatticeBasis& basis) {
  out << basis.rank() << ' ' << basis.ambient_dim() << '\n';
  for (const auto& r : basis.vectors()) {
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? " " : "") << format_rational(r[j]);
    out << '\n';
  }
}

void write_lattice_file(const std::string& path, const LatticeBasis& basis) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write lattice file " + path);
  write_lattice(out, basis);
}

}  // namespace latgauss
