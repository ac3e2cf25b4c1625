#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "modcont/elliptic.hpp"
#include "modcont/errors.hpp"

namespace modcont {

namespace {

struct Lattice {
  int n;       // dimension
  int N;       // points per axis
  double h;
  std::size_t size;
  std::array<std::size_t, 3> stride{};
};

Lattice lattice_of(const SampledField& f) {
  for (int s : f.shape())
    if (s != f.shape()[0]) throw std::invalid_argument("dirichlet: lattice must be square/cubic");
  Lattice L{f.dim(), f.shape()[0], f.h(), f.size(), {}};
  std::size_t s = 1;
  for (int a = L.n - 1; a >= 0; --a) {
    L.stride[a] = s;
    s *= static_cast<std::size_t>(L.N);
  }
  return L;
}

bool interior(const Lattice& L, std::size_t k) {
  for (int a = 0; a < L.n; ++a) {
    const int i = static_cast<int>(k / L.stride[a] % static_cast<std::size_t>(L.N));
    if (i == 0 || i == L.N - 1) return false;
  }
  return true;
}

// y = A x on interior points; boundary entries of x are taken as zero.
void apply(const EllipticOperator& op, const Lattice& L, const std::vector<char>& mask,
           const std::vector<double>& x, std::vector<double>& y) {
  const double ih2 = 1.0 / (L.h * L.h);
  for (std::size_t k = 0; k < L.size; ++k) {
    if (!mask[k]) {
      y[k] = 0.0;
      continue;
    }
    double s = 0.0;
    for (int a = 0; a < L.n; ++a) {
      const std::size_t d = L.stride[a];
      s += op.a(a, a) * (x[k + d] - 2.0 * x[k] + x[k - d]);
      for (int b = a + 1; b < L.n; ++b) {
        const double ab = op.a(a, b);
        if (ab == 0.0) continue;
        const std::size_t e = L.stride[b];
        s += 0.5 * ab * (x[k + d + e] - x[k + d - e] - x[k - d + e] + x[k - d - e]);
      }
    }
    y[k] = s * ih2;
  }
}

// Exact inverse of −Σ a_ii D_ii on the interior by a type-I sine transform.
class DiagonalPreconditioner {
 public:
  DiagonalPreconditioner(const EllipticOperator& op, const Lattice& L) : L_(L) {
    m_ = L.N - 2;
    std::size_t total = 1;
    for (int a = 0; a < L.n; ++a) total *= static_cast<std::size_t>(m_);
    buf_ = fftw_alloc_real(total);
    if (!buf_) throw std::bad_alloc();
    std::vector<int> dims(static_cast<std::size_t>(L.n), m_);
    std::vector<fftw_r2r_kind> kinds(static_cast<std::size_t>(L.n), FFTW_RODFT00);
    plan_ = fftw_plan_r2r(L.n, dims.data(), buf_, buf_, kinds.data(), FFTW_ESTIMATE);
    // Eigenvalues and the transform normalization folded together.
    inv_eig_.resize(total);
    const double norm = std::pow(2.0 * (m_ + 1), L.n);
    for (std::size_t q = 0; q < total; ++q) {
      double lam = 0.0;
      std::size_t rem = q;
      for (int a = L.n - 1; a >= 0; --a) {
        const int k = static_cast<int>(rem % static_cast<std::size_t>(m_)) + 1;
        rem /= static_cast<std::size_t>(m_);
        const double s = std::sin(std::numbers::pi * k / (2.0 * (m_ + 1)));
        lam += op.a(a, a) * 4.0 * s * s / (L.h * L.h);
      }
      inv_eig_[q] = 1.0 / (lam * norm);
    }
  }
  ~DiagonalPreconditioner() {
    fftw_destroy_plan(plan_);
    fftw_free(buf_);
  }
  DiagonalPreconditioner(const DiagonalPreconditioner&) = delete;
  DiagonalPreconditioner& operator=(const DiagonalPreconditioner&) = delete;

  void solve(const std::vector<double>& r, std::vector<double>& z) {
    gather(r);
    fftw_execute(plan_);
    for (std::size_t q = 0; q < inv_eig_.size(); ++q) buf_[q] *= inv_eig_[q];
    fftw_execute(plan_);
    scatter(z);
  }

 private:
  // Interior of the full lattice <-> compact m^n buffer.
  template <class F>
  void for_interior(F&& f) const {
    std::size_t q = 0;
    const int M = m_;
    if (L_.n == 2) {
      for (int i = 1; i <= M; ++i)
        for (int j = 1; j <= M; ++j) f(q++, i * L_.stride[0] + j);
    } else {
      for (int i = 1; i <= M; ++i)
        for (int j = 1; j <= M; ++j)
          for (int k = 1; k <= M; ++k) f(q++, i * L_.stride[0] + j * L_.stride[1] + k);
    }
  }
  void gather(const std::vector<double>& r) {
    for_interior([&](std::size_t q, std::size_t k) { buf_[q] = r[k]; });
  }
  void scatter(std::vector<double>& z) const {
    std::fill(z.begin(), z.end(), 0.0);
    for_interior([&](std::size_t q, std::size_t k) { z[k] = buf_[q]; });
  }

  Lattice L_;
  int m_;
  double* buf_ = nullptr;
  fftw_plan plan_{};
  std::vector<double> inv_eig_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

SampledField apply_operator(const EllipticOperator& op, const SampledField& u) {
  if (u.dim() != op.n()) throw std::invalid_argument("apply_operator: dimension mismatch");
  const Lattice L = lattice_of(u);
  std::vector<char> mask(L.size);
  for (std::size_t k = 0; k < L.size; ++k) mask[k] = interior(L, k);
  std::vector<double> x(u.values().begin(), u.values().end()), y(L.size);
  for (std::size_t k = 0; k < L.size; ++k)
    if (!mask[k]) x[k] = 0.0;
  apply(op, L, mask, x, y);
  return SampledField(u.shape(), u.h(), u.origin(), std::move(y));
}

SampledField solve_dirichlet(const DirichletProblem& problem, double tol, SolveStats* stats,
                             int max_iterations) {
  const EllipticOperator& op = problem.op;
  const SampledField& f = problem.rhs;
  if (f.dim() != op.n()) throw std::invalid_argument("solve_dirichlet: dimension mismatch");
  const Lattice L = lattice_of(f);
  if (L.N < 3) throw std::invalid_argument("solve_dirichlet: lattice interior is empty");

  std::vector<char> mask(L.size);
  for (std::size_t k = 0; k < L.size; ++k) mask[k] = interior(L, k);

  // Solve B u = b with B = −A (symmetric positive definite) and b = −f.
  std::vector<double> b(L.size, 0.0);
  for (std::size_t k = 0; k < L.size; ++k)
    if (mask[k]) b[k] = -f.values()[k];
  const double bnorm = std::sqrt(dot(b, b));
  std::vector<double> u(L.size, 0.0);
  SolveStats st;
  if (bnorm == 0.0) {
    if (stats) *stats = st;
    return SampledField(f.shape(), f.h(), f.origin(), u);
  }

  DiagonalPreconditioner pre(op, L);
  std::vector<double> r = b, z(L.size), p(L.size), Ap(L.size);
  pre.solve(r, z);
  p = z;
  double rz = dot(r, z);
  double rel = 1.0;
  int it = 0;
  for (; it < max_iterations; ++it) {
    apply(op, L, mask, p, Ap);
    for (double& v : Ap) v = -v;
    const double alpha = rz / dot(p, Ap);
    for (std::size_t k = 0; k < L.size; ++k) {
      u[k] += alpha * p[k];
      r[k] -= alpha * Ap[k];
    }
    rel = std::sqrt(dot(r, r)) / bnorm;
    if (rel <= tol) {
      ++it;
      break;
    }
    pre.solve(r, z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < L.size; ++k) p[k] = z[k] + beta * p[k];
  }

  // Report the true residual, not the recurrence.
  std::vector<double> Au(L.size);
  apply(op, L, mask, u, Au);
  double res2 = 0.0;
  for (std::size_t k = 0; k < L.size; ++k)
    if (mask[k]) res2 += (f.values()[k] - Au[k]) * (f.values()[k] - Au[k]);
  st.iterations = it;
  st.residual = std::sqrt(res2) / bnorm;
  if (stats) *stats = st;
  if (!(rel <= tol)) {
    std::ostringstream os;
    os << "solve_dirichlet: no convergence after " << max_iterations
       << " iterations, relative residual " << st.residual;
    throw ConvergenceError(os.str(), st.residual);
  }
  return SampledField(f.shape(), f.h(), f.origin(), std::move(u));
}

int hessian_index(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  // Row-major upper triangle: (0,0),(0,1),..,(0,n-1),(1,1),...
  return i * n - i * (i - 1) / 2 + (j - i);
}

std::vector<SampledField> hessian(const SampledField& u) {
  const int n = u.dim();
  for (int s : u.shape())
    if (s < 5) throw std::invalid_argument("hessian: need at least 5 points per axis");
  std::array<std::size_t, 3> stride{};
  {
    std::size_t s = 1;
    for (int a = n - 1; a >= 0; --a) {
      stride[a] = s;
      s *= static_cast<std::size_t>(u.shape()[a]);
    }
  }
  const SampledField inner = u.shrink(1);
  const double ih2 = 1.0 / (u.h() * u.h());
  auto v = u.values();
  std::vector<SampledField> out;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      std::vector<double> vals(inner.size());
      for (std::size_t q = 0; q < inner.size(); ++q) {
        Index idx = inner.unflat(q);
        for (int a = 0; a < n; ++a) ++idx[a];
        const std::size_t k = u.flat(idx);
        const std::size_t d = stride[i], e = stride[j];
        vals[q] = i == j ? (v[k + d] - 2.0 * v[k] + v[k - d]) * ih2
                         : 0.25 * (v[k + d + e] - v[k + d - e] - v[k - d + e] + v[k - d - e]) * ih2;
      }
      out.emplace_back(inner.shape(), inner.h(), inner.origin(), std::move(vals));
    }
  return out;
}

}  // namespace modcont
