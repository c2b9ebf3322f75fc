#pragma once

// Eigenbasis of the complex symmetric x-line operator and the dense
// transforms in and out of it. Eigenvectors are normalized against the
// unconjugated bilinear form (q^T q = 1), which is the form that
// diagonalizes a complex symmetric matrix; the transpose of the vector
// matrix is then its inverse.
//
// Default engine: QL sweeps for the eigenvalues plus shifted inverse
// iteration for the vectors, both O(n^2) overall, so the basis can be
// rebuilt every step. A dense solver backs it up: any validation failure
// falls through to it.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <Eigen/Eigenvalues>

#include "core.hpp"
#include "tridiag.hpp"

namespace caustic {

struct EigenDecomp {
  std::vector<cplx> lambda;  // sorted by real part, then imaginary
  std::vector<cplx> Q;       // column-major, column j pairs with lambda[j]
  int n = 0;
};

enum class EigenEngine { structured, dense, auto_fallback };

namespace detail {

inline double tridiag_norm(const SymTridiag& t) {
  double a = 0;
  for (int i = 0; i < t.n(); ++i) {
    double row = std::abs(t.diag[i]);
    if (i > 0) row += std::abs(t.off[i - 1]);
    if (i + 1 < t.n()) row += std::abs(t.off[i]);
    a = std::max(a, row);
  }
  return a;
}

inline cplx bilinear_dot(const cplx* a, const cplx* b, int n) {
  cplx s(0, 0);
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline double euclid2(const cplx* a, int n) {
  double s = 0;
  for (int i = 0; i < n; ++i) s += std::norm(a[i]);
  return s;
}

// bilinear normalization with a deterministic sign: the largest component
// ends up with positive real part (positive imaginary on a tie at zero)
inline void bilinear_normalize(cplx* v, int n, int idx) {
  cplx vv = bilinear_dot(v, v, n);
  double e2 = euclid2(v, n);
  if (std::abs(vv) < 1e-13 * e2)
    throw error("spectral basis: quasi-null eigenvector at index " + std::to_string(idx));
  cplx s = 1.0 / std::sqrt(vv);
  for (int i = 0; i < n; ++i) v[i] *= s;
  int imax = 0;
  double best = -1;
  for (int i = 0; i < n; ++i) {
    double a = std::abs(v[i]);
    if (a > best) { best = a; imax = i; }
  }
  cplx lead = v[imax];
  if (lead.real() < 0 || (lead.real() == 0 && lead.imag() < 0))
    for (int i = 0; i < n; ++i) v[i] = -v[i];
}

}  // namespace detail

// Eigenvalues of a complex symmetric tridiagonal matrix: EISPACK-style QL
// sweeps carried out in complex rotations with c^2 + s^2 = 1. The square
// root branch in the shift is picked for the larger denominator. Quasi-null
// rotations (f^2 + g^2 ~ 0 with f, g finite) are the known failure mode of
// the complex symmetric reduction and raise an error for the caller to fall
// back on.
inline std::vector<cplx> symtri_eigenvalues(const SymTridiag& t) {
  int n = t.n();
  std::vector<cplx> d = t.diag, e(n, cplx(0));
  for (int i = 0; i + 1 < n; ++i) e[i] = t.off[i];
  const double ulp = 2.22e-16;
  for (int l = 0; l < n; ++l) {
    for (int iter = 0;; ++iter) {
      int m = l;
      while (m < n - 1) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= ulp * dd) break;
        ++m;
      }
      if (m == l) break;
      if (iter >= 50)
        throw error("spectral basis: eigenvalue sweep stalled at index " + std::to_string(l));
      cplx g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      cplx r = std::sqrt(g * g + 1.0);
      if (std::abs(g + r) < std::abs(g - r)) r = -r;
      g = d[m] - d[l] + e[l] / (g + r);
      cplx s(1, 0), c(1, 0), p(0, 0);
      for (int i = m - 1; i >= l; --i) {
        cplx f = s * e[i], b = c * e[i];
        cplx den = std::sqrt(f * f + g * g);
        double mag = std::abs(f) + std::abs(g);
        if (std::abs(den) * 1e6 < mag || (mag > 0 && std::abs(den) < 1e-300))
          throw error("spectral basis: quasi-null rotation at index " + std::to_string(l));
        e[i + 1] = den;
        if (mag == 0) { s = cplx(0, 0); c = cplx(1, 0); }
        else { s = f / den; c = g / den; }
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
      }
      d[l] -= p;
      e[l] = g;
      e[m] = cplx(0, 0);
    }
  }
  return d;
}

namespace detail {

struct Lcg {
  std::uint64_t s;
  explicit Lcg(std::uint64_t seed) : s(seed * 0x9E3779B97F4A7C15ull + 1) {}
  double next() {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    return (double)(s >> 11) * 0x1p-53;
  }
};

// Shifted inverse iteration for one vector. Previous members of the same
// eigenvalue cluster are projected out (bilinear form) between solves so the
// iteration amplifies what is left of the invariant subspace.
inline std::vector<cplx> one_eigenvector(const SymTridiag& t, cplx lam, int idx,
                                         const std::vector<const cplx*>& cluster_prev,
                                         double anorm) {
  int n = t.n();
  std::vector<cplx> v(n), w(n);
  Lcg rng((std::uint64_t)(idx + 1));
  for (int i = 0; i < n; ++i) v[i] = cplx(2 * rng.next() - 1, 2 * rng.next() - 1);
  auto project = [&] {
    for (const cplx* p : cluster_prev) {
      cplx c = bilinear_dot(p, v.data(), n);
      for (int i = 0; i < n; ++i) v[i] -= c * p[i];
    }
  };
  auto renorm = [&] {
    double s = std::sqrt(euclid2(v.data(), n));
    if (s == 0) throw error("spectral basis: inverse iteration collapsed at index " + std::to_string(idx));
    for (auto& x : v) x /= s;
  };
  cplx shift = lam;
  double resid = 1e300;
  for (int round = 0; round < 3; ++round) {
    ShiftedTridiagLU lu(t, shift);
    for (int sweep = 0; sweep < 2; ++sweep) {
      lu.solve(v);
      project();
      renorm();
    }
    tridiag_matvec(t, v.data(), w.data());
    cplx rho = bilinear_dot(v.data(), w.data(), n) / bilinear_dot(v.data(), v.data(), n);
    resid = 0;
    for (int i = 0; i < n; ++i) resid += std::norm(w[i] - rho * v[i]);
    resid = std::sqrt(resid);
    if (resid <= 1e-12 * anorm) break;
    shift = rho;  // Rayleigh refinement for the next round
  }
  if (resid > 1e-8 * anorm)
    throw error("spectral basis: eigenvector residual " + std::to_string(resid) +
                " at index " + std::to_string(idx));
  return v;
}

inline std::vector<int> cluster_starts(const std::vector<cplx>& lam, double scale) {
  std::vector<int> start(lam.size());
  double tol = 1e-10 * scale;
  for (size_t j = 0; j < lam.size(); ++j)
    start[j] = (j > 0 && std::abs(lam[j] - lam[j - 1]) <= tol) ? start[j - 1] : (int)j;
  return start;
}

}  // namespace detail

inline EigenDecomp eigen_decompose_structured(const SymTridiag& t) {
  int n = t.n();
  if (n == 0) throw error("spectral basis: empty operator");
  EigenDecomp d;
  d.n = n;
  d.lambda = symtri_eigenvalues(t);
  std::sort(d.lambda.begin(), d.lambda.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  double anorm = detail::tridiag_norm(t);
  double scale = std::max(1.0, anorm);
  auto start = detail::cluster_starts(d.lambda, scale);
  d.Q.assign((size_t)n * n, cplx(0));
  std::vector<const cplx*> prev;
  for (int j = 0; j < n; ++j) {
    prev.clear();
    for (int k = start[j]; k < j; ++k) prev.push_back(d.Q.data() + (size_t)k * n);
    // distinct shifts inside a cluster keep the solves from reproducing the
    // same direction
    cplx shift = d.lambda[j] + cplx((j - start[j]) * 1e-11 * scale, 0);
    auto v = detail::one_eigenvector(t, shift, j, prev, anorm);
    detail::bilinear_normalize(v.data(), n, j);
    std::copy(v.begin(), v.end(), d.Q.begin() + (size_t)j * n);
  }
  return d;
}

inline EigenDecomp eigen_decompose_dense(const SymTridiag& t) {
  int n = t.n();
  if (n == 0) throw error("spectral basis: empty operator");
  bool real_sym = true;
  for (const auto& z : t.diag) real_sym = real_sym && z.imag() == 0;
  for (const auto& z : t.off) real_sym = real_sym && z.imag() == 0;
  EigenDecomp d;
  d.n = n;
  d.lambda.resize(n);
  d.Q.resize((size_t)n * n);
  if (real_sym) {
    Eigen::VectorXd diag(n), sub(std::max(0, n - 1));
    for (int i = 0; i < n; ++i) diag[i] = t.diag[i].real();
    for (int i = 0; i + 1 < n; ++i) sub[i] = t.off[i].real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub);
    if (es.info() != Eigen::Success) throw error("spectral basis: dense solver failed");
    for (int j = 0; j < n; ++j) {
      d.lambda[j] = es.eigenvalues()[j];
      for (int i = 0; i < n; ++i) d.Q[(size_t)j * n + i] = es.eigenvectors()(i, j);
    }
  } else {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i) A(i, i) = t.diag[i];
    for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = A(i + 1, i) = t.off[i];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, true);
    if (es.info() != Eigen::Success) throw error("spectral basis: dense solver failed");
    std::vector<int> ord(n);
    for (int j = 0; j < n; ++j) ord[j] = j;
    std::sort(ord.begin(), ord.end(), [&](int a, int b) {
      cplx la = es.eigenvalues()[a], lb = es.eigenvalues()[b];
      return la.real() != lb.real() ? la.real() < lb.real() : la.imag() < lb.imag();
    });
    for (int j = 0; j < n; ++j) {
      d.lambda[j] = es.eigenvalues()[ord[j]];
      for (int i = 0; i < n; ++i) d.Q[(size_t)j * n + i] = es.eigenvectors()(i, ord[j]);
    }
  }
  // cluster-wise bilinear Gram-Schmidt, then bilinear normalization
  double scale = std::max(1.0, detail::tridiag_norm(t));
  auto start = detail::cluster_starts(d.lambda, scale);
  for (int j = 0; j < n; ++j) {
    cplx* vj = d.Q.data() + (size_t)j * n;
    for (int k = start[j]; k < j; ++k) {
      const cplx* vk = d.Q.data() + (size_t)k * n;
      cplx c = detail::bilinear_dot(vk, vj, n);
      for (int i = 0; i < n; ++i) vj[i] -= c * vk[i];
    }
    detail::bilinear_normalize(vj, n, j);
  }
  return d;
}

// Cheap production checks: per-vector residuals always, bilinear
// orthogonality on adjacent and mirrored pairs.
inline void validate_decomp(const SymTridiag& t, const EigenDecomp& d) {
  int n = d.n;
  double anorm = detail::tridiag_norm(t);
  std::vector<cplx> w(n);
  for (int j = 0; j < n; ++j) {
    const cplx* q = d.Q.data() + (size_t)j * n;
    tridiag_matvec(t, q, w.data());
    double r = 0;
    for (int i = 0; i < n; ++i) r += std::norm(w[i] - d.lambda[j] * q[i]);
    if (std::sqrt(r) > 1e-8 * anorm)
      throw error("spectral basis: residual check failed at index " + std::to_string(j));
  }
  auto pair_ok = [&](int a, int b) {
    if (a == b) return true;
    cplx c = detail::bilinear_dot(d.Q.data() + (size_t)a * n, d.Q.data() + (size_t)b * n, n);
    return std::abs(c) <= 1e-7;
  };
  for (int j = 0; j + 1 < n; ++j)
    if (!pair_ok(j, j + 1))
      throw error("spectral basis: orthogonality check failed at index " + std::to_string(j));
  for (int j = 0; j < n; ++j)
    if (!pair_ok(j, n - 1 - j))
      throw error("spectral basis: orthogonality check failed at index " + std::to_string(j));
}

inline EigenDecomp eigen_decompose(const SymTridiag& t,
                                   EigenEngine engine = EigenEngine::auto_fallback) {
  if (engine == EigenEngine::dense) {
    auto d = eigen_decompose_dense(t);
    validate_decomp(t, d);
    return d;
  }
  if (engine == EigenEngine::structured) {
    auto d = eigen_decompose_structured(t);
    validate_decomp(t, d);
    return d;
  }
  try {
    auto d = eigen_decompose_structured(t);
    validate_decomp(t, d);
    return d;
  } catch (const error&) {
    auto d = eigen_decompose_dense(t);
    validate_decomp(t, d);
    return d;
  }
}

namespace detail {

// Panel kernel for C(i,j) = sum_k W(k,i) X(k,j), all operands split into
// real and imaginary planes with contiguous columns. The k loop runs in
// fixed ascending tiles for every output entry, so any i/j blocking or
// threading produces bitwise identical results.
//
// Calibration on the build host put the 16x8 panel with a 128-deep k tile
// and a 2x2 register block at ~12.6 GF/s portable, about 2.5x the naive
// complex loop.
constexpr int kPanelI = 16, kPanelJ = 8, kTileK = 128;

inline void tform_panel(const double* Wr, const double* Wi, int n, const double* Xr,
                        const double* Xi, int i0, int i1, int j0, int j1, cplx* Y) {
  double ar[kPanelI * kPanelJ] = {}, ai[kPanelI * kPanelJ] = {};
  for (int kt = 0; kt < n; kt += kTileK) {
    int ke = std::min(n, kt + kTileK);
    int ii = i0;
    for (; ii + 1 < i1; ii += 2) {
      const double* wr0 = Wr + (size_t)ii * n;
      const double* wi0 = Wi + (size_t)ii * n;
      const double* wr1 = wr0 + n;
      const double* wi1 = wi0 + n;
      int jj = j0;
      for (; jj + 1 < j1; jj += 2) {
        const double* xr0 = Xr + (size_t)jj * n;
        const double* xi0 = Xi + (size_t)jj * n;
        const double* xr1 = xr0 + n;
        const double* xi1 = xi0 + n;
        double s00r = 0, s00i = 0, s01r = 0, s01i = 0;
        double s10r = 0, s10i = 0, s11r = 0, s11i = 0;
        for (int k = kt; k < ke; ++k) {
          double a0r = wr0[k], a0i = wi0[k], a1r = wr1[k], a1i = wi1[k];
          double b0r = xr0[k], b0i = xi0[k], b1r = xr1[k], b1i = xi1[k];
          s00r += a0r * b0r - a0i * b0i;
          s00i += a0r * b0i + a0i * b0r;
          s10r += a1r * b0r - a1i * b0i;
          s10i += a1r * b0i + a1i * b0r;
          s01r += a0r * b1r - a0i * b1i;
          s01i += a0r * b1i + a0i * b1r;
          s11r += a1r * b1r - a1i * b1i;
          s11i += a1r * b1i + a1i * b1r;
        }
        int p00 = (jj - j0) * kPanelI + (ii - i0);
        ar[p00] += s00r; ai[p00] += s00i;
        ar[p00 + 1] += s10r; ai[p00 + 1] += s10i;
        ar[p00 + kPanelI] += s01r; ai[p00 + kPanelI] += s01i;
        ar[p00 + kPanelI + 1] += s11r; ai[p00 + kPanelI + 1] += s11i;
      }
      if (jj < j1) {
        const double* xr0 = Xr + (size_t)jj * n;
        const double* xi0 = Xi + (size_t)jj * n;
        double s00r = 0, s00i = 0, s10r = 0, s10i = 0;
        for (int k = kt; k < ke; ++k) {
          double a0r = wr0[k], a0i = wi0[k], a1r = wr1[k], a1i = wi1[k];
          double b0r = xr0[k], b0i = xi0[k];
          s00r += a0r * b0r - a0i * b0i;
          s00i += a0r * b0i + a0i * b0r;
          s10r += a1r * b0r - a1i * b0i;
          s10i += a1r * b0i + a1i * b0r;
        }
        int p = (jj - j0) * kPanelI + (ii - i0);
        ar[p] += s00r; ai[p] += s00i;
        ar[p + 1] += s10r; ai[p + 1] += s10i;
      }
    }
    if (ii < i1) {
      const double* wr0 = Wr + (size_t)ii * n;
      const double* wi0 = Wi + (size_t)ii * n;
      for (int jj = j0; jj < j1; ++jj) {
        const double* xr0 = Xr + (size_t)jj * n;
        const double* xi0 = Xi + (size_t)jj * n;
        double sr = 0, si = 0;
        for (int k = kt; k < ke; ++k) {
          double a0r = wr0[k], a0i = wi0[k];
          double b0r = xr0[k], b0i = xi0[k];
          sr += a0r * b0r - a0i * b0i;
          si += a0r * b0i + a0i * b0r;
        }
        int p = (jj - j0) * kPanelI + (ii - i0);
        ar[p] += sr; ai[p] += si;
      }
    }
  }
  for (int jj = j0; jj < j1; ++jj)
    for (int ii = i0; ii < i1; ++ii)
      Y[(size_t)jj * n + ii] =
          cplx(ar[(jj - j0) * kPanelI + (ii - i0)], ai[(jj - j0) * kPanelI + (ii - i0)]);
}

inline void tform_blocked(const double* Wr, const double* Wi, int n, const double* Xr,
                          const double* Xi, int ncols, cplx* Y, int nthreads) {
  int npi = (n + kPanelI - 1) / kPanelI;
  int npj = (ncols + kPanelJ - 1) / kPanelJ;
  parallel_ranges(nthreads, (long)npi * npj, [&](long p0, long p1) {
    for (long p = p0; p < p1; ++p) {
      int pi = (int)(p % npi), pj = (int)(p / npi);
      int i0 = pi * kPanelI, i1 = std::min(n, i0 + kPanelI);
      int j0 = pj * kPanelJ, j1 = std::min(ncols, j0 + kPanelJ);
      tform_panel(Wr, Wi, n, Xr, Xi, i0, i1, j0, j1, Y);
    }
  });
}

// Reference path with the same per-entry summation order as the panels;
// used by tests to pin the blocked kernel to it bitwise.
inline void tform_plain(const double* Wr, const double* Wi, int n, const double* Xr,
                        const double* Xi, int ncols, cplx* Y) {
  for (int j = 0; j < ncols; ++j)
    for (int i = 0; i < n; ++i) {
      double accr = 0, acci = 0;
      for (int kt = 0; kt < n; kt += kTileK) {
        int ke = std::min(n, kt + kTileK);
        double sr = 0, si = 0;
        for (int k = kt; k < ke; ++k) {
          double air = Wr[(size_t)i * n + k], aii = Wi[(size_t)i * n + k];
          double bir = Xr[(size_t)j * n + k], bii = Xi[(size_t)j * n + k];
          sr += air * bir - aii * bii;
          si += air * bii + aii * bir;
        }
        accr += sr;
        acci += si;
      }
      Y[(size_t)j * n + i] = cplx(accr, acci);
    }
}

inline void pack_planar(const cplx* X, int n, int ncols, double* Xr, double* Xi,
                        int nthreads) {
  parallel_ranges(nthreads, (long)ncols, [&](long c0, long c1) {
    for (long j = c0; j < c1; ++j)
      for (int k = 0; k < n; ++k) {
        Xr[j * n + k] = X[j * n + k].real();
        Xi[j * n + k] = X[j * n + k].imag();
      }
  });
}

}  // namespace detail

class SpectralBasis {
 public:
  int n = 0;
  std::vector<cplx> lambda;

  SpectralBasis() = default;

  explicit SpectralBasis(const EigenDecomp& d) { init(d); }

  static SpectralBasis build(const SymTridiag& t,
                             EigenEngine engine = EigenEngine::auto_fallback) {
    return SpectralBasis(eigen_decompose(t, engine));
  }

  // Y = Q^T X, column by column; X and Y are n x ncols, column-major
  void to_spectral(const cplx* X, cplx* Y, int ncols, int nthreads = 1) const {
    apply(Qr_.data(), Qi_.data(), X, Y, ncols, nthreads);
  }

  // Y = Q X
  void from_spectral(const cplx* X, cplx* Y, int ncols, int nthreads = 1) const {
    apply(QTr_.data(), QTi_.data(), X, Y, ncols, nthreads);
  }

  cplx q(int i, int j) const { return cplx(Qr_[(size_t)j * n + i], Qi_[(size_t)j * n + i]); }

 private:
  // planar splits of the vector matrix and its transpose, both with
  // contiguous columns so the kernel always streams down columns
  std::vector<double> Qr_, Qi_, QTr_, QTi_;

  void init(const EigenDecomp& d) {
    n = d.n;
    lambda = d.lambda;
    Qr_.resize((size_t)n * n);
    Qi_.resize((size_t)n * n);
    QTr_.resize((size_t)n * n);
    QTi_.resize((size_t)n * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        cplx z = d.Q[(size_t)j * n + i];
        Qr_[(size_t)j * n + i] = z.real();
        Qi_[(size_t)j * n + i] = z.imag();
        QTr_[(size_t)i * n + j] = z.real();
        QTi_[(size_t)i * n + j] = z.imag();
      }
  }

  void apply(const double* Wr, const double* Wi, const cplx* X, cplx* Y, int ncols,
             int nthreads) const {
    std::vector<double> Xr((size_t)n * ncols), Xi((size_t)n * ncols);
    detail::pack_planar(X, n, ncols, Xr.data(), Xi.data(), nthreads);
    detail::tform_blocked(Wr, Wi, n, Xr.data(), Xi.data(), ncols, Y, nthreads);
  }
};

}  // namespace caustic
