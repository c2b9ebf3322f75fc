#pragma once

// Right-preconditioned GMRES, not restarted, zero initial guess. Modified
// Gram-Schmidt with a single extra pass whenever the norm drops by more than
// half during orthogonalization. The Krylov basis grows lazily so memory
// follows the actual iteration count. Vector reductions stay single-threaded
// on purpose: the iteration history must not depend on the thread count.

#include <cmath>
#include <functional>

#include "core.hpp"

namespace caustic {

struct GmresOptions {
  double tol = 1e-6;
  int max_iter = 100;
  double breakdown = 1e-14;  // happy-breakdown threshold relative to |b|
  int nthreads = 1;
  bool final_residual = true;  // recompute |b - Ax| after the solve
};

struct GmresResult {
  int iters = 0;
  bool converged = false;
  double rel_residual = 0;    // least-squares estimate
  double true_residual = -1;  // set when final_residual is on
  std::vector<double> history;
};

namespace detail {

inline cplx hdot(const cplx* a, const cplx* b, long n) {
  cplx s(0, 0);
  for (long i = 0; i < n; ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double nrm2(const cplx* a, long n) {
  double s = 0;
  for (long i = 0; i < n; ++i) s += std::norm(a[i]);
  return std::sqrt(s);
}

}  // namespace detail

// A and P are callables (const cplx* in, cplx* out); P approximates the
// inverse. Solves A x = b with x = P t, t found in the Krylov space of A P.
template <class ApplyA, class ApplyP>
GmresResult gmres_solve(long n, ApplyA&& A, ApplyP&& P, const cplx* b, cplx* x,
                        const GmresOptions& opt) {
  GmresResult res;
  double bnorm = detail::nrm2(b, n);
  if (bnorm == 0) {
    for (long i = 0; i < n; ++i) x[i] = cplx(0);
    res.converged = true;
    res.true_residual = 0;
    return res;
  }
  std::vector<std::vector<cplx>> V;
  V.emplace_back(b, b + n);
  for (auto& z : V[0]) z /= bnorm;

  std::vector<std::vector<cplx>> H;  // H[k] holds column k, length k+2
  std::vector<double> gcs;           // Givens cosines (real)
  std::vector<cplx> gsn;             // Givens sines
  std::vector<cplx> g{cplx(bnorm, 0)};

  std::vector<cplx> z(n), w(n);
  int k = 0;
  bool happy = false;
  for (; k < opt.max_iter; ++k) {
    P(V[k].data(), z.data());
    A(z.data(), w.data());
    std::vector<cplx> h(k + 2, cplx(0));
    double pre = detail::nrm2(w.data(), n);
    for (int i = 0; i <= k; ++i) {
      cplx c = detail::hdot(V[i].data(), w.data(), n);
      h[i] = c;
      const cplx* vi = V[i].data();
      for (long t = 0; t < n; ++t) w[t] -= c * vi[t];
    }
    double post = detail::nrm2(w.data(), n);
    if (post < 0.5 * pre) {
      for (int i = 0; i <= k; ++i) {
        cplx c = detail::hdot(V[i].data(), w.data(), n);
        h[i] += c;
        const cplx* vi = V[i].data();
        for (long t = 0; t < n; ++t) w[t] -= c * vi[t];
      }
      post = detail::nrm2(w.data(), n);
    }
    h[k + 1] = cplx(post, 0);

    // accumulated rotations, then one new rotation to kill h[k+1]
    for (int i = 0; i < k; ++i) {
      cplx t0 = gcs[i] * h[i] + gsn[i] * h[i + 1];
      cplx t1 = -std::conj(gsn[i]) * h[i] + gcs[i] * h[i + 1];
      h[i] = t0;
      h[i + 1] = t1;
    }
    double hk = std::abs(h[k]);
    double r = std::sqrt(hk * hk + post * post);
    double cs;
    cplx sn;
    if (r == 0) {
      cs = 1;
      sn = cplx(0, 0);
    } else if (hk == 0) {
      cs = 0;
      sn = cplx(1, 0);
    } else {
      cs = hk / r;
      sn = (h[k] / hk) * (post / r);
    }
    gcs.push_back(cs);
    gsn.push_back(sn);
    h[k] = cs * h[k] + sn * cplx(post, 0);
    h[k + 1] = cplx(0, 0);
    g.push_back(-std::conj(sn) * g[k]);
    g[k] = cs * g[k];
    H.push_back(std::move(h));

    double rr = std::abs(g[k + 1]) / bnorm;
    res.history.push_back(rr);
    if (post <= opt.breakdown * bnorm) {
      happy = true;
      ++k;
      break;
    }
    if (rr <= opt.tol) {
      ++k;
      break;
    }
    V.emplace_back(n);
    cplx* vk = V.back().data();
    double inv = 1.0 / post;
    for (long t = 0; t < n; ++t) vk[t] = w[t] * inv;
  }
  res.iters = k;
  res.rel_residual = res.history.empty() ? 1.0 : res.history.back();
  res.converged = happy || res.rel_residual <= opt.tol;

  // back-substitute y from the rotated Hessenberg, combine, unprecondition
  std::vector<cplx> y(k);
  for (int i = k - 1; i >= 0; --i) {
    cplx acc = g[i];
    for (int j = i + 1; j < k; ++j) acc -= H[j][i] * y[j];
    // a zero pivot only appears on an exact happy breakdown; that basis
    // vector then carries no weight
    y[i] = H[i][i] == cplx(0) ? cplx(0) : acc / H[i][i];
  }
  for (long t = 0; t < n; ++t) z[t] = cplx(0);
  for (int i = 0; i < k; ++i) {
    const cplx* vi = V[i].data();
    cplx yi = y[i];
    for (long t = 0; t < n; ++t) z[t] += yi * vi[t];
  }
  P(z.data(), x);

  if (opt.final_residual) {
    A(x, w.data());
    double s = 0;
    for (long t = 0; t < n; ++t) s += std::norm(b[t] - w[t]);
    res.true_residual = std::sqrt(s) / bnorm;
  }
  return res;
}

}  // namespace caustic
