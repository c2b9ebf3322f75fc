#pragma once

// Block cyclic reduction for the central strip, run per spectral mode. In
// the eigenbasis of the x-line operator the strip decouples into n scalar
// tridiagonal systems of size 2^k - 1 sharing one geometry: constant
// off-diagonal gamma, interior diagonal lambda_j + shift, and the radiating
// closure beta added on the first and last rows.
//
// Reduction keeps the even-numbered rows, so the surviving global indices at
// level r are the multiples of 2^r. The first and last kept rows always sit
// next to the previous level's closure rows, which is why the edge diagonal
// follows its own recursion. Everything is precomputed into per-level tables
// of gamma, 1/lambda and the edge/final variants; the solve is then pure
// sweeps over the right-hand side, done in place.

#include "core.hpp"

namespace caustic {

class CyclicReduction {
 public:
  int n = 0;     // spectral modes
  int k = 0;     // levels, strip has 2^k - 1 rows
  int nc = 0;

  CyclicReduction() = default;

  CyclicReduction(const std::vector<cplx>& lambda, cplx shift, cplx beta, double gamma,
                  int klev) {
    n = (int)lambda.size();
    k = klev;
    if (k < 1) throw error("cyclic reduction: need at least one level");
    if (n < 1) throw error("cyclic reduction: no spectral modes");
    nc = (1 << k) - 1;
    gamma0_ = gamma;
    int lev = k - 1;  // reduction levels; zero when the strip is one row
    gam_.resize((size_t)lev * n);
    invL_.resize((size_t)lev * n);
    invBL_.resize((size_t)lev * n);
    invCL_.resize(n);
    std::vector<cplx> L(n), BL(n), G(n, cplx(gamma, 0));
    for (int j = 0; j < n; ++j) {
      L[j] = lambda[j] + shift;
      BL[j] = L[j] + beta;
    }
    auto checked_inv = [&](cplx z, int r, int j, const char* what) {
      if (std::abs(z) < 1e-300)
        throw error(std::string("cyclic reduction: ") + what + " pivot broke down at level " +
                    std::to_string(r) + ", mode " + std::to_string(j));
      return 1.0 / z;
    };
    if (k == 1) {
      for (int j = 0; j < n; ++j) invCL_[j] = checked_inv(L[j] + beta + beta, 0, j, "final");
      return;
    }
    for (int r = 0; r <= k - 2; ++r) {
      for (int j = 0; j < n; ++j) {
        gam_[(size_t)r * n + j] = G[j];
        invL_[(size_t)r * n + j] = checked_inv(L[j], r, j, "interior");
        invBL_[(size_t)r * n + j] = checked_inv(BL[j], r, j, "closure");
      }
      if (r == k - 2) {
        for (int j = 0; j < n; ++j) {
          cplx g2 = G[j] * G[j];
          invCL_[j] = checked_inv(L[j] - 2.0 * g2 * invBL_[(size_t)r * n + j], r, j, "final");
        }
      } else {
        for (int j = 0; j < n; ++j) {
          cplx iL = invL_[(size_t)r * n + j];
          cplx iBL = invBL_[(size_t)r * n + j];
          cplx g2 = G[j] * G[j];
          cplx Lnew = L[j] - 2.0 * g2 * iL;
          BL[j] = L[j] - g2 * iBL - g2 * iL;
          G[j] = -g2 * iL;
          L[j] = Lnew;
        }
      }
    }
  }

  // F holds nc columns of n modes each (column-major, column = strip row);
  // replaced by the solution
  void solve(cplx* F, int nthreads = 1) const {
    parallel_ranges(nthreads, n, [&](long j0, long j1) { solve_modes(F, j0, j1); });
  }

  // operator apply in the same layout, for residual checks
  void apply(const cplx* X, cplx* Y, const std::vector<cplx>& lambda, cplx shift, cplx beta,
             int nthreads = 1) const {
    parallel_ranges(nthreads, n, [&](long j0, long j1) {
      for (int m = 0; m < nc; ++m) {
        const cplx* xm = X + (size_t)m * n;
        cplx* ym = Y + (size_t)m * n;
        for (long j = j0; j < j1; ++j) {
          cplx d = lambda[j] + shift;
          if (m == 0 || m == nc - 1) d += beta;
          cplx acc = d * xm[j];
          if (m > 0) acc += gamma0_ * (xm - n)[j];
          if (m + 1 < nc) acc += gamma0_ * (xm + n)[j];
          ym[j] = acc;
        }
      }
    });
  }

  double gamma0() const { return gamma0_; }

 private:
  double gamma0_ = 0;
  std::vector<cplx> gam_, invL_, invBL_, invCL_;

  void solve_modes(cplx* F, long j0, long j1) const {
    auto col = [&](long g) { return F + (g - 1) * (size_t)n; };  // g is 1-based
    for (int r = 0; r <= k - 2; ++r) {
      long step = 1L << r;
      long m_next = (1L << (k - r - 1)) - 1;
      const cplx* G = gam_.data() + (size_t)r * n;
      const cplx* iL = invL_.data() + (size_t)r * n;
      const cplx* iBL = invBL_.data() + (size_t)r * n;
      for (long q = 1; q <= m_next; ++q) {
        cplx* fg = col(q * 2 * step);
        const cplx* fl = col(q * 2 * step - step);
        const cplx* fr = col(q * 2 * step + step);
        const cplx* dl = (q == 1) ? iBL : iL;
        const cplx* dr = (q == m_next) ? iBL : iL;
        for (long j = j0; j < j1; ++j)
          fg[j] -= G[j] * (fl[j] * dl[j] + fr[j] * dr[j]);
      }
    }
    {
      cplx* fg = col(1L << (k - 1));
      for (long j = j0; j < j1; ++j) fg[j] *= invCL_[j];
    }
    for (int r = k - 2; r >= 0; --r) {
      long step = 1L << r;
      long m_r = (1L << (k - r)) - 1;
      const cplx* G = gam_.data() + (size_t)r * n;
      const cplx* iL = invL_.data() + (size_t)r * n;
      const cplx* iBL = invBL_.data() + (size_t)r * n;
      for (long p = 1; p <= m_r; p += 2) {
        cplx* fg = col(p * step);
        const cplx* ul = p > 1 ? col(p * step - step) : nullptr;
        const cplx* ur = p < m_r ? col(p * step + step) : nullptr;
        const cplx* d = (p == 1 || p == m_r) ? iBL : iL;
        for (long j = j0; j < j1; ++j) {
          cplx acc = fg[j];
          if (ul) acc -= G[j] * ul[j];
          if (ur) acc -= G[j] * ur[j];
          fg[j] = acc * d[j];
        }
      }
    }
  }
};

}  // namespace caustic
