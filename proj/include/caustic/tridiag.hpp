#pragma once

// Small helpers for complex tridiagonal systems: matvec, Thomas solve, and an
// LU with row swaps for the shifted solves inside inverse iteration (where
// the matrix is near-singular by construction and the plain Thomas recursion
// would divide by tiny pivots).

#include "core.hpp"

namespace caustic {

// Symmetric tridiagonal: diag[0..n), off[0..n-1) with off[i] linking i,i+1.
struct SymTridiag {
  std::vector<cplx> diag;
  std::vector<cplx> off;
  int n() const { return (int)diag.size(); }
};

inline void tridiag_matvec(const SymTridiag& t, const cplx* x, cplx* y) {
  int n = t.n();
  for (int i = 0; i < n; ++i) {
    cplx acc = t.diag[i] * x[i];
    if (i > 0) acc += t.off[i - 1] * x[i - 1];
    if (i + 1 < n) acc += t.off[i] * x[i + 1];
    y[i] = acc;
  }
}

// Thomas elimination, no pivoting. Fine for the diagonally dominant systems
// in the marching solver; do not use near an eigenvalue.
inline void tridiag_solve(const std::vector<cplx>& lower, const std::vector<cplx>& diag,
                          const std::vector<cplx>& upper, std::vector<cplx>& rhs) {
  int n = (int)diag.size();
  std::vector<cplx> c(n), d(n);
  cplx den = diag[0];
  if (std::abs(den) < 1e-300) throw error("tridiag: zero pivot at row 0");
  c[0] = (n > 1 ? upper[0] : cplx(0)) / den;
  d[0] = rhs[0] / den;
  for (int i = 1; i < n; ++i) {
    den = diag[i] - lower[i - 1] * c[i - 1];
    if (std::abs(den) < 1e-300) throw error("tridiag: zero pivot at row " + std::to_string(i));
    if (i + 1 < n) c[i] = upper[i] / den;
    d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / den;
  }
  rhs[n - 1] = d[n - 1];
  for (int i = n - 2; i >= 0; --i) rhs[i] = d[i] - c[i] * rhs[i + 1];
}

// LU of (t - shift I) with partial pivoting. Row swaps widen the upper band
// to two superdiagonals. Solve is safe for nearly singular shifts: tiny
// pivots are bumped to a floor instead of failing, which is exactly what
// inverse iteration wants.
struct ShiftedTridiagLU {
  int n = 0;
  std::vector<cplx> l;          // multipliers, l[i] eliminates row i+1
  std::vector<cplx> u0, u1, u2; // main, first, second superdiagonals
  std::vector<unsigned char> swapped;

  ShiftedTridiagLU(const SymTridiag& t, cplx shift) {
    n = t.n();
    l.assign(n > 0 ? n - 1 : 0, cplx(0));
    u0.resize(n);
    u1.assign(n > 0 ? n - 1 : 0, cplx(0));
    u2.assign(n > 1 ? n - 2 : 0, cplx(0));
    swapped.assign(n > 0 ? n - 1 : 0, 0);
    if (n == 0) return;
    // rolling window of the active row pair
    cplx a = t.diag[0] - shift;
    cplx b = n > 1 ? t.off[0] : cplx(0);
    for (int i = 0; i < n - 1; ++i) {
      cplx sub = t.off[i];
      cplx dnext = t.diag[i + 1] - shift;
      cplx bnext = (i + 2 < n) ? t.off[i + 1] : cplx(0);
      if (std::abs(sub) > std::abs(a)) {
        swapped[i] = 1;
        u0[i] = sub;
        u1[i] = dnext;
        if (i + 2 < n) u2[i] = bnext;
        cplx m = a / sub;
        l[i] = m;
        a = b - m * dnext;
        b = (i + 2 < n) ? -m * bnext : cplx(0);
      } else {
        cplx piv = a;
        if (std::abs(piv) < 1e-300) piv = cplx(1e-300, 0);
        u0[i] = piv;
        u1[i] = b;
        if (i + 2 < n) u2[i] = 0;
        cplx m = sub / piv;
        l[i] = m;
        a = dnext - m * b;
        b = bnext;
      }
    }
    if (std::abs(a) < 1e-300) a = cplx(1e-300, 0);
    u0[n - 1] = a;
  }

  void solve(std::vector<cplx>& x) const {
    for (int i = 0; i < n - 1; ++i) {
      if (swapped[i]) std::swap(x[i], x[i + 1]);
      x[i + 1] -= l[i] * x[i];
    }
    for (int i = n - 1; i >= 0; --i) {
      cplx acc = x[i];
      if (i + 1 < n) acc -= u1[i] * x[i + 1];
      if (i + 2 < n) acc -= u2[i] * x[i + 2];
      x[i] = acc / u0[i];
    }
  }
};

}  // namespace caustic
