#pragma once

// Complex banded LU without pivoting, used to invert the side-layer blocks.
// The blocks are ordered column-of-rows first (the thin direction), so the
// bandwidth equals the layer height, not the x extent. No pivoting keeps the
// factorization inside the band; a growth monitor guards against the rare
// case where that goes numerically wrong.

#include <cmath>

#include "core.hpp"

namespace caustic {

class BandedLU {
 public:
  int n = 0;   // dimension
  int b = 0;   // half bandwidth: a(i,j) may be nonzero for |i-j| <= b
  double growth = 0;

  BandedLU() = default;
  BandedLU(int n_, int b_) : n(n_), b(b_), a_((size_t)n_ * (2 * b_ + 1), cplx(0)) {
    if (n < 1 || b < 0 || b >= n) throw error("banded: bad shape");
  }

  cplx& at(int i, int j) {
    int d = j - i;
    if (d < -b || d > b) throw error("banded: entry outside band");
    return a_[(size_t)i * (2 * b + 1) + (d + b)];
  }
  cplx get(int i, int j) const {
    int d = j - i;
    if (d < -b || d > b) return cplx(0);
    return a_[(size_t)i * (2 * b + 1) + (d + b)];
  }

  void factor() {
    if (factored_) throw error("banded: already factored");
    double amax = 0;
    for (const auto& z : a_) amax = std::max(amax, std::abs(z));
    if (amax == 0) throw error("banded: empty matrix");
    double umax = 0;
    for (int j = 0; j < n; ++j) {
      cplx piv = entry(j, j);
      if (std::abs(piv) < 1e-300)
        throw error("banded: zero pivot at row " + std::to_string(j));
      umax = std::max(umax, std::abs(piv));
      int iend = std::min(n - 1, j + b);
      for (int i = j + 1; i <= iend; ++i) {
        cplx l = entry(i, j) / piv;
        entry(i, j) = l;
        if (l == cplx(0)) continue;
        int kend = std::min(n - 1, j + b);
        for (int kk = j + 1; kk <= kend; ++kk) {
          cplx u = entry(i, kk) - l * entry(j, kk);
          entry(i, kk) = u;
          umax = std::max(umax, std::abs(u));
        }
      }
    }
    growth = umax / amax;
    if (growth > 1e12)
      throw error("banded: pivot growth " + std::to_string(growth) +
                  " without pivoting, factorization untrustworthy");
    factored_ = true;
  }

  void solve(cplx* x) const {
    if (!factored_) throw error("banded: factor first");
    for (int i = 0; i < n; ++i) {
      cplx acc = x[i];
      int j0 = std::max(0, i - b);
      for (int j = j0; j < i; ++j) acc -= centry(i, j) * x[j];
      x[i] = acc;
    }
    for (int i = n - 1; i >= 0; --i) {
      cplx acc = x[i];
      int j1 = std::min(n - 1, i + b);
      for (int j = i + 1; j <= j1; ++j) acc -= centry(i, j) * x[j];
      x[i] = acc / centry(i, i);
    }
  }

 private:
  std::vector<cplx> a_;
  bool factored_ = false;

  cplx& entry(int i, int j) { return a_[(size_t)i * (2 * b + 1) + (j - i + b)]; }
  const cplx& centry(int i, int j) const { return a_[(size_t)i * (2 * b + 1) + (j - i + b)]; }
};

}  // namespace caustic
