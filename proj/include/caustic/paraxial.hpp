#pragma once

// One-way envelope marcher on the coarse grid: Crank-Nicolson in x, central
// differences in y. The envelope E rides on the carrier
// exp(i(Kx x + Ky y)/eps) with K set by the reference density N_av, and
// obeys
//
//   2i Kx dE/dx = -i nu E - eps d2E/dy2 + (N - N_av)/eps E - 2i Ky dE/dy.
//
// With nu = 0 and N = N_av the discrete step is a Cayley transform of a
// Hermitian operator, so the transverse norm is conserved exactly; tests pin
// that. A quadratic multiplicative sponge over a few wavelengths at the
// transverse edges absorbs whatever drifts out.

#include <cmath>

#include "core.hpp"
#include "grid.hpp"
#include "tridiag.hpp"

namespace caustic {

struct ParaxialParams {
  double theta = 0;       // incidence angle, radians
  double N_av = 0;        // reference density of the expansion
  double nu_C = 1.0 / 15.0;
  bool neumann = false;   // transverse closure; reflective walls for tests
  bool sponge = true;
  double sponge_wavelengths = 3.0;
  double sponge_strength = 2.0;  // 1/micron at full depth
};

class ParaxialMarcher {
 public:
  int ny = 0;        // transverse cells
  double h = 0;      // coarse spacing
  double Kx = 0, Ky = 0;

  ParaxialMarcher(const GridSpec& g, const ParaxialParams& p) : p_(p) {
    ny = g.nyc();
    h = g.p0 * g.dx;
    eps_ = g.eps();
    lambda0_ = g.lambda0;
    if (!(p.N_av < 1.0)) throw error("paraxial: reference density at or above critical");
    double k = std::sqrt(1.0 - p.N_av);
    Kx = std::cos(p.theta) * k;
    Ky = std::sin(p.theta) * k;
    if (Kx <= 0) throw error("paraxial: marching direction degenerate");
    sponge_.assign(ny, 0.0);
    if (p.sponge) {
      double D = p.sponge_wavelengths * lambda0_;
      for (int m = 0; m < ny; ++m) {
        double y = (m + 0.5) * h;
        double d = std::min(y, ny * h - y);  // distance to the nearer wall
        if (d < D) sponge_[m] = p.sponge_strength * sq((D - d) / D);
      }
    }
  }

  // one Crank-Nicolson step of length dx; N_mid is the density column halfway
  void step(std::vector<cplx>& E, const std::vector<double>& N_mid, double dx) const {
    if ((int)E.size() != ny || (int)N_mid.size() != ny)
      throw error("paraxial: column length mismatch");
    double nbar = 0;
    for (double v : N_mid) nbar += v;
    nbar /= ny;
    double nu = p_.nu_C * nbar * nbar;

    // L E = -eps D2 E + (N - N_av)/eps E - i nu E - 2i Ky D1 E
    auto applyL = [&](const std::vector<cplx>& u, std::vector<cplx>& out) {
      double id2 = eps_ / (h * h);
      cplx iky = cplx(0, Ky / h);  // 2i Ky / (2h)
      for (int m = 0; m < ny; ++m) {
        cplx um = u[m];
        cplx up = m + 1 < ny ? u[m + 1] : (p_.neumann ? u[ny - 1] : cplx(0));
        cplx dn = m > 0 ? u[m - 1] : (p_.neumann ? u[0] : cplx(0));
        out[m] = -id2 * (up - 2.0 * um + dn) + ((N_mid[m] - p_.N_av) / eps_) * um -
                 cplx(0, nu) * um - iky * (up - dn);
      }
    };
    // (2iKx/dx - L/2) E' = (2iKx/dx + L/2) E
    cplx mu = cplx(0, 2.0 * Kx / dx);
    std::vector<cplx> rhs(ny);
    applyL(E, rhs);
    for (int m = 0; m < ny; ++m) rhs[m] = mu * E[m] + 0.5 * rhs[m];

    std::vector<cplx> lo(ny > 1 ? ny - 1 : 0), di(ny), up(ny > 1 ? ny - 1 : 0);
    double id2 = eps_ / (h * h);
    cplx iky = cplx(0, Ky / h);
    for (int m = 0; m < ny; ++m) {
      di[m] = mu - id2 - 0.5 * ((N_mid[m] - p_.N_av) / eps_) + 0.5 * cplx(0, nu);
      if (m + 1 < ny) up[m] = 0.5 * (id2 + iky);
      if (m > 0) lo[m - 1] = 0.5 * (id2 - iky);
    }
    if (p_.neumann) {
      di[0] += 0.5 * (id2 - iky);
      di[ny - 1] += 0.5 * (id2 + iky);
    }
    tridiag_solve(lo, di, up, rhs);
    E.swap(rhs);
    for (int m = 0; m < ny; ++m)
      if (sponge_[m] != 0.0) E[m] *= std::exp(-sponge_[m] * dx);
  }

  // march across a coarse density field, E0 at the first column; returns the
  // envelope at every column
  ComplexGrid march(const RealGrid& N, const std::vector<cplx>& E0) const {
    if (N.ny != ny) throw error("paraxial: density grid mismatch");
    ComplexGrid out(N.nx, ny);
    std::vector<cplx> E = E0;
    for (int m = 0; m < ny; ++m) out(0, m) = E[m];
    std::vector<double> mid(ny);
    for (int I = 1; I < N.nx; ++I) {
      for (int m = 0; m < ny; ++m) mid[m] = 0.5 * (N(I - 1, m) + N(I, m));
      step(E, mid, h);
      for (int m = 0; m < ny; ++m) out(I, m) = E[m];
    }
    return out;
  }

 private:
  ParaxialParams p_;
  double eps_ = 0, lambda0_ = 0;
  std::vector<double> sponge_;  // absorption rate per micron, zero outside the fringe
};

// linear interpolation of a coarse column to the fine solve rows, constant
// past the outermost coarse centers
inline std::vector<cplx> column_to_fine(const GridSpec& g, const std::vector<cplx>& col) {
  if ((int)col.size() != g.nyc()) throw error("column_to_fine: wrong column length");
  std::vector<cplx> out(g.ny_solve);
  double hy = g.p0 * g.dy;
  for (int m = 0; m < g.ny_solve; ++m) {
    double v = (g.y(m) - 0.5 * hy) / hy;
    int M0 = (int)std::floor(v);
    double fy = v - M0;
    if (M0 < 0) { M0 = 0; fy = 0; }
    if (M0 >= g.nyc() - 1) { M0 = g.nyc() - 1; fy = 0; }
    int M1 = std::min(M0 + 1, g.nyc() - 1);
    out[m] = (1.0 - fy) * col[M0] + fy * col[M1];
  }
  return out;
}

}  // namespace caustic
