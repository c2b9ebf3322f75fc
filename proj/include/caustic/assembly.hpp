#pragma once

// Per-step wave operator, split over three y-subdomains with radiating
// closures at the splits. Side subdomains hold the absorbing layers plus
// novl overlap rows; the central strip stays separable (x-line operator plus
// constant y-coupling) so the preconditioner can invert it in the eigenbasis
// of the x-line operator. With the duplicated overlap rows agreeing, every
// row of the split system reproduces the unsplit stencil exactly.

#include <cmath>

#include "core.hpp"
#include "grid.hpp"
#include "tridiag.hpp"

namespace caustic {

struct PhysicsParams {
  double c_dt = 1.0;         // c times the wave time step, microns
  double theta = 0.0;        // incidence angle, radians
  double nu_C = 1.0 / 15.0;  // collisional damping per density^2, 1/micron
  bool couple = true;        // subdomain exchange; disabled only in solver tests
};

// x-line operator eps^2 d_xx + (1 - N0(x)) with boundary closures folded in.
// Entry face x=0: one-sided radiating condition transparent to left-going
// waves (the incoming drive is injected through the right-hand side). Exit
// face: transparent if the wave still propagates at the exit density,
// reflecting wall once the density is at or above critical.
struct XOperator {
  SymTridiag A0;
  double Kx = 0, Ky = 0;     // incidence wavevector, eps-scaled units
  double N_in = 0, N_out = 0;
  bool neumann_out = false;
  double kappa_out = 0;
};

inline XOperator build_x_operator(const GridSpec& g, const std::vector<double>& N0,
                                  double theta) {
  if ((int)N0.size() != g.nx) throw error("x operator: N0 has wrong length");
  XOperator op;
  op.N_in = N0.front();
  op.N_out = N0.back();
  if (op.N_in >= 1.0) throw error("x operator: entry density at or above critical");
  double e = g.eps();
  double s = e * e / (g.dx * g.dx);
  double k_in = std::sqrt(1.0 - op.N_in);
  op.Kx = std::cos(theta) * k_in;
  op.Ky = std::sin(theta) * k_in;
  op.A0.diag.resize(g.nx);
  op.A0.off.assign(g.nx - 1, cplx(s, 0));
  for (int i = 0; i < g.nx; ++i) op.A0.diag[i] = cplx(-2.0 * s + 1.0 - N0[i], 0);
  op.A0.diag[0] = cplx(-s + 1.0 - N0.front(), op.Kx * e / g.dx);
  if (op.N_out >= 1.0) {
    op.neumann_out = true;
    op.A0.diag[g.nx - 1] = cplx(-s + 1.0 - N0.back(), 0);
  } else {
    op.kappa_out = std::sqrt(1.0 - op.N_out);
    op.A0.diag[g.nx - 1] = cplx(-s + 1.0 - N0.back(), op.kappa_out * e / g.dx);
  }
  return op;
}

// y-mean of the fine density over the rows the fluid owns minus the
// absorbing fringes; this is the profile the separable part is built from.
inline std::vector<double> mean_density_profile(const GridSpec& g, const RealGrid& N_fine) {
  if (N_fine.nx != g.nx || N_fine.ny < g.ny_phys)
    throw error("density profile: fine density has wrong shape");
  int lo = g.npml, hi = g.ny_phys - g.npml;
  if (hi <= lo) throw error("density profile: no rows outside the fringes");
  std::vector<double> n0(g.nx, 0.0);
  for (int m = lo; m < hi; ++m)
    for (int i = 0; i < g.nx; ++i) n0[i] += N_fine(i, m);
  double inv = 1.0 / (hi - lo);
  for (auto& v : n0) v *= inv;
  return n0;
}

class DdmSystem {
 public:
  GridSpec g;
  XOperator xop;
  PmlProfile pml;
  double mu0 = 0;   // 2 eps / (c dt)
  double Ts = 0;    // eps^2 / dy^2
  cplx beta;        // radiating split closure folded into edge diagonals
  std::vector<double> nu;  // collisional damping, per x column
  RealGrid dN;             // density minus separable profile, full solve grid
  bool couple = true;
  int nb = 0, nt = 0, nrows = 0;

  DdmSystem(const GridSpec& g_, const PmlProfile& pml_, const PhysicsParams& ph,
            const std::vector<double>& N0, const RealGrid& N_fine)
      : g(g_), pml(pml_), dN(g_.nx, g_.ny_solve, 0.0) {
    if ((int)N0.size() != g.nx) throw error("ddm: N0 has wrong length");
    if (N_fine.nx != g.nx || N_fine.ny != g.ny_solve)
      throw error("ddm: fine density has wrong shape");
    if (g.nc < g.novl + 1) throw error("ddm: central strip shorter than the overlap");
    if ((int)pml.eta.size() != g.ny_solve || (int)pml.eta_face.size() != g.ny_solve + 1)
      throw error("ddm: absorbing profile has wrong length");
    xop = build_x_operator(g, N0, ph.theta);
    double e = g.eps();
    if (!(ph.c_dt > 0)) throw error("ddm: time step must be positive");
    mu0 = 2.0 * e / ph.c_dt;
    Ts = e * e / (g.dy * g.dy);
    // one-sided closure transparent to a wave leaving the strip at the
    // mid-range transverse wavenumber 1/2
    beta = cplx(Ts, 0.5 * e / g.dy);
    couple = ph.couple;
    nu.resize(g.nx);
    for (int i = 0; i < g.nx; ++i) nu[i] = ph.nu_C * N0[i] * N0[i];
    for (int m = 0; m < g.ny_solve; ++m)
      for (int i = 0; i < g.nx; ++i) dN(i, m) = N_fine(i, m) - N0[i];
    nb = nt = g.npml + g.novl;
    nrows = nb + g.nc + nt;
  }

  long dim() const { return (long)nrows * g.nx; }
  double eps() const { return g.eps(); }
  cplx mu1(int i) const { return cplx(0, mu0 + eps() * nu[i]); }

  // block-local row r -> solve row m
  int solve_row(int r) const {
    if (r < nb) return r;
    if (r < nb + g.nc) return g.npml + (r - nb);
    return g.top_lo() + (r - nb - g.nc);
  }

  // ddm row index of a solve row's copy in each block (-1 when absent)
  int bot_row(int m) const { return m < nb ? m : -1; }
  int cen_row(int m) const {
    return (m >= g.npml && m < g.cen_hi()) ? nb + (m - g.npml) : -1;
  }
  int top_row(int m) const {
    return m >= g.top_lo() ? nb + g.nc + (m - g.top_lo()) : -1;
  }

  void apply(const cplx* x, cplx* y, int nthreads = 1) const {
    parallel_ranges(nthreads, nrows, [&](long r0, long r1) {
      for (long r = r0; r < r1; ++r) apply_row(x, y, (int)r);
    });
  }

  // same physics on the unsplit solve grid; reference for residual checks
  ComplexGrid apply_monolithic(const ComplexGrid& u, int nthreads = 1) const {
    if (u.nx != g.nx || u.ny != g.ny_solve) throw error("ddm: field has wrong shape");
    ComplexGrid out(g.nx, g.ny_solve);
    parallel_ranges(nthreads, g.ny_solve, [&](long m0, long m1) {
      for (long m = m0; m < m1; ++m) {
        const cplx* up = m + 1 < g.ny_solve ? u.v.data() + (m + 1) * g.nx : nullptr;
        const cplx* dn = m > 0 ? u.v.data() + (m - 1) * g.nx : nullptr;
        monolithic_row(u.v.data() + m * g.nx, up, dn, (int)m,
                       out.v.data() + m * g.nx);
      }
    });
    return out;
  }

  // right-hand side: i mu0 times the previous field on the central-zone rows
  // plus the incoming drive through the entry face; absorbing rows get zero
  std::vector<cplx> assemble_rhs(const ComplexGrid& psi_ini,
                                 const std::vector<cplx>& alpha_in) const {
    if (psi_ini.nx != g.nx || psi_ini.ny != g.ny_solve)
      throw error("ddm: previous field has wrong shape");
    if ((int)alpha_in.size() != g.ny_solve)
      throw error("ddm: incoming profile has wrong length");
    std::vector<cplx> b(dim(), cplx(0));
    double e = g.eps();
    cplx drive = cplx(0, 2.0 * xop.Kx * e / g.dx);
    for (int r = 0; r < nrows; ++r) {
      int m = solve_row(r);
      if (g.is_pml_row(m)) continue;
      cplx* br = b.data() + (size_t)r * g.nx;
      const cplx* pi = psi_ini.v.data() + (size_t)m * g.nx;
      cplx imu0(0, mu0);
      for (int i = 0; i < g.nx; ++i) br[i] = imu0 * pi[i];
      br[0] += drive * alpha_in[m] * std::exp(cplx(0, xop.Ky * g.y(m) / e));
    }
    return b;
  }

  // composite field: absorbing rows from the side blocks, the rest from the
  // central block
  ComplexGrid glue(const std::vector<cplx>& x) const {
    if ((long)x.size() != dim()) throw error("ddm: vector has wrong length");
    ComplexGrid u(g.nx, g.ny_solve);
    for (int m = 0; m < g.ny_solve; ++m) {
      int r = m < g.npml ? bot_row(m) : (m < g.cen_hi() ? cen_row(m) : top_row(m));
      const cplx* xr = x.data() + (size_t)r * g.nx;
      cplx* um = u.v.data() + (size_t)m * g.nx;
      for (int i = 0; i < g.nx; ++i) um[i] = xr[i];
    }
    return u;
  }

  std::vector<cplx> scatter(const ComplexGrid& u) const {
    if (u.nx != g.nx || u.ny != g.ny_solve) throw error("ddm: field has wrong shape");
    std::vector<cplx> x(dim());
    for (int r = 0; r < nrows; ++r) {
      int m = solve_row(r);
      const cplx* um = u.v.data() + (size_t)m * g.nx;
      cplx* xr = x.data() + (size_t)r * g.nx;
      for (int i = 0; i < g.nx; ++i) xr[i] = um[i];
    }
    return x;
  }

 private:
  // y = A0 x plus the shared diagonal add-on for a central-zone row
  void central_base(const cplx* xr, int m, cplx* yr) const {
    tridiag_matvec(xop.A0, xr, yr);
    double e = eps();
    for (int i = 0; i < g.nx; ++i)
      yr[i] += (cplx(-dN(i, m) - 2.0 * Ts, mu0 + e * nu[i])) * xr[i];
  }

  void pml_base(const cplx* xr, const cplx* up, const cplx* dn, int m, cplx* yr) const {
    tridiag_matvec(xop.A0, xr, yr);
    double e = eps();
    cplx cu = Ts * pml.eta[m] * pml.eta_face[m + 1];
    cplx cd = Ts * pml.eta[m] * pml.eta_face[m];
    for (int i = 0; i < g.nx; ++i) {
      cplx acc = (cplx(0, mu0 + e * nu[i]) - cu - cd) * xr[i];
      if (up) acc += cu * up[i];
      if (dn) acc += cd * dn[i];
      yr[i] += acc;
    }
  }

  void monolithic_row(const cplx* xr, const cplx* up, const cplx* dn, int m,
                      cplx* yr) const {
    if (g.is_pml_row(m)) {
      pml_base(xr, up, dn, m, yr);
    } else {
      central_base(xr, m, yr);
      for (int i = 0; i < g.nx; ++i) {
        if (up) yr[i] += Ts * up[i];
        if (dn) yr[i] += Ts * dn[i];
      }
    }
  }

  void apply_row(const cplx* x, cplx* y, int r) const {
    int nx = g.nx;
    int m = solve_row(r);
    const cplx* xr = x + (size_t)r * nx;
    cplx* yr = y + (size_t)r * nx;
    auto row = [&](int rr) { return x + (size_t)rr * nx; };

    bool in_bot = r < nb, in_cen = !in_bot && r < nb + g.nc;
    if (g.is_pml_row(m)) {
      // strictly inside a side block; both neighbors are local
      const cplx* dn = m > 0 ? row(r - 1) : nullptr;
      const cplx* up = m + 1 < g.ny_solve ? row(r + 1) : nullptr;
      pml_base(xr, up, dn, m, yr);
      return;
    }

    central_base(xr, m, yr);
    // lower neighbor
    if (in_bot || (in_cen && m > g.npml) || (!in_bot && !in_cen && m > g.top_lo())) {
      const cplx* dn = row(r - 1);
      for (int i = 0; i < nx; ++i) yr[i] += Ts * dn[i];
    } else {
      // truncated below: radiating closure plus exchange with the block
      // that owns the rows underneath
      for (int i = 0; i < nx; ++i) yr[i] += beta * xr[i];
      if (couple) {
        int rd = in_cen ? bot_row(m - 1) : cen_row(m - 1);
        int rs = in_cen ? bot_row(m) : cen_row(m);
        const cplx* vd = row(rd);
        const cplx* vs = row(rs);
        for (int i = 0; i < nx; ++i) yr[i] += Ts * vd[i] - beta * vs[i];
      }
    }
    // upper neighbor
    bool has_up = (in_cen && m + 1 < g.cen_hi()) || (!in_bot && !in_cen) ||
                  (in_bot && r + 1 < nb);
    if (has_up) {
      const cplx* up = row(r + 1);
      for (int i = 0; i < nx; ++i) yr[i] += Ts * up[i];
    } else {
      for (int i = 0; i < nx; ++i) yr[i] += beta * xr[i];
      if (couple) {
        int ru = in_cen ? top_row(m + 1) : cen_row(m + 1);
        int rs = in_cen ? top_row(m) : cen_row(m);
        const cplx* vu = row(ru);
        const cplx* vs = row(rs);
        for (int i = 0; i < nx; ++i) yr[i] += Ts * vu[i] - beta * vs[i];
      }
    }
  }
};

}  // namespace caustic
