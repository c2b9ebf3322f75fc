#pragma once

// Two-level mesh geometry, absorbing-layer profile, incoming beam envelope,
// and the fine<->coarse couplings between the wave solver and the fluid.

#include <cmath>
#include <numbers>

#include "core.hpp"

namespace caustic {

// Fine/coarse cell-centered mesh. The wave solve runs on nx * ny_solve fine
// cells; the fluid box covers the first ny_phys fine rows at p0 x p0
// granularity. ny_solve >= ny_phys: the central strip between the two
// absorbing layers must hold (2^klev - 1) rows, and the shortfall is made up
// by extending the domain past the top of the fluid box (rows there behave
// like ordinary wave cells and feed nothing back).
struct GridSpec {
  double lambda0 = 0.35;  // vacuum wavelength, microns
  int ppw = 10;           // fine points per wavelength
  int p0 = 5;             // coarse cell size in fine cells
  int nx = 0;
  int ny_phys = 0;
  int ny_solve = 0;
  int npml = 0;  // absorbing rows at each y-end of the solve domain
  int novl = 2;  // subdomain overlap rows
  int nc = 0;    // central rows, always 2^klev - 1
  int klev = 0;
  double dx = 0, dy = 0;
  double x_offset = 0;  // global x of the left boundary (nonzero for zoned runs)

  double eps() const { return lambda0 / (2.0 * std::numbers::pi); }
  double x(int i) const { return x_offset + (i + 0.5) * dx; }
  double y(int m) const { return (m + 0.5) * dy; }
  int nxc() const { return nx / p0; }
  int nyc() const { return ny_phys / p0; }

  int cen_lo() const { return npml; }            // first central row
  int cen_hi() const { return npml + nc; }       // one past last central row
  int bot_rows() const { return npml + novl; }   // bottom subdomain height
  int top_rows() const { return npml + novl; }   // top subdomain height
  int top_lo() const { return cen_hi() - novl; } // first top-subdomain row

  bool is_pml_row(int m) const { return m < npml || m >= ny_solve - npml; }

  static GridSpec make(double lambda0, double wavelengths_x, double wavelengths_y,
                       int ppw, int p0, double pml_wavelengths, int novl = 2) {
    GridSpec g;
    g.lambda0 = lambda0;
    g.ppw = ppw;
    g.p0 = p0;
    g.novl = novl;
    if (!(lambda0 > 0)) throw error("grid: lambda0 must be positive");
    if (ppw < 10) throw error("grid: need at least 10 points per wavelength");
    if (p0 < 2) throw error("grid: coarse ratio p0 must be >= 2");
    if (novl < 1) throw error("grid: overlap must be >= 1 row");
    if (pml_wavelengths < 2.0 || pml_wavelengths > 4.0)
      throw error("grid: absorbing layer must span 2..4 wavelengths");
    g.dx = g.dy = lambda0 / ppw;
    auto cells = [&](double w, const char* axis) {
      double c = w * ppw;
      int n = (int)std::lround(c);
      if (std::abs(c - n) > 1e-9) throw error(std::string("grid: ") + axis + " extent not a whole number of cells");
      return n;
    };
    g.nx = cells(wavelengths_x, "x");
    g.ny_phys = cells(wavelengths_y, "y");
    if (g.nx % p0 != 0) throw error("grid: nx not divisible by p0");
    if (g.ny_phys % p0 != 0) throw error("grid: ny not divisible by p0");
    double pml_c = pml_wavelengths * ppw;
    g.npml = (int)std::lround(pml_c);
    if (std::abs(pml_c - g.npml) > 1e-9) throw error("grid: absorbing layer not a whole number of cells");

    int nc_raw = g.ny_phys - 2 * g.npml;
    if (nc_raw < novl + 1) throw error("grid: domain too small for the absorbing layers");
    // round the central strip up to 2^k - 1 rows
    int k = 1;
    while ((1 << k) - 1 < nc_raw) ++k;
    g.klev = k;
    g.nc = (1 << k) - 1;
    g.ny_solve = g.ny_phys + (g.nc - nc_raw);
    return g;
  }
};

// Complex stretch of the y-derivative inside the absorbing layers:
// d/dy -> eta(y) d/dy with eta = 1 / (1 + i sigma eps). sigma ramps as
// sigma_max (d/D)^order with d the depth into the layer, so |eta| < 1
// strictly inside and eta = 1 elsewhere. Face values are sampled analytically
// at the cell faces.
struct PmlProfile {
  std::vector<double> sigma;     // per solve row, at cell centers
  std::vector<cplx> eta;         // per solve row
  std::vector<cplx> eta_face;    // ny_solve + 1 faces; face m sits below row m
  double sigma_max = 0;
  int order = 2;
};

inline PmlProfile build_pml(const GridSpec& g, double sigma_max, int order) {
  if (!(sigma_max > 0)) throw error("pml: strength must be positive");
  if (order < 1 || order > 4) throw error("pml: ramp order out of range");
  PmlProfile p;
  p.sigma_max = sigma_max;
  p.order = order;
  double D = g.npml * g.dy;
  double y_top = g.ny_solve * g.dy;  // outer face of the top layer
  auto sig = [&](double y) {
    double d = 0;
    if (y < D)
      d = D - y;
    else if (y > y_top - D)
      d = y - (y_top - D);
    else
      return 0.0;
    return sigma_max * std::pow(d / D, (double)order);
  };
  double e = g.eps();
  p.sigma.resize(g.ny_solve);
  p.eta.resize(g.ny_solve);
  p.eta_face.resize(g.ny_solve + 1);
  for (int m = 0; m < g.ny_solve; ++m) {
    p.sigma[m] = sig(g.y(m));
    p.eta[m] = 1.0 / cplx(1.0, p.sigma[m] * e);
  }
  for (int m = 0; m <= g.ny_solve; ++m)
    p.eta_face[m] = 1.0 / cplx(1.0, sig(m * g.dy) * e);
  return p;
}

// sigma_max giving a target round-trip amplitude reflection for a unit
// transverse wavenumber: R = exp(-2 sigma_max D / (order+1)).
inline double pml_strength_for_reflection(const GridSpec& g, double R, int order) {
  if (!(R > 0 && R < 1)) throw error("pml: reflection target must be in (0,1)");
  double D = g.npml * g.dy;
  return -(order + 1) * std::log(R) / (2.0 * D);
}

// One incoming beamlet: Gaussian envelope in y with a fixed phase.
struct Speckle {
  double center = 0;  // microns
  double width = 1;   // 1/e half-width, microns
  double amp = 1;
  double phase = 0;
};

struct SpeckleSpec {
  double angle = 0;  // incidence angle, radians
  std::vector<Speckle> speckles;
  double truncate = 1e-12;  // envelope values below this are cleared
};

inline cplx speckle_envelope(const SpeckleSpec& s, double y) {
  cplx acc(0, 0);
  for (const auto& sp : s.speckles)
    acc += sp.amp * std::exp(-sq((y - sp.center) / sp.width)) * std::exp(cplx(0, sp.phase));
  if (std::abs(acc) < s.truncate) acc = cplx(0, 0);
  return acc;
}

inline void validate_speckles(const GridSpec& g, const SpeckleSpec& s) {
  double ylo = g.npml * g.dy, yhi = (g.ny_solve - g.npml) * g.dy;
  for (const auto& sp : s.speckles) {
    if (!(sp.width > 0)) throw error("speckle: width must be positive");
    if (sp.center < ylo || sp.center > yhi)
      throw error("speckle: center sits inside an absorbing layer");
  }
}

// Incoming envelope alpha_in on the solve rows. The oscillatory incidence
// phase exp(i Ky y / eps) is applied at assembly time, not here.
inline std::vector<cplx> build_incoming_profile(const GridSpec& g, const SpeckleSpec& s) {
  validate_speckles(g, s);
  std::vector<cplx> a(g.ny_solve, cplx(0, 0));
  for (int m = 0; m < g.ny_solve; ++m) a[m] = speckle_envelope(s, g.y(m));
  return a;
}

// p0 x p0 cell means of |psi|^2 on the fluid box. Cells that touch an
// absorbing row carry zero so the fluid never feels the damped fringe.
inline RealGrid coarse_intensity(const GridSpec& g, const ComplexGrid& psi) {
  if (psi.nx != g.nx || psi.ny != g.ny_solve) throw error("coarse_intensity: field has wrong shape");
  RealGrid out(g.nxc(), g.nyc(), 0.0);
  double inv = 1.0 / ((double)g.p0 * g.p0);
  for (int M = 0; M < g.nyc(); ++M) {
    bool fringe = false;
    for (int m = M * g.p0; m < (M + 1) * g.p0; ++m)
      if (g.is_pml_row(m)) fringe = true;
    if (fringe) continue;
    for (int I = 0; I < g.nxc(); ++I) {
      double acc = 0;
      for (int m = M * g.p0; m < (M + 1) * g.p0; ++m)
        for (int i = I * g.p0; i < (I + 1) * g.p0; ++i) acc += std::norm(psi(i, m));
      out(I, M) = acc * inv;
    }
  }
  return out;
}

// Bilinear interpolation of a coarse field to the fine solve grid, constant
// past the outermost coarse centers (half-cell margins and the rows beyond
// the fluid box).
inline RealGrid interp_to_fine(const GridSpec& g, const RealGrid& coarse) {
  if (coarse.nx != g.nxc() || coarse.ny != g.nyc()) throw error("interp_to_fine: coarse field has wrong shape");
  RealGrid out(g.nx, g.ny_solve, 0.0);
  double hx = g.p0 * g.dx, hy = g.p0 * g.dy;
  for (int m = 0; m < g.ny_solve; ++m) {
    double v = (g.y(m) - 0.5 * hy) / hy;
    int M0 = (int)std::floor(v);
    double fy = v - M0;
    if (M0 < 0) { M0 = 0; fy = 0; }
    if (M0 >= coarse.ny - 1) { M0 = coarse.ny - 1; fy = 0; }
    int M1 = std::min(M0 + 1, coarse.ny - 1);
    for (int i = 0; i < g.nx; ++i) {
      double u = ((i + 0.5) * g.dx - 0.5 * hx) / hx;
      int I0 = (int)std::floor(u);
      double fx = u - I0;
      if (I0 < 0) { I0 = 0; fx = 0; }
      if (I0 >= coarse.nx - 1) { I0 = coarse.nx - 1; fx = 0; }
      int I1 = std::min(I0 + 1, coarse.nx - 1);
      out(i, m) = (1 - fx) * (1 - fy) * coarse(I0, M0) + fx * (1 - fy) * coarse(I1, M0) +
                  (1 - fx) * fy * coarse(I0, M1) + fx * fy * coarse(I1, M1);
    }
  }
  return out;
}

}  // namespace caustic
