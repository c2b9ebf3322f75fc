#pragma once

// Minimal barotropic fluid on the coarse grid: density and momentum with an
// isothermal pressure N*Te, advanced by a first-order local Lax-Friedrichs
// finite-volume step. Walls are closed and reflective, so mass is conserved
// exactly (wall mass flux cancels by construction). The light field enters
// only through the ponderomotive push -N gamma_p grad(I).
//
// Velocities are in units of c; time is measured as c*t in microns, matching
// the wave solver's step parameter.

#include <cmath>

#include "core.hpp"
#include "grid.hpp"

namespace caustic {

struct FluidState {
  RealGrid N, NUx, NUy;
  FluidState(int nxc, int nyc)
      : N(nxc, nyc, 0.0), NUx(nxc, nyc, 0.0), NUy(nxc, nyc, 0.0) {}
};

struct HydroParams {
  double Te = 1e-3;      // temperature in c^2 units; sound speed is sqrt(Te)
  double gamma_p = 0.0;  // ponderomotive coupling
  double cfl = 0.5;
};

struct HydroStats {
  int substeps = 0;
  double max_speed = 0;
  bool floored = false;  // density had to be clamped to stay positive
};

namespace detail {

struct FluxTriple {
  double n, mx, my;
};

// local Lax-Friedrichs flux through one face, n = (nx_, ny_) unit normal
inline FluxTriple llf_flux(double nL, double mxL, double myL, double nR, double mxR,
                           double myR, double cs, int axis) {
  // near-vacuum cells carry no flow
  double uL = nL > 1e-14 ? (axis == 0 ? mxL : myL) / nL : 0.0;
  double uR = nR > 1e-14 ? (axis == 0 ? mxR : myR) / nR : 0.0;
  double pL = nL * cs * cs, pR = nR * cs * cs;
  double a = std::max(std::abs(uL), std::abs(uR)) + cs;
  FluxTriple f;
  f.n = 0.5 * (nL * uL + nR * uR) - 0.5 * a * (nR - nL);
  double fxL = mxL * uL, fxR = mxR * uR;
  double fyL = myL * uL, fyR = myR * uR;
  if (axis == 0) {
    fxL += pL;
    fxR += pR;
  } else {
    fyL += pL;
    fyR += pR;
  }
  f.mx = 0.5 * (fxL + fxR) - 0.5 * a * (mxR - mxL);
  f.my = 0.5 * (fyL + fyR) - 0.5 * a * (myR - myL);
  return f;
}

}  // namespace detail

// Advance the fluid by c_dt (microns of light travel), subcycling at the
// acoustic CFL. I is the coarse intensity driving the ponderomotive force.
inline HydroStats hydro_advance(const GridSpec& g, FluidState& f, const RealGrid& I,
                                const HydroParams& p, double c_dt) {
  int nx = g.nxc(), ny = g.nyc();
  if (f.N.nx != nx || f.N.ny != ny || I.nx != nx || I.ny != ny)
    throw error("hydro: field shapes do not match the coarse grid");
  if (!(p.Te > 0)) throw error("hydro: temperature must be positive");
  double h = g.p0 * g.dx;
  double cs = std::sqrt(p.Te);
  HydroStats st;

  // cell index with reflective closure; sgn flips the normal momentum
  auto idx = [&](int i, int j) {
    if (i < 0) i = 0;
    if (i >= nx) i = nx - 1;
    if (j < 0) j = 0;
    if (j >= ny) j = ny - 1;
    return (size_t)j * nx + i;
  };
  auto gradI = [&](int i, int j, int axis) {
    double lo = I.v[idx(i - (axis == 0), j - (axis == 1))];
    double hi = I.v[idx(i + (axis == 0), j + (axis == 1))];
    return (hi - lo) / (2.0 * h);
  };

  RealGrid Nn(nx, ny), Mxn(nx, ny), Myn(nx, ny);
  double remaining = c_dt;
  while (remaining > 0) {
    double amax = cs;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        size_t q = (size_t)j * nx + i;
        double n = f.N.v[q];
        double sp = (n > 1e-14 ? std::max(std::abs(f.NUx.v[q]), std::abs(f.NUy.v[q])) / n
                               : 0.0) +
                    cs;
        amax = std::max(amax, sp);
      }
    st.max_speed = std::max(st.max_speed, amax);
    double dt = std::min(remaining, p.cfl * h / amax);
    remaining -= dt;
    ++st.substeps;

    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        size_t q = (size_t)j * nx + i;
        double dN = 0, dMx = 0, dMy = 0;
        // face loop: +x, -x, +y, -y; walls mirror the cell with the normal
        // momentum negated
        for (int face = 0; face < 4; ++face) {
          int axis = face < 2 ? 0 : 1;
          int dir = (face % 2 == 0) ? 1 : -1;
          int in = i + (axis == 0 ? dir : 0);
          int jn = j + (axis == 1 ? dir : 0);
          double nN, mxN, myN;
          if (in < 0 || in >= nx || jn < 0 || jn >= ny) {
            nN = f.N.v[q];
            mxN = axis == 0 ? -f.NUx.v[q] : f.NUx.v[q];
            myN = axis == 1 ? -f.NUy.v[q] : f.NUy.v[q];
          } else {
            size_t qn = (size_t)jn * nx + in;
            nN = f.N.v[qn];
            mxN = f.NUx.v[qn];
            myN = f.NUy.v[qn];
          }
          detail::FluxTriple fl =
              dir > 0 ? detail::llf_flux(f.N.v[q], f.NUx.v[q], f.NUy.v[q], nN, mxN, myN,
                                         cs, axis)
                      : detail::llf_flux(nN, mxN, myN, f.N.v[q], f.NUx.v[q], f.NUy.v[q],
                                         cs, axis);
          double sgn = dir > 0 ? 1.0 : -1.0;
          dN -= sgn * fl.n / h * dt;
          dMx -= sgn * fl.mx / h * dt;
          dMy -= sgn * fl.my / h * dt;
        }
        double n_new = f.N.v[q] + dN;
        if (n_new < 1e-14) {
          n_new = 1e-14;
          st.floored = true;
        }
        Nn.v[q] = n_new;
        Mxn.v[q] = f.NUx.v[q] + dMx - f.N.v[q] * p.gamma_p * gradI(i, j, 0) * dt;
        Myn.v[q] = f.NUy.v[q] + dMy - f.N.v[q] * p.gamma_p * gradI(i, j, 1) * dt;
      }
    f.N.v.swap(Nn.v);
    f.NUx.v.swap(Mxn.v);
    f.NUy.v.swap(Myn.v);
  }
  return st;
}

inline double total_mass(const FluidState& f) {
  double s = 0;
  for (double v : f.N.v) s += v;
  return s;
}

}  // namespace caustic
