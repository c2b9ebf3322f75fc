#pragma once

// Simulation driver: parses the flat configuration into component settings,
// orchestrates the per-step cycle (density -> wave solve -> intensity ->
// fluid), and owns the on-disk outputs. Three solver modes:
//
//   helmholtz   full-domain frequency-domain solve each step
//   paraxial    one-way envelope march on the coarse grid
//   hybrid      paraxial march feeds the entry face of a trailing
//               full-wave zone through the incoming-profile boundary term

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "assembly.hpp"
#include "config.hpp"
#include "core.hpp"
#include "gmres.hpp"
#include "grid.hpp"
#include "hydro.hpp"
#include "io.hpp"
#include "paraxial.hpp"
#include "precond.hpp"
#include "spectral.hpp"

namespace caustic {

struct PmlSettings {
  int order = 2;
  double reflection = 1e-4;
  double sigma_max = 0;  // 0 means derive from the reflection target
};

struct DensityInit {
  std::string profile = "constant";  // constant | linear
  double value = 0;                  // constant level
  double n0 = 0, n1 = 0;             // linear ramp endpoints along x
};

struct Setup {
  // raw grid numbers, kept so benchmarks can rebuild scaled grids
  double lambda0 = 1, wl_x = 0, wl_y = 0, pml_wl = 2;
  int ppw = 10, p0 = 4, novl = 2;

  GridSpec grid;  // full domain
  PmlSettings pmlset;
  PhysicsParams phys;
  GmresOptions gm;
  HydroParams hyd;
  bool hydro_on = false;
  SpeckleSpec beam;
  EigenEngine engine = EigenEngine::auto_fallback;
  bool precond_check = true;
  bool cache_basis = false;

  std::string solver = "helmholtz";  // helmholtz | paraxial | hybrid
  double fraction = 0.4;             // paraxial share of x in hybrid mode
  ParaxialParams par;
  bool par_nav_auto = true;

  DensityInit dens;
  int steps = 1, out_every = 1, chk_every = 0, threads = 1;
  std::string outdir = "out";
  std::string resume;
};

inline Setup parse_setup(const Config& c) {
  Setup s;
  s.lambda0 = c.req_double("grid.lambda0");
  s.wl_x = c.req_double("grid.wavelengths_x");
  s.wl_y = c.req_double("grid.wavelengths_y");
  s.ppw = c.get_int("grid.ppw", 10);
  s.p0 = c.get_int("grid.p0", 4);
  s.pml_wl = c.get_double("grid.pml_wavelengths", 2.0);
  s.novl = c.get_int("grid.overlap", 2);
  s.grid = GridSpec::make(s.lambda0, s.wl_x, s.wl_y, s.ppw, s.p0, s.pml_wl, s.novl);

  s.solver = c.get_string("solver.type", "helmholtz");
  if (s.solver != "helmholtz" && s.solver != "paraxial" && s.solver != "hybrid")
    throw error("config: solver.type must be helmholtz, paraxial or hybrid");
  s.phys.c_dt = c.req_double("solver.c_dt");
  s.steps = c.req_int("solver.steps");
  if (s.steps < 1) throw error("config: solver.steps must be >= 1");
  double theta_deg = c.get_double("solver.theta_deg", 0.0);
  if (std::abs(theta_deg) >= 85.0) throw error("config: incidence angle too steep");
  s.phys.theta = theta_deg * std::numbers::pi / 180.0;
  s.phys.nu_C = c.get_double("solver.nu_C", s.phys.nu_C);
  s.phys.couple = c.get_bool("solver.couple", true);

  s.gm.tol = c.get_double("gmres.tol", 1e-6);
  s.gm.max_iter = c.get_int("gmres.max_iter", 100);
  s.gm.breakdown = c.get_double("gmres.breakdown", 1e-14);
  s.gm.final_residual = c.get_bool("gmres.check_final", true);

  std::string eng = c.get_string("precond.engine", "auto");
  if (eng == "auto")
    s.engine = EigenEngine::auto_fallback;
  else if (eng == "structured")
    s.engine = EigenEngine::structured;
  else if (eng == "dense")
    s.engine = EigenEngine::dense;
  else
    throw error("config: precond.engine must be auto, structured or dense");
  s.precond_check = c.get_bool("precond.check_strip", true);
  s.cache_basis = c.get_bool("precond.cache_basis", false);

  s.pmlset.order = c.get_int("pml.order", 2);
  s.pmlset.reflection = c.get_double("pml.reflection", 1e-4);
  s.pmlset.sigma_max = c.get_double("pml.sigma_max", 0.0);

  s.dens.profile = c.get_string("density.profile", "constant");
  if (s.dens.profile == "constant") {
    s.dens.value = c.get_double("density.value", 0.0);
  } else if (s.dens.profile == "linear") {
    s.dens.n0 = c.req_double("density.n0");
    s.dens.n1 = c.req_double("density.n1");
  } else {
    throw error("config: density.profile must be constant or linear");
  }

  s.hydro_on = c.get_bool("hydro.enabled", false);
  s.hyd.Te = c.get_double("hydro.Te", 1e-3);
  s.hyd.gamma_p = c.get_double("hydro.gamma_p", 0.0);
  s.hyd.cfl = c.get_double("hydro.cfl", 0.5);

  int nspeck = c.req_int("beam.speckles");
  if (nspeck < 1) throw error("config: need at least one speckle");
  s.beam.angle = s.phys.theta;
  for (int k = 0; k < nspeck; ++k) {
    std::string t = std::to_string(k);
    Speckle sp;
    sp.center = c.req_double("beam.center" + t);
    sp.width = c.req_double("beam.width" + t);
    sp.amp = c.get_double("beam.amp" + t, 1.0);
    sp.phase = c.get_double("beam.phase" + t, 0.0);
    s.beam.speckles.push_back(sp);
  }
  validate_speckles(s.grid, s.beam);

  s.fraction = c.get_double("paraxial.fraction", 0.4);
  std::string bc = c.get_string("paraxial.bc", "dirichlet");
  if (bc != "dirichlet" && bc != "neumann")
    throw error("config: paraxial.bc must be dirichlet or neumann");
  s.par.neumann = (bc == "neumann");
  s.par.sponge = c.get_bool("paraxial.sponge", true);
  s.par.sponge_strength = c.get_double("paraxial.sponge_strength", 2.0);
  s.par.sponge_wavelengths = c.get_double("paraxial.sponge_wavelengths", 3.0);
  std::string nav = c.get_string("paraxial.N_av", "auto");
  s.par_nav_auto = (nav == "auto");
  if (!s.par_nav_auto) s.par.N_av = c.req_double("paraxial.N_av");
  s.par.theta = s.phys.theta;
  s.par.nu_C = s.phys.nu_C;

  s.out_every = c.get_int("output.every", 1);
  s.outdir = c.get_string("output.dir", "out");
  s.chk_every = c.get_int("checkpoint.every", 0);
  s.resume = c.get_string("resume", "");
  s.threads = c.get_int("threads", 1);
  if (s.threads < 1) throw error("config: threads must be >= 1");
  s.gm.nthreads = s.threads;

  if (s.solver == "hybrid") {
    double ic = s.fraction * s.grid.nxc();
    if (std::abs(ic - std::round(ic)) > 1e-9)
      throw error("config: paraxial.fraction must split at a coarse cell boundary");
    int Ic = (int)std::round(ic);
    if (Ic < 1 || Ic >= s.grid.nxc())
      throw error("config: paraxial.fraction leaves an empty zone");
  }

  auto leftovers = c.unused_keys();
  if (!leftovers.empty()) {
    std::string msg = "config: unknown keys:";
    for (const auto& k : leftovers) msg += " " + k;
    throw error(msg);
  }
  return s;
}

inline RealGrid initial_density(const GridSpec& g, const DensityInit& d) {
  RealGrid n(g.nxc(), g.nyc(), 0.0);
  if (d.profile == "constant") {
    n.fill(d.value);
  } else {
    double Lx = g.nx * g.dx;
    for (int M = 0; M < g.nyc(); ++M)
      for (int I = 0; I < g.nxc(); ++I) {
        double xc = (I + 0.5) * g.p0 * g.dx;
        n(I, M) = d.n0 + (d.n1 - d.n0) * (xc / Lx);
      }
  }
  for (double v : n.v)
    if (v < 0) throw error("density: negative initial value");
  return n;
}

// coarse transverse cells whose fine rows touch the absorbing fringe; the
// same mask coarse_intensity applies implicitly
inline std::vector<char> coarse_fringe_mask(const GridSpec& g) {
  std::vector<char> fr(g.nyc(), 0);
  for (int M = 0; M < g.nyc(); ++M)
    for (int m = M * g.p0; m < (M + 1) * g.p0; ++m)
      if (g.is_pml_row(m)) fr[M] = 1;
  return fr;
}

// Per-step Helmholtz solve with preconditioner reuse: the separable profile
// rarely changes between steps, so the eigenbasis, the reduction tables and
// the side factorizations are rebuilt only when the x-profile moves.
class HelmholtzStepper {
 public:
  struct Info {
    GmresResult gm;
    bool precond_rebuilt = false;
  };

  HelmholtzStepper(const GridSpec& g, const PmlProfile& pml, const PhysicsParams& ph,
                   EigenEngine eng, const GmresOptions& gm, bool precond_check = true,
                   std::string cache_path = {})
      : g_(g), pml_(pml), ph_(ph), eng_(eng), gm_(gm), check_(precond_check),
        cache_(std::move(cache_path)), psi_(g.nx, g.ny_solve) {
    psi_.fill(cplx(0, 0));
  }

  Info step(const RealGrid& N_fine, const std::vector<cplx>& alpha) {
    Info info;
    std::vector<double> N0 = mean_density_profile(g_, N_fine);
    sys_ = std::make_unique<DdmSystem>(g_, pml_, ph_, N0, N_fine);
    bool fresh = !pre_;
    if (!fresh)
      for (int i = 0; i < g_.nx; ++i)
        fresh = fresh || std::abs(N0[i] - N0_prev_[i]) > 1e-12;
    if (fresh) {
      pre_ = std::make_unique<DdmPreconditioner>(*sys_, make_basis());
      pre_->check_strip = check_;
      N0_prev_ = N0;
      ++rebuilds_;
      info.precond_rebuilt = true;
    }
    std::vector<cplx> b = sys_->assemble_rhs(psi_, alpha);
    std::vector<cplx> x(b.size(), cplx(0, 0));
    int nt = gm_.nthreads;
    info.gm = gmres_solve(
        sys_->dim(), [&](const cplx* v, cplx* w) { sys_->apply(v, w, nt); },
        [&](const cplx* v, cplx* w) { pre_->apply(v, w, nt); }, b.data(), x.data(), gm_);
    psi_ = sys_->glue(x);
    return info;
  }

  const ComplexGrid& psi() const { return psi_; }
  void set_psi(ComplexGrid p) {
    if (p.nx != g_.nx || p.ny != g_.ny_solve) throw error("stepper: field has wrong shape");
    psi_ = std::move(p);
  }
  const DdmSystem& system() const { return *sys_; }
  DdmPreconditioner& precond() { return *pre_; }
  int rebuilds() const { return rebuilds_; }
  const GridSpec& grid() const { return g_; }

 private:
  GridSpec g_;
  PmlProfile pml_;
  PhysicsParams ph_;
  EigenEngine eng_;
  GmresOptions gm_;
  bool check_;
  std::string cache_;
  ComplexGrid psi_;
  std::vector<double> N0_prev_;
  std::unique_ptr<DdmSystem> sys_;
  std::unique_ptr<DdmPreconditioner> pre_;
  int rebuilds_ = 0;

  SpectralBasis make_basis() {
    const SymTridiag& A0 = sys_->xop.A0;
    if (!cache_.empty()) {
      uint64_t h = tridiag_hash(A0);
      EigenDecomp d;
      if (load_basis(cache_, h, d)) {
        try {
          validate_decomp(A0, d);
          return SpectralBasis(d);
        } catch (const error&) {
          // stale or damaged cache; fall through and recompute
        }
      }
      d = eigen_decompose(A0, eng_);
      save_basis(cache_, d, h);
      return SpectralBasis(d);
    }
    return SpectralBasis::build(A0, eng_);
  }
};

struct StepRecord {
  int step = 0;
  int iters = 0;
  bool converged = true;
  double rel_res = 0;
  double true_res = -1;
  bool precond_rebuilt = false;
  int hydro_substeps = 0;
  double mass = 0;
};

struct RunResult {
  GridSpec zone;   // grid of the full-wave zone (the whole box unless hybrid)
  ComplexGrid psi; // final full-wave field on the zone (empty in paraxial mode)
  ComplexGrid E;   // final coarse envelope (empty in helmholtz mode)
  FluidState fluid{1, 1};
  RealGrid I;      // final coarse intensity on the full box
  std::vector<StepRecord> records;
  PrecondStats pstats;
  int precond_rebuilds = 0;
  double loop_seconds = 0;
};

namespace detail {

inline RealGrid take_cols(const RealGrid& a, int c0, int c1) {
  RealGrid out(c1 - c0, a.ny, 0.0);
  for (int m = 0; m < a.ny; ++m)
    for (int i = c0; i < c1; ++i) out(i - c0, m) = a(i, m);
  return out;
}

inline std::string step_tag(int t) {
  std::ostringstream ss;
  ss << std::setw(3) << std::setfill('0') << t;
  return ss.str();
}

}  // namespace detail

inline RunResult run_simulation(const Setup& s, std::ostream& log) {
  const GridSpec& gf = s.grid;
  bool do_par = s.solver != "helmholtz";
  bool do_helm = s.solver != "paraxial";

  int Ic = 0;  // first coarse column of the full-wave zone
  GridSpec gz = gf;
  if (s.solver == "hybrid") {
    Ic = (int)std::round(s.fraction * gf.nxc());
    gz.nx = gf.nx - Ic * gf.p0;
    gz.x_offset = gf.x_offset + Ic * gf.p0 * gf.dx;
  }

  double sigma = s.pmlset.sigma_max > 0
                     ? s.pmlset.sigma_max
                     : pml_strength_for_reflection(gf, s.pmlset.reflection, s.pmlset.order);
  PmlProfile pml = build_pml(gf, sigma, s.pmlset.order);

  FluidState fluid(gf.nxc(), gf.nyc());
  fluid.N = initial_density(gf, s.dens);

  std::filesystem::create_directories(s.outdir);

  RunResult out;
  out.zone = gz;

  std::unique_ptr<HelmholtzStepper> stepper;
  if (do_helm) {
    std::string cache = s.cache_basis ? s.outdir + "/basis.spb" : std::string();
    stepper = std::make_unique<HelmholtzStepper>(gz, pml, s.phys, s.engine, s.gm,
                                                 s.precond_check, cache);
  }

  std::unique_ptr<ParaxialMarcher> marcher;
  int par_cols = s.solver == "paraxial" ? gf.nxc() : Ic + 1;
  if (do_par) {
    ParaxialParams pp = s.par;
    if (s.par_nav_auto) {
      double acc = 0;
      for (int M = 0; M < gf.nyc(); ++M)
        for (int I = 0; I < par_cols; ++I) acc += fluid.N(I, M);
      pp.N_av = acc / ((double)par_cols * gf.nyc());
    }
    marcher = std::make_unique<ParaxialMarcher>(gf, pp);
  }

  std::vector<cplx> E0(gf.nyc());
  if (do_par)
    for (int M = 0; M < gf.nyc(); ++M)
      E0[M] = speckle_envelope(s.beam, (M + 0.5) * gf.p0 * gf.dy);

  std::vector<cplx> alpha_full;
  if (s.solver == "helmholtz") alpha_full = build_incoming_profile(gf, s.beam);

  int step0 = 0;
  if (!s.resume.empty()) {
    Checkpoint ck = load_checkpoint(s.resume);
    step0 = (int)ck.step;
    if (ck.N.nx != gf.nxc() || ck.N.ny != gf.nyc())
      throw error("resume: fluid grid does not match the configuration");
    fluid.N = ck.N;
    fluid.NUx = ck.NUx;
    fluid.NUy = ck.NUy;
    if (do_helm) stepper->set_psi(std::move(ck.psi));
    log << "resumed at step " << step0 << " from " << s.resume << "\n";
  }
  if (step0 >= s.steps) throw error("resume: checkpoint is already past the final step");

  std::ofstream gl;
  if (do_helm) {
    gl.open(s.outdir + "/gmres_log.csv", step0 ? std::ios::app : std::ios::trunc);
    if (!gl) throw error("driver: cannot write gmres_log.csv");
    if (!step0) gl << "time_step,iter,relative_residual\n";
  }

  std::vector<char> fringe = coarse_fringe_mask(gf);
  ComplexGrid E;
  auto t_start = std::chrono::steady_clock::now();

  for (int t = step0; t < s.steps; ++t) {
    StepRecord rec;
    rec.step = t;

    if (do_par) {
      RealGrid Np = detail::take_cols(fluid.N, 0, par_cols);
      E = marcher->march(Np, E0);
    }

    if (do_helm) {
      RealGrid Nz = s.solver == "hybrid" ? detail::take_cols(fluid.N, Ic, gf.nxc()) : fluid.N;
      RealGrid Nf = interp_to_fine(gz, Nz);
      std::vector<cplx> alpha;
      if (s.solver == "hybrid") {
        std::vector<cplx> col(gf.nyc());
        for (int M = 0; M < gf.nyc(); ++M) col[M] = E(Ic, M);
        alpha = column_to_fine(gz, col);
        // the march and the zone solve carry different reference
        // wavenumbers; restore the physical phase at the handover plane
        std::vector<double> n0z = mean_density_profile(gz, Nf);
        double kz = std::sqrt(1.0 - std::min(n0z.front(), 1.0 - 1e-12));
        double ky_h = std::sin(s.phys.theta) * kz;
        double e = gf.eps();
        cplx xph = std::exp(cplx(0, marcher->Kx * gz.x_offset / e));
        for (int m = 0; m < gz.ny_solve; ++m)
          alpha[m] *= xph * std::exp(cplx(0, (marcher->Ky - ky_h) * gz.y(m) / e));
      } else {
        alpha = alpha_full;
      }
      auto info = stepper->step(Nf, alpha);
      rec.iters = info.gm.iters;
      rec.converged = info.gm.converged;
      rec.rel_res = info.gm.rel_residual;
      rec.true_res = info.gm.true_residual;
      rec.precond_rebuilt = info.precond_rebuilt;
      for (size_t k = 0; k < info.gm.history.size(); ++k)
        gl << t << "," << (k + 1) << "," << std::setprecision(6) << std::scientific
           << info.gm.history[k] << "\n" << std::defaultfloat;
      if (!info.gm.converged)
        log << "warning: step " << t << " stopped at residual " << info.gm.rel_residual << "\n";
    }

    RealGrid I(gf.nxc(), gf.nyc(), 0.0);
    if (do_helm) {
      RealGrid Iz = coarse_intensity(gz, stepper->psi());
      for (int M = 0; M < gf.nyc(); ++M)
        for (int Izc = 0; Izc < Iz.nx; ++Izc) I(Ic + Izc, M) = Iz(Izc, M);
    }
    if (do_par) {
      int upto = s.solver == "paraxial" ? gf.nxc() : Ic;
      for (int M = 0; M < gf.nyc(); ++M) {
        if (fringe[M]) continue;
        for (int Ip = 0; Ip < upto; ++Ip) I(Ip, M) = std::norm(E(Ip, M));
      }
    }

    if (s.hydro_on) {
      HydroStats hs = hydro_advance(gf, fluid, I, s.hyd, s.phys.c_dt);
      rec.hydro_substeps = hs.substeps;
      if (hs.floored) log << "warning: step " << t << " clamped the density floor\n";
    }
    rec.mass = total_mass(fluid);

    bool last = t + 1 == s.steps;
    if (s.out_every > 0 && (t % s.out_every == 0 || last)) {
      write_pgm16(s.outdir + "/intensity_" + detail::step_tag(t) + ".pgm", I);
      write_fld(s.outdir + "/density_" + detail::step_tag(t) + ".fld", fluid.N);
    }
    if (s.chk_every > 0 && ((t + 1) % s.chk_every == 0 || last)) {
      Checkpoint ck;
      ck.step = (uint64_t)t + 1;
      ck.psi = do_helm ? stepper->psi() : ComplexGrid(0, 0);
      ck.N = fluid.N;
      ck.NUx = fluid.NUx;
      ck.NUy = fluid.NUy;
      save_checkpoint(s.outdir + "/checkpoint_" + detail::step_tag(t + 1) + ".chk", ck);
    }

    log << "step " << t;
    if (do_helm)
      log << ": iters=" << rec.iters << " res=" << std::setprecision(3) << std::scientific
          << rec.rel_res << std::defaultfloat << (rec.precond_rebuilt ? " (rebuilt)" : "");
    if (s.hydro_on) log << " sub=" << rec.hydro_substeps;
    log << "\n";
    if (last) out.I = I;
    out.records.push_back(rec);
  }

  out.loop_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  if (do_helm) {
    out.psi = stepper->psi();
    out.pstats = stepper->precond().stats;
    out.precond_rebuilds = stepper->rebuilds();
  }
  if (do_par) out.E = std::move(E);
  out.fluid = std::move(fluid);
  return out;
}

inline RunResult run_simulation(const Config& c, std::ostream& log) {
  return run_simulation(parse_setup(c), log);
}

// Thread sweep: a fixed-size pass (same box for every thread count) and a
// grown pass (transverse extent scaled with the thread count).
inline void run_benchmark(const Config& c, const std::vector<int>& threads, std::ostream& log) {
  Setup base = parse_setup(c);
  std::filesystem::create_directories(base.outdir);
  std::ofstream csv(base.outdir + "/bench.csv");
  if (!csv) throw error("bench: cannot write bench.csv");
  csv << "mode,threads,steps,wall_s,per_step_s,speedup,efficiency\n";
  std::ostringstream sink;

  double t1_fixed = 0;
  for (int T : threads) {
    Setup s = base;
    s.threads = T;
    s.gm.nthreads = T;
    s.outdir = base.outdir + "/bench_fixed_" + std::to_string(T);
    RunResult r = run_simulation(s, sink);
    if (t1_fixed == 0) t1_fixed = r.loop_seconds;
    double sp = t1_fixed / r.loop_seconds;
    csv << "fixed," << T << "," << s.steps << "," << std::setprecision(6) << r.loop_seconds
        << "," << r.loop_seconds / s.steps << "," << sp << "," << sp / T << "\n";
    log << "fixed T=" << T << " wall=" << r.loop_seconds << "s speedup=" << sp << "\n";
  }

  double t1_grown = 0;
  for (int T : threads) {
    Setup s = base;
    s.threads = T;
    s.gm.nthreads = T;
    s.grid = GridSpec::make(base.lambda0, base.wl_x, base.wl_y * T, base.ppw, base.p0,
                            base.pml_wl, base.novl);
    // keep the beam where it was; extra transverse room is empty
    s.outdir = base.outdir + "/bench_grown_" + std::to_string(T);
    RunResult r = run_simulation(s, sink);
    if (t1_grown == 0) t1_grown = r.loop_seconds;
    double eff = t1_grown / r.loop_seconds;  // ideal weak scaling keeps wall time flat
    csv << "grown," << T << "," << s.steps << "," << std::setprecision(6) << r.loop_seconds
        << "," << r.loop_seconds / s.steps << "," << t1_grown * T / r.loop_seconds << ","
        << eff << "\n";
    log << "grown T=" << T << " wall=" << r.loop_seconds << "s efficiency=" << eff << "\n";
  }
}

// parse, derive and echo everything without running; throws on any defect
inline void validate_config(const Config& c, std::ostream& log) {
  Setup s = parse_setup(c);
  double sigma = s.pmlset.sigma_max > 0
                     ? s.pmlset.sigma_max
                     : pml_strength_for_reflection(s.grid, s.pmlset.reflection, s.pmlset.order);
  build_pml(s.grid, sigma, s.pmlset.order);  // validates the profile numbers
  const GridSpec& g = s.grid;
  log << "solver " << s.solver << ", " << s.steps << " steps of c*dt=" << s.phys.c_dt << "\n";
  log << "grid " << g.nx << " x " << g.ny_phys << " cells (" << g.nx << " x " << g.ny_solve
      << " solved), dx=" << g.dx << ", fringe " << g.npml << " rows each side\n";
  log << "central strip " << g.nc << " rows (reduction depth " << g.klev << "), overlap "
      << g.novl << ", coarse " << g.nxc() << " x " << g.nyc() << "\n";
  double gib = 16.0 * (double)(g.nx) * (g.ny_solve + 2 * g.novl) * (s.gm.max_iter + 6) /
               (1024.0 * 1024.0 * 1024.0);
  log << "memory high-water estimate " << std::setprecision(2) << gib << " GiB for "
      << s.gm.max_iter << " basis vectors\n";
  log << "ok\n";
}

}  // namespace caustic
