#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "caustic/caustic.hpp"
#include "doctest.h"

using namespace caustic;
namespace fs = std::filesystem;

namespace {

// a box small enough that a step costs milliseconds
std::string base_cfg(const std::string& outdir) {
  return R"(grid.lambda0 = 1.0
grid.wavelengths_x = 3
grid.wavelengths_y = 5
grid.ppw = 10
grid.p0 = 2
grid.pml_wavelengths = 2
grid.overlap = 2
solver.c_dt = 1.0
solver.steps = 3
solver.theta_deg = 10
beam.speckles = 1
beam.center0 = 2.5
beam.width0 = 0.8
output.dir = )" + outdir + "\n";
}

Setup setup_from(const std::string& text) {
  return parse_setup(Config::parse_string(text));
}

struct TmpDir {
  fs::path p;
  explicit TmpDir(const std::string& name) : p(fs::temp_directory_path() / name) {
    fs::remove_all(p);
    fs::create_directories(p);
  }
  ~TmpDir() { fs::remove_all(p); }
  std::string str() const { return p.string(); }
};

int count_lines(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  int n = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++n;
  return n;
}

}  // namespace

TEST_SUITE("driver") {

TEST_CASE("configuration parses into a complete setup") {
  TmpDir td("drv_parse");
  std::string text = base_cfg(td.str()) + R"(
solver.nu_C = 0.05
solver.couple = false
gmres.tol = 1e-9
gmres.max_iter = 40
precond.engine = dense
precond.check_strip = false
precond.cache_basis = true
pml.order = 3
pml.reflection = 1e-5
density.profile = linear
density.n0 = 0.05
density.n1 = 0.4
hydro.enabled = true
hydro.Te = 0.002
hydro.gamma_p = 0.12
hydro.cfl = 0.4
output.every = 2
checkpoint.every = 2
threads = 2
)";
  Setup s = setup_from(text);
  CHECK(s.grid.nx == 30);
  CHECK(s.grid.p0 == 2);
  CHECK(s.solver == "helmholtz");
  CHECK(s.phys.theta == doctest::Approx(10.0 * M_PI / 180.0));
  CHECK(s.phys.nu_C == 0.05);
  CHECK_FALSE(s.phys.couple);
  CHECK(s.gm.tol == 1e-9);
  CHECK(s.gm.max_iter == 40);
  CHECK(s.gm.nthreads == 2);
  CHECK(s.engine == EigenEngine::dense);
  CHECK_FALSE(s.precond_check);
  CHECK(s.cache_basis);
  CHECK(s.pmlset.order == 3);
  CHECK(s.dens.profile == "linear");
  CHECK(s.dens.n1 == 0.4);
  CHECK(s.hydro_on);
  CHECK(s.hyd.gamma_p == 0.12);
  CHECK(s.out_every == 2);
  CHECK(s.chk_every == 2);
  CHECK(s.threads == 2);
  CHECK(s.outdir == td.str());
}

TEST_CASE("configuration rejections") {
  TmpDir td("drv_rej");
  std::string base = base_cfg(td.str());
  CHECK_THROWS_WITH_AS(setup_from(base + "solver.typo = x\n"),
                       doctest::Contains("unknown keys"), error);
  CHECK_THROWS_AS(setup_from(base + "solver.type = fdtd\n"), error);
  CHECK_THROWS_AS(setup_from(base + "solver.theta_deg = 89\n"), error);
  CHECK_THROWS_AS(setup_from(base + "threads = 0\n"), error);
  CHECK_THROWS_AS(setup_from(base + "density.profile = linear\ndensity.n0 = -0.1\n"), error);
  // hybrid split must land on a coarse cell boundary and leave both zones real
  CHECK_THROWS_AS(setup_from(base + "solver.type = hybrid\nparaxial.fraction = 0.33\n"), error);
  CHECK_THROWS_AS(setup_from(base + "solver.type = hybrid\nparaxial.fraction = 1.0\n"), error);
  CHECK_NOTHROW(setup_from(base + "solver.type = hybrid\nparaxial.fraction = 0.4\n"));
  // missing required key
  CHECK_THROWS_AS(setup_from("grid.lambda0 = 1\n"), error);
}

TEST_CASE("initial density profiles") {
  GridSpec g = GridSpec::make(1.0, 3, 5, 10, 2, 2.0, 2);
  DensityInit c;
  c.profile = "constant";
  c.value = 0.17;
  RealGrid n = initial_density(g, c);
  for (double v : n.v) CHECK(v == 0.17);

  DensityInit l;
  l.profile = "linear";
  l.n0 = 0.1;
  l.n1 = 0.5;
  RealGrid r = initial_density(g, l);
  double Lx = g.nx * g.dx;
  for (int I = 0; I < g.nxc(); ++I) {
    double xc = (I + 0.5) * g.p0 * g.dx;
    CHECK(r(I, 0) == doctest::Approx(0.1 + 0.4 * xc / Lx));
    CHECK(r(I, g.nyc() - 1) == r(I, 0));
  }
}

TEST_CASE("stepper rebuilds the preconditioner only when the profile moves") {
  GridSpec g = GridSpec::make(1.0, 2, 5, 10, 2, 2.0, 2);
  PmlProfile pml = build_pml(g, pml_strength_for_reflection(g, 1e-4, 2), 2);
  PhysicsParams ph;
  ph.c_dt = 1.0;
  GmresOptions gm;
  gm.tol = 1e-8;
  HelmholtzStepper st(g, pml, ph, EigenEngine::auto_fallback, gm);
  RealGrid N(g.nx, g.ny_solve, 0.1);
  std::vector<cplx> alpha(g.ny_solve, cplx(1, 0));
  auto i1 = st.step(N, alpha);
  CHECK(i1.precond_rebuilt);
  auto i2 = st.step(N, alpha);  // same profile: reuse
  CHECK_FALSE(i2.precond_rebuilt);
  for (auto& v : N.v) v += 1e-3;  // profile moved: rebuild
  auto i3 = st.step(N, alpha);
  CHECK(i3.precond_rebuilt);
  CHECK(st.rebuilds() == 2);
  CHECK(i1.gm.converged);
  CHECK(i3.gm.converged);
}

TEST_CASE("eigenbasis cache is written once and reused") {
  TmpDir td("drv_cache");
  GridSpec g = GridSpec::make(1.0, 2, 5, 10, 2, 2.0, 2);
  PmlProfile pml = build_pml(g, pml_strength_for_reflection(g, 1e-4, 2), 2);
  PhysicsParams ph;
  ph.c_dt = 1.0;
  GmresOptions gm;
  gm.tol = 1e-8;
  std::string cache = td.str() + "/basis.spb";
  RealGrid N(g.nx, g.ny_solve, 0.1);
  std::vector<cplx> alpha(g.ny_solve, cplx(1, 0));

  HelmholtzStepper a(g, pml, ph, EigenEngine::auto_fallback, gm, true, cache);
  a.step(N, alpha);
  REQUIRE(fs::exists(cache));
  auto t0 = fs::last_write_time(cache);

  HelmholtzStepper b(g, pml, ph, EigenEngine::auto_fallback, gm, true, cache);
  b.step(N, alpha);
  CHECK(fs::last_write_time(cache) == t0);  // loaded, not rewritten
  CHECK(a.psi().v == b.psi().v);

  // a corrupt cache is recomputed and replaced, not trusted
  {
    std::ofstream f(cache, std::ios::binary | std::ios::trunc);
    f << "garbage";
  }
  HelmholtzStepper c(g, pml, ph, EigenEngine::auto_fallback, gm, true, cache);
  c.step(N, alpha);
  CHECK(c.psi().v == a.psi().v);
  EigenDecomp d;
  CHECK(load_basis(cache, tridiag_hash(a.system().xop.A0), d));
}

TEST_CASE("a short run writes every advertised output") {
  TmpDir td("drv_run");
  Config c = Config::parse_string(base_cfg(td.str()) + R"(
density.value = 0.15
hydro.enabled = true
hydro.gamma_p = 0.05
output.every = 2
checkpoint.every = 2
gmres.tol = 1e-8
)");
  std::ostringstream log;
  RunResult r = run_simulation(c, log);
  REQUIRE(r.records.size() == 3);
  int iters = 0;
  for (auto& rec : r.records) {
    CHECK(rec.converged);
    iters += rec.iters;
  }
  CHECK(r.precond_rebuilds >= 1);
  CHECK(r.psi.nx == r.zone.nx);
  // intensity frames at steps 0, 2 (cadence) and the final step
  CHECK(fs::exists(td.p / "intensity_000.pgm"));
  CHECK_FALSE(fs::exists(td.p / "intensity_001.pgm"));
  CHECK(fs::exists(td.p / "intensity_002.pgm"));
  CHECK(fs::exists(td.p / "density_002.fld"));
  CHECK(fs::exists(td.p / "checkpoint_002.chk"));
  CHECK(fs::exists(td.p / "checkpoint_003.chk"));
  // one csv row per Krylov iteration plus the header
  CHECK(count_lines((td.p / "gmres_log.csv").string()) == iters + 1);
  RealGrid n = read_fld_real((td.p / "density_002.fld").string());
  CHECK(n.nx == r.fluid.N.nx);
  CHECK(log.str().find("step 0") != std::string::npos);
}

TEST_CASE("interrupted and resumed run reproduces the straight run exactly") {
  TmpDir ta("drv_straight"), tb("drv_resumed");
  // real plasma, so the transverse mean profile moves every step and both
  // runs rebuild the preconditioner on the same schedule
  std::string common = R"(
density.value = 0.15
hydro.enabled = true
hydro.Te = 0.002
hydro.gamma_p = 0.2
gmres.tol = 1e-9
)";
  std::ostringstream log;
  Config ca = Config::parse_string(base_cfg(ta.str()) + common);
  ca.set("solver.steps", "4");
  RunResult straight = run_simulation(ca, log);

  Config cb1 = Config::parse_string(base_cfg(tb.str()) + common + "checkpoint.every = 2\n");
  Setup sb1 = parse_setup(cb1);
  sb1.steps = 2;  // stop early
  run_simulation(sb1, log);
  Config cb2 = Config::parse_string(base_cfg(tb.str()) + common + "checkpoint.every = 2\n" +
                                    "resume = " + tb.str() + "/checkpoint_002.chk\n");
  cb2.set("solver.steps", "4");
  RunResult resumed = run_simulation(cb2, log);

  REQUIRE(straight.psi.v.size() == resumed.psi.v.size());
  CHECK(straight.psi.v == resumed.psi.v);
  CHECK(straight.fluid.N.v == resumed.fluid.N.v);
  CHECK(straight.fluid.NUx.v == resumed.fluid.NUx.v);
  CHECK(straight.fluid.NUy.v == resumed.fluid.NUy.v);
  CHECK(resumed.records.size() == 2);
  CHECK(resumed.records.front().step == 2);
  CHECK(log.str().find("resumed at step 2") != std::string::npos);
}

TEST_CASE("envelope-only mode runs and fills the intensity") {
  TmpDir td("drv_par");
  Config c = Config::parse_string(base_cfg(td.str()) + R"(
density.value = 0.15
solver.type = paraxial
paraxial.bc = neumann
)");
  std::ostringstream log;
  RunResult r = run_simulation(c, log);
  CHECK(r.psi.v.empty());
  REQUIRE(!r.E.v.empty());
  CHECK(r.E.nx == r.zone.nxc());
  double mx = 0;
  for (double v : r.I.v) mx = std::max(mx, v);
  CHECK(mx > 0);
  CHECK_FALSE(fs::exists(td.p / "gmres_log.csv"));
  CHECK(fs::exists(td.p / "intensity_002.pgm"));
}

TEST_CASE("hybrid mode marches the front zone and solves the back zone") {
  TmpDir td("drv_hyb");
  Config c = Config::parse_string(base_cfg(td.str()) + R"(
density.value = 0.15
solver.type = hybrid
paraxial.fraction = 0.4
gmres.tol = 1e-8
)");
  std::ostringstream log;
  RunResult r = run_simulation(c, log);
  // split at 40% of 15 coarse columns = column 6
  CHECK(r.zone.nx == 30 - 6 * 2);
  CHECK(r.zone.x_offset == doctest::Approx(6 * 2 * r.zone.dx));
  CHECK(!r.psi.v.empty());
  CHECK(!r.E.v.empty());
  for (auto& rec : r.records) CHECK(rec.converged);
  // both zones light up
  bool front = false, back = false;
  for (int M = 0; M < r.I.ny; ++M)
    for (int I = 0; I < r.I.nx; ++I) {
      if (r.I(I, M) > 1e-6) (I < 6 ? front : back) = true;
    }
  CHECK(front);
  CHECK(back);
}

TEST_CASE("benchmark table has one row per thread count") {
  TmpDir td("drv_bench");
  Config c = Config::parse_string(base_cfg(td.str()) + "gmres.tol = 1e-6\n");
  std::ostringstream log;
  run_benchmark(c, {1, 2}, log);
  std::ifstream in(td.p / "bench.csv");
  REQUIRE(in.good());
  std::string header;
  std::getline(in, header);
  CHECK(header == "mode,threads,steps,wall_s,per_step_s,speedup,efficiency");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 4);  // fixed and grown, two thread counts each
}

TEST_CASE("validation echoes the run without executing it") {
  TmpDir td("drv_val");
  Config c = Config::parse_string(base_cfg(td.str()));
  std::ostringstream rep;
  validate_config(c, rep);
  std::string report = rep.str();
  CHECK(report.find("ok") != std::string::npos);
  CHECK(report.find("30") != std::string::npos);  // nx echo
  CHECK_FALSE(fs::exists(td.p / "gmres_log.csv"));
}

}  // TEST_SUITE
