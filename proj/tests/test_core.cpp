#include <complex>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "caustic/caustic.hpp"
#include "doctest.h"

using namespace caustic;

namespace {
std::string tmpfile_path(const char* tag) {
  return (std::filesystem::temp_directory_path() / tag).string();
}
}  // namespace

TEST_SUITE("core") {

TEST_CASE("grid storage keeps each transverse line contiguous") {
  ComplexGrid g(3, 2);
  for (int m = 0; m < 2; ++m)
    for (int i = 0; i < 3; ++i) g(i, m) = cplx(i, m);
  CHECK(g.v[0] == cplx(0, 0));
  CHECK(g.v[2] == cplx(2, 0));
  CHECK(g.v[3] == cplx(0, 1));  // line m=1 starts right after line m=0
  CHECK(g.col(1)[2] == cplx(2, 1));
  CHECK(g.size() == 6);
}

TEST_CASE("parallel ranges partition exactly, for any thread count") {
  for (int nt : {1, 2, 3, 8, 13}) {
    std::vector<int> hits(11, 0);
    parallel_ranges(nt, 11, [&](long a, long b) {
      for (long i = a; i < b; ++i) hits[i] += 1;  // ranges are disjoint
    });
    for (int h : hits) CHECK(h == 1);
  }
  parallel_ranges(4, 0, [&](long a, long b) { CHECK(a == b); });
}

TEST_CASE("config parses trimmed pairs and strips comments") {
  Config c = Config::parse_string("  a.b = 3.5  # trailing\n\n# full line\n name=text value\n");
  CHECK(c.get_double("a.b", 0) == 3.5);
  CHECK(c.get_string("name", "") == "text value");
}

TEST_CASE("config rejects malformed lines, duplicates and bad keys") {
  CHECK_THROWS_AS(Config::parse_string("just words\n"), error);
  CHECK_THROWS_AS(Config::parse_string("a = 1\na = 2\n"), error);
  CHECK_THROWS_AS(Config::parse_string("sp ace = 1\n"), error);
  CHECK_THROWS_AS(Config::parse_string("= 1\n"), error);
}

TEST_CASE("config typed getters convert or refuse") {
  Config c = Config::parse_string("i = 42\nf = -1e-3\nb1 = yes\nb2 = Off\nbad = 3x\n");
  CHECK(c.get_int("i", 0) == 42);
  CHECK(c.get_double("f", 0) == -1e-3);
  CHECK(c.get_bool("b1", false));
  CHECK_FALSE(c.get_bool("b2", true));
  CHECK_THROWS_AS(c.get_int("bad", 0), error);
  CHECK_THROWS_AS(c.get_bool("i", false), error);  // 42 is not a truth value
  CHECK_THROWS_AS(c.req_double("missing"), error);
  CHECK(c.get_int("absent", 7) == 7);
}

TEST_CASE("config reports keys nothing consumed") {
  Config c = Config::parse_string("used = 1\ntypo.key = 2\n");
  c.get_int("used", 0);
  auto left = c.unused_keys();
  REQUIRE(left.size() == 1);
  CHECK(left[0] == "typo.key");
}

TEST_CASE("config serializes to reparseable text") {
  Config c = Config::parse_string("z = 3\na.b = hello\n");
  Config d = Config::parse_string(c.serialize());
  CHECK(d.get_string("a.b", "") == "hello");
  CHECK(d.get_int("z", 0) == 3);
}

TEST_CASE("grid derives fringe, strip and reduction depth") {
  GridSpec g = GridSpec::make(1.0, 6, 6, 10, 4, 2.0, 2);
  CHECK(g.nx == 60);
  CHECK(g.ny_phys == 60);
  CHECK(g.npml == 20);
  CHECK(g.nc == 31);  // next 2^k - 1 above the 20 interior rows
  CHECK(g.klev == 5);
  CHECK(g.ny_solve == 71);
  CHECK(g.dx == doctest::Approx(0.1));
  CHECK(g.eps() == doctest::Approx(1.0 / (2 * std::numbers::pi)));
  CHECK(g.cen_lo() == 20);
  CHECK(g.cen_hi() == 51);
  CHECK(g.bot_rows() == 22);
  CHECK(g.top_lo() == 49);
  CHECK(g.nxc() == 15);
  CHECK(g.nyc() == 15);
  CHECK(g.is_pml_row(19));
  CHECK_FALSE(g.is_pml_row(20));
  CHECK_FALSE(g.is_pml_row(50));
  CHECK(g.is_pml_row(51));
}

TEST_CASE("grid refuses under-resolved or misaligned boxes") {
  CHECK_THROWS_AS(GridSpec::make(1.0, 6, 6, 8, 4, 2.0, 2), error);    // too coarse
  CHECK_THROWS_AS(GridSpec::make(1.0, 6, 6, 10, 1, 2.0, 2), error);   // no coarse ratio
  CHECK_THROWS_AS(GridSpec::make(1.0, 6, 6, 10, 4, 1.5, 2), error);   // thin fringe
  CHECK_THROWS_AS(GridSpec::make(1.0, 5.5, 6, 10, 4, 2.0, 2), error); // 55 cells, p0=4
  CHECK_THROWS_AS(GridSpec::make(-1, 6, 6, 10, 4, 2.0, 2), error);
}

TEST_CASE("absorbing profile ramps analytically and is flat inside") {
  GridSpec g = GridSpec::make(1.0, 6, 6, 10, 4, 2.0, 2);
  PmlProfile p = build_pml(g, 3.0, 2);
  double D = g.npml * g.dy;
  CHECK(p.eta_face[g.npml] == cplx(1, 0));  // inner face of the bottom layer
  CHECK(p.eta_face[g.ny_solve - g.npml] == cplx(1, 0));
  for (int m = g.npml; m < g.ny_solve - g.npml; ++m) {
    CHECK(p.sigma[m] == 0.0);
    CHECK(p.eta[m] == cplx(1, 0));
  }
  // center of the outermost bottom row: depth D - dy/2
  double d0 = (D - 0.5 * g.dy) / D;
  CHECK(p.sigma[0] == doctest::Approx(3.0 * d0 * d0));
  CHECK(p.sigma[g.ny_solve - 1] == doctest::Approx(3.0 * d0 * d0));  // mirrored
  CHECK(p.sigma[5] > p.sigma[6]);
  cplx want = 1.0 / cplx(1.0, 3.0 * g.eps());
  CHECK(std::abs(p.eta_face[0] - want) < 1e-15);
  CHECK_THROWS_AS(build_pml(g, 0.0, 2), error);
  CHECK_THROWS_AS(build_pml(g, 1.0, 7), error);
}

TEST_CASE("reflection target inverts to the ramp strength") {
  GridSpec g = GridSpec::make(1.0, 6, 6, 10, 4, 2.0, 2);
  double s = pml_strength_for_reflection(g, 1e-4, 2);
  double D = g.npml * g.dy;
  CHECK(std::exp(-2.0 * s * D / 3.0) == doctest::Approx(1e-4));
  CHECK_THROWS_AS(pml_strength_for_reflection(g, 2.0, 2), error);
}

TEST_CASE("incoming envelope sums speckles with phase and truncates the tail") {
  GridSpec g = GridSpec::make(1.0, 6, 6, 10, 4, 2.0, 2);
  SpeckleSpec s;
  s.speckles.push_back({3.5, 0.5, 2.0, 0.0});
  s.speckles.push_back({4.0, 0.5, 1.0, std::numbers::pi / 2});
  auto a = build_incoming_profile(g, s);
  REQUIRE((int)a.size() == g.ny_solve);
  double y = g.y(30);
  cplx want = 2.0 * std::exp(-sq((y - 3.5) / 0.5)) +
              cplx(0, 1) * std::exp(-sq((y - 4.0) / 0.5));
  CHECK(std::abs(a[30] - want) < 1e-15);
  CHECK(a[0] == cplx(0, 0));  // far tail is cleared exactly

  SpeckleSpec bad;
  bad.speckles.push_back({0.5, 0.5, 1.0, 0.0});  // inside the fringe
  CHECK_THROWS_AS(build_incoming_profile(g, bad), error);
  SpeckleSpec neg;
  neg.speckles.push_back({3.5, -1.0, 1.0, 0.0});
  CHECK_THROWS_AS(build_incoming_profile(g, neg), error);
}

TEST_CASE("coarse intensity averages cells and blanks the fringe") {
  GridSpec g = GridSpec::make(1.0, 6, 6, 10, 4, 2.0, 2);
  ComplexGrid psi(g.nx, g.ny_solve);
  psi.fill(cplx(0, 2));  // |psi|^2 = 4 everywhere
  RealGrid I = coarse_intensity(g, psi);
  REQUIRE(I.nx == 15);
  REQUIRE(I.ny == 15);
  // bottom fringe covers rows 0..19, so coarse bands 0..4 touch it
  CHECK(I(7, 4) == 0.0);
  CHECK(I(7, 5) == doctest::Approx(4.0));
  // band 11 is the last one clear of the top fringe, which starts at row 51
  CHECK(I(7, 11) == doctest::Approx(4.0));
  CHECK(I(7, 12) == 0.0);
  ComplexGrid bad(g.nx, g.ny_phys);
  CHECK_THROWS_AS(coarse_intensity(g, bad), error);
}

TEST_CASE("interpolation is exact on linear data and clamps past the centers") {
  GridSpec g = GridSpec::make(1.0, 6, 6, 10, 4, 2.0, 2);
  RealGrid c(g.nxc(), g.nyc(), 0.0);
  for (int M = 0; M < g.nyc(); ++M)
    for (int I = 0; I < g.nxc(); ++I) c(I, M) = 2.0 * I - 3.0 * M;
  RealGrid f = interp_to_fine(g, c);
  REQUIRE(f.nx == g.nx);
  REQUIRE(f.ny == g.ny_solve);
  // linear data comes back as the same linear function of the clamped
  // fractional coarse coordinates, at every fine point
  double h = g.p0 * g.dx;
  auto frac = [&](double w, int n) {
    double u = (w - 0.5 * h) / h;
    return std::min(std::max(u, 0.0), (double)(n - 1));
  };
  for (int m = 0; m < g.ny_solve; m += 3)
    for (int i = 0; i < g.nx; i += 3) {
      double want = 2.0 * frac(g.x(i), g.nxc()) - 3.0 * frac(g.y(m), g.nyc());
      CHECK(f(i, m) == doctest::Approx(want).epsilon(1e-12));
    }
  // beyond the last coarse center everything is clamped
  CHECK(f(g.nx - 1, g.ny_solve - 1) == doctest::Approx(c(g.nxc() - 1, g.nyc() - 1)));
  CHECK(f(0, 0) == doctest::Approx(c(0, 0)));
}

TEST_CASE("pgm carries a 16-bit big-endian raster, top line first") {
  RealGrid img(2, 2, 0.0);
  img(0, 0) = 0;
  img(1, 0) = 1;
  img(0, 1) = 2;
  img(1, 1) = 4;  // the maximum maps to 65535
  std::string path = tmpfile_path("t_img.pgm");
  write_pgm16(path, img);
  std::ifstream in(path, std::ios::binary);
  std::string head;
  std::getline(in, head);
  CHECK(head == "P5");
  std::getline(in, head);
  CHECK(head == "2 2");
  std::getline(in, head);
  CHECK(head == "65535");
  unsigned char b[8];
  in.read((char*)b, 8);
  auto val = [&](int k) { return 256 * b[2 * k] + b[2 * k + 1]; };
  CHECK(val(0) == 32768);  // img(0,1) = 2 out of 4
  CHECK(val(1) == 65535);
  CHECK(val(2) == 0);
  CHECK(val(3) == 16384);
  std::filesystem::remove(path);
}

TEST_CASE("field files roundtrip both payload types") {
  std::string path = tmpfile_path("t_field.fld");
  RealGrid r(3, 2, 0.0);
  for (size_t k = 0; k < r.v.size(); ++k) r.v[k] = 0.5 * (double)k - 1;
  write_fld(path, r);
  RealGrid r2 = read_fld_real(path);
  CHECK(r2.nx == 3);
  CHECK(r2.ny == 2);
  CHECK(r2.v == r.v);
  CHECK_THROWS_AS(read_fld_complex(path), error);

  ComplexGrid c(2, 2);
  c.v = {cplx(1, -2), cplx(0, 3), cplx(-4, 0), cplx(5, 6)};
  write_fld(path, c);
  ComplexGrid c2 = read_fld_complex(path);
  CHECK(c2.v == c.v);
  CHECK_THROWS_AS(read_fld_real(path), error);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_fld_real(path), error);  // now missing
}

TEST_CASE("basis cache honors the operator hash") {
  SymTridiag t;
  t.diag = {cplx(1, 0.1), cplx(2, 0.2), cplx(3, 0.3)};
  t.off = {cplx(0.5, 0), cplx(0.25, 0)};
  EigenDecomp d;
  d.n = 3;
  d.lambda = {cplx(1, 0), cplx(2, 0), cplx(3, 0)};
  d.Q.assign(9, cplx(0, 0));
  d.Q[0] = d.Q[4] = d.Q[8] = cplx(1, 0);
  std::string path = tmpfile_path("t_basis.spb");
  uint64_t h = tridiag_hash(t);
  save_basis(path, d, h);
  EigenDecomp e;
  CHECK(load_basis(path, h, e));
  CHECK(e.lambda == d.lambda);
  CHECK(e.Q == d.Q);
  SymTridiag t2 = t;
  t2.diag[1] += 1e-14;  // any perturbation must invalidate the cache
  CHECK(tridiag_hash(t2) != h);
  CHECK_FALSE(load_basis(path, tridiag_hash(t2), e));
  CHECK_FALSE(load_basis(path + ".nothere", h, e));
  std::filesystem::remove(path);
}

TEST_CASE("checkpoints restore every array bitwise") {
  Checkpoint c;
  c.step = 17;
  c.psi = ComplexGrid(3, 2);
  for (size_t k = 0; k < c.psi.v.size(); ++k) c.psi.v[k] = cplx(0.1 * (double)k, -0.2);
  c.N = RealGrid(2, 2, 0.5);
  c.NUx = RealGrid(2, 2, -0.125);
  c.NUy = RealGrid(2, 2, 0.0);
  c.N(1, 1) = 0.7;
  std::string path = tmpfile_path("t_state.chk");
  save_checkpoint(path, c);
  Checkpoint r = load_checkpoint(path);
  CHECK(r.step == 17);
  CHECK(r.psi.v == c.psi.v);
  CHECK(r.N.v == c.N.v);
  CHECK(r.NUx.v == c.NUx.v);
  CHECK(r.NUy.v == c.NUy.v);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_checkpoint(path), error);
}

}  // TEST_SUITE
