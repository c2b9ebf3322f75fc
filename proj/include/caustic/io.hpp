#pragma once

// On-disk formats.
//
//   intensity_NNN.pgm   binary PGM (P5), 16-bit, linear scale, y increasing upward
//   *.fld               "FLD1" u32 dtype(1=f64,2=c128) u32 nx u32 ny, column-major payload
//   *.spb               "SPB1" u32 n u64 hash, eigenvalues then eigenvectors (c128)
//   *.chk               "CHK1" u32 version u64 step, field grid, fluid grids
//
// Multi-byte integers and floats in .fld/.spb/.chk are little-endian; this
// implementation assumes a little-endian host.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "core.hpp"
#include "spectral.hpp"

namespace caustic {

static_assert(std::endian::native == std::endian::little,
              "field files are little-endian; big-endian hosts are not supported");

namespace detail {

template <class T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
bool read_pod(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return bool(in);
}

template <class T>
void write_vec(std::ostream& out, const std::vector<T>& v) {
  out.write(reinterpret_cast<const char*>(v.data()), (std::streamsize)(v.size() * sizeof(T)));
}

template <class T>
bool read_vec(std::istream& in, std::vector<T>& v, size_t n) {
  v.resize(n);
  in.read(reinterpret_cast<char*>(v.data()), (std::streamsize)(n * sizeof(T)));
  return bool(in);
}

inline bool read_magic(std::istream& in, const char* want) {
  char got[4];
  in.read(got, 4);
  return in && std::memcmp(got, want, 4) == 0;
}

}  // namespace detail

// ---- PGM ----

// 16-bit binary PGM; sample rows run top to bottom, so grid row ny-1 is
// written first and the image is oriented with y up
inline void write_pgm16(const std::string& path, const RealGrid& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("io: cannot write " + path);
  double mx = 0;
  for (double v : img.v) mx = std::max(mx, v);
  out << "P5\n" << img.nx << " " << img.ny << "\n65535\n";
  double scale = mx > 0 ? 65535.0 / mx : 0.0;
  std::vector<unsigned char> row((size_t)img.nx * 2);
  for (int m = img.ny - 1; m >= 0; --m) {
    for (int i = 0; i < img.nx; ++i) {
      double v = img(i, m) * scale;
      unsigned s = v <= 0 ? 0u : (v >= 65535.0 ? 65535u : (unsigned)(v + 0.5));
      row[(size_t)i * 2] = (unsigned char)(s >> 8);  // PGM samples are big-endian
      row[(size_t)i * 2 + 1] = (unsigned char)(s & 0xff);
    }
    out.write(reinterpret_cast<const char*>(row.data()), (std::streamsize)row.size());
  }
  if (!out) throw error("io: short write to " + path);
}

// ---- FLD1 ----

inline void write_fld(const std::string& path, const RealGrid& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("io: cannot write " + path);
  out.write("FLD1", 4);
  detail::write_pod(out, (uint32_t)1);
  detail::write_pod(out, (uint32_t)f.nx);
  detail::write_pod(out, (uint32_t)f.ny);
  detail::write_vec(out, f.v);
  if (!out) throw error("io: short write to " + path);
}

inline void write_fld(const std::string& path, const ComplexGrid& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("io: cannot write " + path);
  out.write("FLD1", 4);
  detail::write_pod(out, (uint32_t)2);
  detail::write_pod(out, (uint32_t)f.nx);
  detail::write_pod(out, (uint32_t)f.ny);
  detail::write_vec(out, f.v);
  if (!out) throw error("io: short write to " + path);
}

inline RealGrid read_fld_real(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("io: cannot open " + path);
  if (!detail::read_magic(in, "FLD1")) throw error("io: " + path + " is not a field file");
  uint32_t dtype = 0, nx = 0, ny = 0;
  detail::read_pod(in, dtype);
  detail::read_pod(in, nx);
  detail::read_pod(in, ny);
  if (dtype != 1) throw error("io: " + path + " holds a complex field");
  RealGrid f((int)nx, (int)ny);
  if (!detail::read_vec(in, f.v, (size_t)nx * ny)) throw error("io: truncated " + path);
  return f;
}

inline ComplexGrid read_fld_complex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("io: cannot open " + path);
  if (!detail::read_magic(in, "FLD1")) throw error("io: " + path + " is not a field file");
  uint32_t dtype = 0, nx = 0, ny = 0;
  detail::read_pod(in, dtype);
  detail::read_pod(in, nx);
  detail::read_pod(in, ny);
  if (dtype != 2) throw error("io: " + path + " holds a real field");
  ComplexGrid f((int)nx, (int)ny);
  if (!detail::read_vec(in, f.v, (size_t)nx * ny)) throw error("io: truncated " + path);
  return f;
}

// ---- SPB1 eigenbasis cache ----

inline uint64_t tridiag_hash(const SymTridiag& t) {
  uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](const void* p, size_t n) {
    const unsigned char* b = (const unsigned char*)p;
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  uint64_t n = t.n();
  mix(&n, sizeof n);
  mix(t.diag.data(), t.diag.size() * sizeof(cplx));
  mix(t.off.data(), t.off.size() * sizeof(cplx));
  return h;
}

inline void save_basis(const std::string& path, const EigenDecomp& d, uint64_t hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("io: cannot write " + path);
  out.write("SPB1", 4);
  detail::write_pod(out, (uint32_t)d.n);
  detail::write_pod(out, hash);
  detail::write_vec(out, d.lambda);
  detail::write_vec(out, d.Q);
  if (!out) throw error("io: short write to " + path);
}

// a stale or absent cache is normal, so every mismatch reads as "not found"
inline bool load_basis(const std::string& path, uint64_t hash, EigenDecomp& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  if (!detail::read_magic(in, "SPB1")) return false;
  uint32_t n = 0;
  uint64_t h = 0;
  if (!detail::read_pod(in, n) || !detail::read_pod(in, h)) return false;
  if (h != hash) return false;
  EigenDecomp d;
  d.n = (int)n;
  if (!detail::read_vec(in, d.lambda, n)) return false;
  if (!detail::read_vec(in, d.Q, (size_t)n * n)) return false;
  out = std::move(d);
  return true;
}

// ---- CHK1 checkpoint ----

struct Checkpoint {
  uint64_t step = 0;
  ComplexGrid psi;
  RealGrid N, NUx, NUy;
};

inline void save_checkpoint(const std::string& path, const Checkpoint& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw error("io: cannot write " + path);
  out.write("CHK1", 4);
  detail::write_pod(out, (uint32_t)1);
  detail::write_pod(out, c.step);
  detail::write_pod(out, (uint32_t)c.psi.nx);
  detail::write_pod(out, (uint32_t)c.psi.ny);
  detail::write_vec(out, c.psi.v);
  detail::write_pod(out, (uint32_t)c.N.nx);
  detail::write_pod(out, (uint32_t)c.N.ny);
  detail::write_vec(out, c.N.v);
  detail::write_vec(out, c.NUx.v);
  detail::write_vec(out, c.NUy.v);
  if (!out) throw error("io: short write to " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error("io: cannot open " + path);
  if (!detail::read_magic(in, "CHK1")) throw error("io: " + path + " is not a checkpoint");
  uint32_t ver = 0;
  detail::read_pod(in, ver);
  if (ver != 1) throw error("io: unsupported checkpoint version in " + path);
  Checkpoint c;
  detail::read_pod(in, c.step);
  uint32_t nx = 0, ny = 0;
  detail::read_pod(in, nx);
  detail::read_pod(in, ny);
  c.psi = ComplexGrid((int)nx, (int)ny);
  if (!detail::read_vec(in, c.psi.v, (size_t)nx * ny)) throw error("io: truncated " + path);
  uint32_t cx = 0, cy = 0;
  detail::read_pod(in, cx);
  if (!detail::read_pod(in, cy)) throw error("io: truncated " + path);
  c.N = RealGrid((int)cx, (int)cy);
  c.NUx = RealGrid((int)cx, (int)cy);
  c.NUy = RealGrid((int)cx, (int)cy);
  size_t nc = (size_t)cx * cy;
  if (!detail::read_vec(in, c.N.v, nc) || !detail::read_vec(in, c.NUx.v, nc) ||
      !detail::read_vec(in, c.NUy.v, nc))
    throw error("io: truncated " + path);
  return c;
}

}  // namespace caustic
