#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace caustic {

using cplx = std::complex<double>;
using std::size_t;

struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

// Dense 2D storage, column-major: column m is the contiguous x-line u_m.
template <class T>
struct Grid2 {
  int nx = 0, ny = 0;
  std::vector<T> v;

  Grid2() = default;
  Grid2(int nx_, int ny_, T fill = T{}) : nx(nx_), ny(ny_), v((size_t)nx_ * ny_, fill) {}

  T& operator()(int i, int m) { return v[(size_t)m * nx + i]; }
  const T& operator()(int i, int m) const { return v[(size_t)m * nx + i]; }

  T* col(int m) { return v.data() + (size_t)m * nx; }
  const T* col(int m) const { return v.data() + (size_t)m * nx; }

  size_t size() const { return v.size(); }
  void fill(T x) { std::fill(v.begin(), v.end(), x); }
};

using ComplexGrid = Grid2<cplx>;
using RealGrid = Grid2<double>;

// Static partition of [0, n) into nthreads contiguous ranges; fn(lo, hi) runs
// on each. The partition depends only on (n, nthreads), never on data, so any
// scheme whose per-range work is order-fixed stays deterministic.
template <class Fn>
void parallel_ranges(int nthreads, long n, Fn&& fn) {
  if (nthreads <= 1 || n < 2) {
    fn(0L, n);
    return;
  }
  int nt = (int)std::min<long>(nthreads, n);
  std::vector<std::thread> pool;
  pool.reserve(nt - 1);
  long chunk = n / nt, rem = n % nt, lo = 0;
  for (int t = 0; t < nt; ++t) {
    long hi = lo + chunk + (t < rem ? 1 : 0);
    if (t == nt - 1)
      fn(lo, hi);
    else
      pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    lo = hi;
  }
  for (auto& th : pool) th.join();
}

inline double sq(double x) { return x * x; }

}  // namespace caustic
