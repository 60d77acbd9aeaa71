#pragma once

// Inner loops of every dense layer-potential evaluation. Each kernel exists
// as a scalar reference and (on x86-64) an AVX2+FMA variant; the active
// table is picked once at startup from CPUID, overridable through the
// NEUTRAL_LAB_SIMD environment variable ("scalar" or "avx2").
//
// Sources are passed as structure-of-arrays. Summation order within a
// variant is fixed, so results are bit-reproducible per variant; the two
// variants agree to rounding (see tests/test_kernels.cpp).

#include <cstddef>
#include <string_view>

namespace neutral::simd {

struct SourceView {
  const double* x;
  const double* y;
  std::size_t n;
};

struct KernelTable {
  std::string_view name;

  // sum_j q[j] * ln|p - y_j|
  double (*log_sum)(double px, double py, SourceView src, const double* q);

  // sum_j q[j] * (p - y_j) / |p - y_j|^2, written to (gx, gy)
  void (*grad_sum)(double px, double py, SourceView src, const double* q,
                   double* gx, double* gy);

  // out[j] = scale * w[j] * <p - y_j, n_p> / |p - y_j|^2
  // Rows of K* and of the normal-derivative coupling blocks. A source
  // coinciding with p yields a non-finite entry; callers patch it.
  void (*dipole_row)(double px, double py, double nx, double ny,
                     SourceView src, const double* w, double scale,
                     double* out);

  // sum_j <y_j - p, m_j> * (ln|p - y_j|^2 - 1), with m_j = (mx[j], my[j])
  // Boundary flux form of the logarithmic area integral.
  double (*newton_sum)(double px, double py, SourceView src, const double* mx,
                       const double* my);
};

const KernelTable& scalar_kernels();

// nullptr when not compiled in or not supported by the running CPU.
const KernelTable* avx2_kernels();

// Table used by the library.
const KernelTable& active_kernels();

}  // namespace neutral::simd
