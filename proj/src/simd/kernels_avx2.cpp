// Compiled with -mavx2 -mfma; only reached after a CPUID check.

#include <immintrin.h>

#include <cmath>

#include "neutral/simd/kernels.hpp"

namespace neutral::simd {
namespace {

// Natural log for positive normal doubles. Cephes rational approximation on
// [sqrt(1/2), sqrt(2)) with ln 2 split into a short exact head and a tail.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i half_bits = _mm256_set1_epi64x(0x3FE0000000000000LL);
  __m256d m = _mm256_castsi256_pd(
      _mm256_or_si256(_mm256_and_si256(bits, mant_mask), half_bits));

  // Biased exponent to double via the 2^52 magic constant.
  const __m256i eb = _mm256_srli_epi64(bits, 52);
  const __m256d magic = _mm256_set1_pd(4503599627370496.0);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(eb, _mm256_castpd_si256(magic))),
      magic);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1022.0));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d below = _mm256_cmp_pd(m, _mm256_set1_pd(0.70710678118654752440), _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(below, one));
  const __m256d t = _mm256_add_pd(_mm256_sub_pd(m, one), _mm256_and_pd(below, m));

  __m256d p = _mm256_set1_pd(1.01875663804580931796E-4);
  p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(4.97494994976747001425E-1));
  p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(4.70579119878881725854E0));
  p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(1.44989225341610930846E1));
  p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(1.79368678507819816313E1));
  p = _mm256_fmadd_pd(p, t, _mm256_set1_pd(7.70838733755885391666E0));

  __m256d q = _mm256_add_pd(t, _mm256_set1_pd(1.12873587189167450590E1));
  q = _mm256_fmadd_pd(q, t, _mm256_set1_pd(4.52279145837532221105E1));
  q = _mm256_fmadd_pd(q, t, _mm256_set1_pd(8.29875266912776603211E1));
  q = _mm256_fmadd_pd(q, t, _mm256_set1_pd(7.11544750618563894466E1));
  q = _mm256_fmadd_pd(q, t, _mm256_set1_pd(2.31251620126765340583E1));

  const __m256d z = _mm256_mul_pd(t, t);
  __m256d y = _mm256_mul_pd(t, _mm256_mul_pd(z, _mm256_div_pd(p, q)));
  y = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, y);
  __m256d r = _mm256_add_pd(t, y);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), r);
}

inline double hsum(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return ((lane[0] + lane[1]) + lane[2]) + lane[3];
}

double log_sum(double px, double py, SourceView src, const double* q) {
  const __m256d vx = _mm256_set1_pd(px);
  const __m256d vy = _mm256_set1_pd(py);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= src.n; j += 4) {
    const __m256d dx = _mm256_sub_pd(vx, _mm256_loadu_pd(src.x + j));
    const __m256d dy = _mm256_sub_pd(vy, _mm256_loadu_pd(src.y + j));
    const __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(q + j), log_pd(r2), acc);
  }
  double total = 0.5 * hsum(acc);
  for (; j < src.n; ++j) {
    const double dx = px - src.x[j];
    const double dy = py - src.y[j];
    total += q[j] * 0.5 * std::log(dx * dx + dy * dy);
  }
  return total;
}

void grad_sum(double px, double py, SourceView src, const double* q,
              double* gx, double* gy) {
  const __m256d vx = _mm256_set1_pd(px);
  const __m256d vy = _mm256_set1_pd(py);
  __m256d ax = _mm256_setzero_pd();
  __m256d ay = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= src.n; j += 4) {
    const __m256d dx = _mm256_sub_pd(vx, _mm256_loadu_pd(src.x + j));
    const __m256d dy = _mm256_sub_pd(vy, _mm256_loadu_pd(src.y + j));
    const __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
    const __m256d s = _mm256_div_pd(_mm256_loadu_pd(q + j), r2);
    ax = _mm256_fmadd_pd(s, dx, ax);
    ay = _mm256_fmadd_pd(s, dy, ay);
  }
  double sx = hsum(ax);
  double sy = hsum(ay);
  for (; j < src.n; ++j) {
    const double dx = px - src.x[j];
    const double dy = py - src.y[j];
    const double s = q[j] / (dx * dx + dy * dy);
    sx += s * dx;
    sy += s * dy;
  }
  *gx = sx;
  *gy = sy;
}

void dipole_row(double px, double py, double nx, double ny, SourceView src,
                const double* w, double scale, double* out) {
  const __m256d vx = _mm256_set1_pd(px);
  const __m256d vy = _mm256_set1_pd(py);
  const __m256d vnx = _mm256_set1_pd(nx);
  const __m256d vny = _mm256_set1_pd(ny);
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t j = 0;
  for (; j + 4 <= src.n; j += 4) {
    const __m256d dx = _mm256_sub_pd(vx, _mm256_loadu_pd(src.x + j));
    const __m256d dy = _mm256_sub_pd(vy, _mm256_loadu_pd(src.y + j));
    const __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
    const __m256d dot = _mm256_fmadd_pd(dx, vnx, _mm256_mul_pd(dy, vny));
    const __m256d sw = _mm256_mul_pd(vs, _mm256_loadu_pd(w + j));
    _mm256_storeu_pd(out + j, _mm256_div_pd(_mm256_mul_pd(sw, dot), r2));
  }
  for (; j < src.n; ++j) {
    const double dx = px - src.x[j];
    const double dy = py - src.y[j];
    out[j] = scale * w[j] * (dx * nx + dy * ny) / (dx * dx + dy * dy);
  }
}

double newton_sum(double px, double py, SourceView src, const double* mx,
                  const double* my) {
  const __m256d vx = _mm256_set1_pd(px);
  const __m256d vy = _mm256_set1_pd(py);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= src.n; j += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(src.x + j), vx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(src.y + j), vy);
    const __m256d r2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
    const __m256d flux = _mm256_fmadd_pd(dx, _mm256_loadu_pd(mx + j),
                                         _mm256_mul_pd(dy, _mm256_loadu_pd(my + j)));
    acc = _mm256_fmadd_pd(flux, _mm256_sub_pd(log_pd(r2), one), acc);
  }
  double total = hsum(acc);
  for (; j < src.n; ++j) {
    const double dx = src.x[j] - px;
    const double dy = src.y[j] - py;
    total += (dx * mx[j] + dy * my[j]) * (std::log(dx * dx + dy * dy) - 1.0);
  }
  return total;
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2", &log_sum, &grad_sum, &dipole_row,
                                 &newton_sum};
  return table;
}

}  // namespace neutral::simd
