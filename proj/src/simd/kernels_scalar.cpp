#include <cmath>

#include "neutral/simd/kernels.hpp"

namespace neutral::simd {
namespace {

double log_sum(double px, double py, SourceView src, const double* q) {
  double acc = 0.0;
  for (std::size_t j = 0; j < src.n; ++j) {
    const double dx = px - src.x[j];
    const double dy = py - src.y[j];
    acc += q[j] * 0.5 * std::log(dx * dx + dy * dy);
  }
  return acc;
}

void grad_sum(double px, double py, SourceView src, const double* q,
              double* gx, double* gy) {
  double ax = 0.0, ay = 0.0;
  for (std::size_t j = 0; j < src.n; ++j) {
    const double dx = px - src.x[j];
    const double dy = py - src.y[j];
    const double s = q[j] / (dx * dx + dy * dy);
    ax += s * dx;
    ay += s * dy;
  }
  *gx = ax;
  *gy = ay;
}

void dipole_row(double px, double py, double nx, double ny, SourceView src,
                const double* w, double scale, double* out) {
  for (std::size_t j = 0; j < src.n; ++j) {
    const double dx = px - src.x[j];
    const double dy = py - src.y[j];
    out[j] = scale * w[j] * (dx * nx + dy * ny) / (dx * dx + dy * dy);
  }
}

double newton_sum(double px, double py, SourceView src, const double* mx,
                  const double* my) {
  double acc = 0.0;
  for (std::size_t j = 0; j < src.n; ++j) {
    const double dx = src.x[j] - px;
    const double dy = src.y[j] - py;
    const double r2 = dx * dx + dy * dy;
    acc += (dx * mx[j] + dy * my[j]) * (std::log(r2) - 1.0);
  }
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", &log_sum, &grad_sum, &dipole_row,
                                 &newton_sum};
  return table;
}

}  // namespace neutral::simd
