#include <cmath>
#include <stdexcept>

#include "synthpass/kernels.hpp"

namespace synthpass::kernels {

int gaussian_radius(double sigma) { return sigma > 0.0 ? static_cast<int>(std::ceil(3.0 * sigma)) : 0; }

std::vector<float> gaussian_taps(double sigma) {
  const int r = gaussian_radius(sigma);
  if (r == 0) return {1.0f};
  std::vector<double> w(static_cast<std::size_t>(2 * r + 1));
  double total = 0.0;
  for (int k = -r; k <= r; ++k) {
    const double v = std::exp(-0.5 * (k * k) / (sigma * sigma));
    w[static_cast<std::size_t>(k + r)] = v;
    total += v;
  }
  std::vector<float> taps;
  taps.reserve(w.size());
  for (double v : w) taps.push_back(static_cast<float>(v / total));
  return taps;
}

double LaplacianMoments::variance() const {
  if (count == 0) return 0.0;
  const long double n = static_cast<long double>(count);
  const long double mean = static_cast<long double>(sum) / n;
  const long double var = static_cast<long double>(sum_sq) / n - mean * mean;
  return var > 0 ? static_cast<double>(var) : 0.0;
}

Affine Affine::inverse() const {
  const double det = a * d - b * c;
  if (det == 0.0) throw std::domain_error("singular affine transform");
  Affine inv;
  inv.a = d / det;
  inv.b = -b / det;
  inv.c = -c / det;
  inv.d = a / det;
  inv.tx = -(inv.a * tx + inv.b * ty);
  inv.ty = -(inv.c * tx + inv.d * ty);
  return inv;
}

}  // namespace synthpass::kernels
