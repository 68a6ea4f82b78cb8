#include "bciarm/features/stats.hpp"

#include <algorithm>
#include <cmath>

#include "bciarm/error.hpp"

namespace bciarm::features {

double energy(std::span<const double> d) {
  double e = 0.0;
  for (double v : d) e += v * v;
  return e;
}

MomentStats stats(std::span<const double> d) {
  if (d.empty()) throw DomainError("statistics of an empty coefficient vector");
  const double n = static_cast<double>(d.size());
  MomentStats s;
  const auto [lo, hi] = std::minmax_element(d.begin(), d.end());
  s.min = *lo;
  s.max = *hi;
  if (s.min == s.max) {
    s.mean = s.min;
    return s;
  }

  double sum = 0.0;
  for (double v : d) sum += v;
  s.mean = sum / n;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : d) {
    const double dev = v - s.mean;
    const double dev2 = dev * dev;
    m2 += dev2;
    m3 += dev2 * dev;
    m4 += dev2 * dev2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.variance = m2;
  if (m2 > 0.0) {
    s.skewness = m3 / std::pow(m2, 1.5);
    s.kurtosis = m4 / (m2 * m2);
  }
  // mean can drift outside [min, max] by an ulp for near-constant input
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

}  // namespace bciarm::features
