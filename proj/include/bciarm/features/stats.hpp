#pragma once

#include <span>

namespace bciarm::features {

// Sum of squared coefficients of one detail vector; 0 for an empty vector.
double energy(std::span<const double> d);

struct MomentStats {
  double mean{0.0};
  double variance{0.0};  // population, 1/N
  double skewness{0.0};  // 0 when variance is 0
  double kurtosis{0.0};  // non-excess (Gaussian = 3); 0 when variance is 0
  double max{0.0};
  double min{0.0};
};

// Throws DomainError on an empty vector.
MomentStats stats(std::span<const double> d);

}  // namespace bciarm::features
