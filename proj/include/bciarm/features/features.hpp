#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "bciarm/eeg/signal.hpp"
#include "bciarm/features/wavelet.hpp"

namespace bciarm::features {

enum class Stat : std::size_t { Energy, Mean, Variance, Skewness, Kurtosis, Max, Min };
inline constexpr std::size_t kStatCount = 7;

// Alpha is read from D3 (8-16 Hz), Beta from D2 (16-32 Hz).
enum class FeatureBand : std::size_t { Alpha, Beta };
inline constexpr std::size_t kFeatureBands = 2;
inline constexpr std::size_t kFeatureDims = eeg::kChannels * kFeatureBands * kStatCount;  // 70

// Layout, stable across versions:
//   index = (channel * 2 + band) * 7 + stat
// with channels in AF3, AF4, T7, T8, Pz order, bands Alpha then Beta, and
// stats Energy, Mean, Variance, Skewness, Kurtosis, Max, Min.
constexpr std::size_t feature_index(std::size_t channel, FeatureBand band, Stat stat) {
  return (channel * kFeatureBands + static_cast<std::size_t>(band)) * kStatCount +
         static_cast<std::size_t>(stat);
}

// e.g. "AF3.alpha.energy"
std::string feature_name(std::size_t index);

// Detail level feeding each band: D3 for Alpha, D2 for Beta.
constexpr std::size_t detail_level(FeatureBand band) { return band == FeatureBand::Alpha ? 2 : 1; }

struct FeatureVector {
  std::array<double, kFeatureDims> values{};

  double at(std::size_t channel, FeatureBand band, Stat stat) const {
    return values[feature_index(channel, band, stat)];
  }
};

FeatureVector extract_features(const WaveletCoeffs& coeffs);
FeatureVector extract_features(const eeg::EegEpoch& epoch);

}  // namespace bciarm::features
