#include "bciarm/features/features.hpp"

#include "bciarm/features/stats.hpp"

namespace bciarm::features {

std::string feature_name(std::size_t index) {
  static constexpr std::array<const char*, kStatCount> kStats = {
      "energy", "mean", "variance", "skewness", "kurtosis", "max", "min"};
  const std::size_t stat = index % kStatCount;
  const std::size_t band = (index / kStatCount) % kFeatureBands;
  const std::size_t channel = index / (kStatCount * kFeatureBands);
  return std::string(eeg::kChannelNames.at(channel)) + (band == 0 ? ".alpha." : ".beta.") + kStats[stat];
}

FeatureVector extract_features(const WaveletCoeffs& coeffs) {
  FeatureVector fv;
  for (std::size_t c = 0; c < eeg::kChannels; ++c) {
    for (FeatureBand band : {FeatureBand::Alpha, FeatureBand::Beta}) {
      const auto& d = coeffs.channels[c].details[detail_level(band)];
      const MomentStats s = stats(d);
      fv.values[feature_index(c, band, Stat::Energy)] = energy(d);
      fv.values[feature_index(c, band, Stat::Mean)] = s.mean;
      fv.values[feature_index(c, band, Stat::Variance)] = s.variance;
      fv.values[feature_index(c, band, Stat::Skewness)] = s.skewness;
      fv.values[feature_index(c, band, Stat::Kurtosis)] = s.kurtosis;
      fv.values[feature_index(c, band, Stat::Max)] = s.max;
      fv.values[feature_index(c, band, Stat::Min)] = s.min;
    }
  }
  return fv;
}

FeatureVector extract_features(const eeg::EegEpoch& epoch) { return extract_features(dwt4(epoch)); }

}  // namespace bciarm::features
