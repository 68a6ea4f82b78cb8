#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bciarm::eeg {

inline constexpr std::size_t kChannels = 5;
inline constexpr double kSampleRate = 128.0;
inline constexpr std::size_t kEpochSamples = 256;  // 2 s at 128 Hz

// Electrode order used everywhere: samples, features, band powers.
inline constexpr std::array<std::string_view, kChannels> kChannelNames = {"AF3", "AF4", "T7",
                                                                          "T8", "Pz"};

struct EegSample {
  double t{0.0};                       // seconds since session start
  std::array<double, kChannels> ch{};  // microvolts
};

// One 2 s analysis window, stored channel-major.
struct EegEpoch {
  double start_t{0.0};
  std::array<std::array<double, kEpochSamples>, kChannels> data{};
  bool rejected{false};

  std::span<const double, kEpochSamples> channel(std::size_t c) const { return data[c]; }
  std::span<double, kEpochSamples> channel(std::size_t c) { return data[c]; }
};

enum class Band { SubDelta, Delta, Theta, Alpha, Beta, Gamma };

std::string_view band_name(Band b);

struct BandDef {
  Band band{Band::Alpha};
  double lo_hz{0.0};
  double hi_hz{0.0};
};

// Decoding bands (preprocessing path).
inline constexpr BandDef kAlpha{Band::Alpha, 8.0, 12.0};
inline constexpr BandDef kBeta{Band::Beta, 13.0, 30.0};

// Full five-band taxonomy; half-open intervals partitioning [0.5, 64).
std::array<BandDef, 5> taxonomy_bands();

struct BandPower {
  std::vector<BandDef> bands;
  // density[b][c]: summed one-sided PSD bins of band b on channel c, in uV^2/Hz.
  std::vector<std::array<double, kChannels>> density;

  double at(std::size_t band_index, std::size_t channel) const {
    return density.at(band_index).at(channel);
  }
};

struct ArtifactConfig {
  double clip_uv{100.0};
  double max_fraction{0.10};
};

// -- session files ----------------------------------------------------------

// Reads `t,af3,af4,t7,t8,pz` records. Lines starting with '#' are comments;
// blank lines are skipped. Throws IoError naming the offending line.
std::vector<EegSample> load_session(const std::filesystem::path& path);
std::vector<EegSample> parse_session(std::string_view text);

// Writes the v1 header followed by one record per sample using the shortest
// round-trip decimal form, so load(save(x)) == x bit for bit.
void save_session(const std::filesystem::path& path, std::span<const EegSample> samples);
std::string format_session(std::span<const EegSample> samples);

// Rounds every channel value to a 16-bit code with the given LSB (default
// 0.5 uV), saturating at the int16 range.
std::vector<EegSample> quantize_16bit(std::span<const EegSample> samples, double lsb_uv = 0.5);

// -- epoching and preprocessing ---------------------------------------------

// Consecutive non-overlapping 256-sample windows; the trailing remainder is
// dropped. Fewer than 256 samples yields an empty result. Throws DomainError
// when the rate estimated from timestamps deviates from 128 Hz by more than 1%.
std::vector<EegEpoch> make_epochs(std::span<const EegSample> samples);

EegEpoch remove_dc(const EegEpoch& epoch);

// Marks the epoch rejected when more than max_fraction of any channel's
// samples exceed |clip_uv|. Sample values are never modified.
EegEpoch reject_artifacts(const EegEpoch& epoch, double clip_uv, double max_fraction = 0.10);
inline EegEpoch reject_artifacts(const EegEpoch& epoch, const ArtifactConfig& cfg) {
  return reject_artifacts(epoch, cfg.clip_uv, cfg.max_fraction);
}

// Frequency-domain masking: bins whose centre frequency lies outside the
// closed interval [lo_hz, hi_hz] are zeroed in both conjugate halves.
EegEpoch bandpass(const EegEpoch& epoch, const BandDef& band);
std::vector<double> bandpass(std::span<const double> x, const BandDef& band,
                             double fs = kSampleRate);

// One-sided Hann-windowed periodogram of a single channel in uV^2/Hz.
// Entry k is the density of bin k (k = 0 .. N/2), bin width fs/N.
std::vector<double> power_spectrum(std::span<const double> x, double fs = kSampleRate);

// Sums bin densities with lo_hz <= f < hi_hz for each band. Throws
// DomainError for rejected epochs.
BandPower spectral_power(const EegEpoch& epoch, std::span<const BandDef> bands);
BandPower spectral_power(const EegEpoch& epoch);  // Alpha and Beta decoding bands

// Taxonomy lookup with half-open intervals; below 0.5 Hz returns SubDelta.
Band classify_band(double freq_hz);

}  // namespace bciarm::eeg
