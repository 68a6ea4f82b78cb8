#pragma once

#include <array>
#include <span>
#include <vector>

#include "bciarm/eeg/signal.hpp"

namespace bciarm::features {

inline constexpr std::size_t kLevels = 4;

// Four-level periodic Daubechies-4 (8-tap, four vanishing moments)
// decomposition of one channel. details[0] is D1 (finest, 32-64 Hz at
// 128 Hz sampling) through details[3] = D4 (4-8 Hz); approx is A4 (0-4 Hz).
// For a 256-sample input the sizes are 128, 64, 32, 16 and 16.
struct ChannelCoeffs {
  std::array<std::vector<double>, kLevels> details;
  std::vector<double> approx;
};

struct WaveletCoeffs {
  std::array<ChannelCoeffs, eeg::kChannels> channels;
};

// Scaling (low-pass) filter taps; the wavelet filter is the alternating flip.
const std::array<double, 8>& db4_lowpass();

// One analysis stage on a periodic signal of even length >= 8.
void dwt_step(std::span<const double> x, std::vector<double>& approx, std::vector<double>& detail);
// Exact inverse of dwt_step (the filter bank is orthogonal).
std::vector<double> idwt_step(std::span<const double> approx, std::span<const double> detail);

// Input length must be divisible by 16 and at least 128.
ChannelCoeffs dwt4(std::span<const double> x);
std::vector<double> idwt4(const ChannelCoeffs& c);

// Throws DomainError for rejected epochs.
WaveletCoeffs dwt4(const eeg::EegEpoch& epoch);

}  // namespace bciarm::features
