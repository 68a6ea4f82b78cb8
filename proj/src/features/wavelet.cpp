#include "bciarm/features/wavelet.hpp"

#include "bciarm/error.hpp"

namespace bciarm::features {

namespace {

// Obtained by spectral factorization of the N=4 Daubechies polynomial,
// minimum-phase root selection.
constexpr std::array<double, 8> kLow = {
    0.2303778133088965008632912,  0.714846570552915647089922,  0.6308807679298589078817163,
    -0.02798376941685985421141375, -0.1870348117190930840795707, 0.03084138183556076362721936,
    0.03288301166688519973540751, -0.01059740178506903210488321};

constexpr std::array<double, 8> make_high() {
  std::array<double, 8> g{};
  for (std::size_t j = 0; j < 8; ++j) g[j] = (j % 2 == 0 ? 1.0 : -1.0) * kLow[7 - j];
  return g;
}

constexpr std::array<double, 8> kHigh = make_high();

}  // namespace

const std::array<double, 8>& db4_lowpass() { return kLow; }

void dwt_step(std::span<const double> x, std::vector<double>& approx, std::vector<double>& detail) {
  const std::size_t n = x.size();
  if (n < kLow.size() || n % 2 != 0) throw DomainError("dwt stage needs an even length >= 8");
  const std::size_t half = n / 2;
  approx.assign(half, 0.0);
  detail.assign(half, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    double a = 0.0, d = 0.0;
    for (std::size_t j = 0; j < kLow.size(); ++j) {
      const double v = x[(2 * i + j) % n];
      a += kLow[j] * v;
      d += kHigh[j] * v;
    }
    approx[i] = a;
    detail[i] = d;
  }
}

std::vector<double> idwt_step(std::span<const double> approx, std::span<const double> detail) {
  if (approx.size() != detail.size()) throw DomainError("approximation/detail size mismatch");
  const std::size_t n = approx.size() * 2;
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < approx.size(); ++i) {
    for (std::size_t j = 0; j < kLow.size(); ++j) {
      x[(2 * i + j) % n] += kLow[j] * approx[i] + kHigh[j] * detail[i];
    }
  }
  return x;
}

ChannelCoeffs dwt4(std::span<const double> x) {
  if (x.size() < 128 || x.size() % 16 != 0) {
    throw DomainError("4-level decomposition needs a length divisible by 16 and >= 128");
  }
  ChannelCoeffs out;
  std::vector<double> current(x.begin(), x.end());
  for (std::size_t level = 0; level < kLevels; ++level) {
    std::vector<double> approx;
    dwt_step(current, approx, out.details[level]);
    current = std::move(approx);
  }
  out.approx = std::move(current);
  return out;
}

std::vector<double> idwt4(const ChannelCoeffs& c) {
  std::vector<double> current = c.approx;
  for (std::size_t level = kLevels; level-- > 0;) current = idwt_step(current, c.details[level]);
  return current;
}

WaveletCoeffs dwt4(const eeg::EegEpoch& epoch) {
  if (epoch.rejected) throw DomainError("epoch rejected");
  WaveletCoeffs out;
  for (std::size_t c = 0; c < eeg::kChannels; ++c) out.channels[c] = dwt4(epoch.channel(c));
  return out;
}

}  // namespace bciarm::features
