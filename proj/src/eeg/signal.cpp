#include "bciarm/eeg/signal.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "bciarm/error.hpp"
#include "bciarm/text.hpp"

namespace bciarm::eeg {

namespace {

constexpr std::string_view kSessionHeader = "# bci-arm session v1 fs=128";

std::string line_error(std::size_t line, std::string_view what) {
  return std::string(what) + " at line " + std::to_string(line);
}

double bin_frequency(std::size_t k, std::size_t n, double fs) {
  const std::size_t folded = std::min(k, n - k);
  return static_cast<double>(folded) * fs / static_cast<double>(n);
}

}  // namespace

std::string_view band_name(Band b) {
  switch (b) {
    case Band::SubDelta: return "SubDelta";
    case Band::Delta: return "Delta";
    case Band::Theta: return "Theta";
    case Band::Alpha: return "Alpha";
    case Band::Beta: return "Beta";
    case Band::Gamma: return "Gamma";
  }
  return "?";
}

std::array<BandDef, 5> taxonomy_bands() {
  return {BandDef{Band::Delta, 0.5, 4.0}, BandDef{Band::Theta, 4.0, 8.0},
          BandDef{Band::Alpha, 8.0, 12.0}, BandDef{Band::Beta, 12.0, 35.0},
          BandDef{Band::Gamma, 35.0, kSampleRate / 2.0}};
}

Band classify_band(double freq_hz) {
  if (!(freq_hz > 0.0)) throw DomainError("frequency must be positive");
  if (freq_hz < 0.5) return Band::SubDelta;
  for (const BandDef& b : taxonomy_bands()) {
    if (freq_hz >= b.lo_hz && freq_hz < b.hi_hz) return b.band;
  }
  return Band::Gamma;
}

// -- session files ----------------------------------------------------------

std::vector<EegSample> parse_session(std::string_view text) {
  std::vector<EegSample> out;
  std::size_t line_no = 0;
  for (std::string_view raw : text::split(text, '\n')) {
    ++line_no;
    const std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;

    const auto fields = text::split(line, ',');
    if (fields.size() != kChannels + 1) {
      throw IoError(line_error(line_no, "expected " + std::to_string(kChannels) + " channels, got " +
                                            std::to_string(fields.size() - 1)));
    }
    EegSample s;
    auto t = text::parse_double(fields[0]);
    if (!t || !std::isfinite(*t) || *t < 0.0) throw IoError(line_error(line_no, "bad timestamp"));
    s.t = *t;
    for (std::size_t c = 0; c < kChannels; ++c) {
      auto v = text::parse_double(fields[c + 1]);
      if (!v || !std::isfinite(*v)) {
        throw IoError(line_error(line_no, "bad value for channel " + std::string(kChannelNames[c])));
      }
      s.ch[c] = *v;
    }
    if (!out.empty() && !(s.t > out.back().t)) {
      throw IoError(line_error(line_no, "non-monotonic timestamp"));
    }
    out.push_back(s);
  }
  return out;
}

std::vector<EegSample> load_session(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("session not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_session(buf.str());
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string format_session(std::span<const EegSample> samples) {
  std::string out(kSessionHeader);
  out += '\n';
  for (const EegSample& s : samples) {
    out += text::format_double(s.t);
    for (double v : s.ch) {
      out += ',';
      out += text::format_double(v);
    }
    out += '\n';
  }
  return out;
}

void save_session(const std::filesystem::path& path, std::span<const EegSample> samples) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write session: " + path.string());
  out << format_session(samples);
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<EegSample> quantize_16bit(std::span<const EegSample> samples, double lsb_uv) {
  if (!(lsb_uv > 0.0)) throw DomainError("quantization step must be positive");
  std::vector<EegSample> out(samples.begin(), samples.end());
  for (EegSample& s : out) {
    for (double& v : s.ch) {
      const double code = std::clamp(std::round(v / lsb_uv), -32768.0, 32767.0);
      v = code * lsb_uv;
    }
  }
  return out;
}

// -- epoching and preprocessing ---------------------------------------------

std::vector<EegEpoch> make_epochs(std::span<const EegSample> samples) {
  std::vector<EegEpoch> epochs;
  if (samples.size() < kEpochSamples) return epochs;

  const double span_t = samples.back().t - samples.front().t;
  const double rate = static_cast<double>(samples.size() - 1) / span_t;
  if (!(std::abs(rate - kSampleRate) <= 0.01 * kSampleRate)) {
    throw DomainError("sample rate " + text::format_double(rate) + " Hz deviates from 128 Hz by more than 1%");
  }

  const std::size_t count = samples.size() / kEpochSamples;
  epochs.resize(count);
  for (std::size_t e = 0; e < count; ++e) {
    EegEpoch& ep = epochs[e];
    const std::size_t base = e * kEpochSamples;
    ep.start_t = samples[base].t;
    for (std::size_t i = 0; i < kEpochSamples; ++i) {
      for (std::size_t c = 0; c < kChannels; ++c) ep.data[c][i] = samples[base + i].ch[c];
    }
  }
  return epochs;
}

EegEpoch remove_dc(const EegEpoch& epoch) {
  EegEpoch out = epoch;
  for (auto& ch : out.data) {
    double mean = 0.0;
    for (double v : ch) mean += v;
    mean /= static_cast<double>(ch.size());
    for (double& v : ch) v -= mean;
  }
  return out;
}

EegEpoch reject_artifacts(const EegEpoch& epoch, double clip_uv, double max_fraction) {
  if (!(clip_uv > 0.0)) throw DomainError("clip threshold must be positive");
  EegEpoch out = epoch;
  out.rejected = false;
  const double limit = max_fraction * static_cast<double>(kEpochSamples);
  for (const auto& ch : epoch.data) {
    const auto over = std::count_if(ch.begin(), ch.end(), [&](double v) { return std::abs(v) > clip_uv; });
    if (static_cast<double>(over) > limit) {
      out.rejected = true;
      break;
    }
  }
  return out;
}

std::vector<double> bandpass(std::span<const double> x, const BandDef& band, double fs) {
  if (!(band.lo_hz >= 0.0 && band.lo_hz < band.hi_hz && band.hi_hz < fs / 2.0)) {
    throw DomainError("band " + text::format_double(band.lo_hz) + "-" + text::format_double(band.hi_hz) +
                      " Hz is outside [0, Nyquist)");
  }
  const std::size_t n = x.size();
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, in);
  for (std::size_t k = 0; k < n; ++k) {
    const double f = bin_frequency(k, n, fs);
    if (f < band.lo_hz || f > band.hi_hz) spectrum[k] = 0.0;
  }
  std::vector<double> out;
  fft.inv(out, spectrum);
  return out;
}

EegEpoch bandpass(const EegEpoch& epoch, const BandDef& band) {
  EegEpoch out = epoch;
  for (std::size_t c = 0; c < kChannels; ++c) {
    const auto filtered = bandpass(epoch.channel(c), band);
    std::copy(filtered.begin(), filtered.end(), out.data[c].begin());
  }
  return out;
}

std::vector<double> power_spectrum(std::span<const double> x, double fs) {
  const std::size_t n = x.size();
  if (n < 2) throw DomainError("spectrum needs at least two samples");
  std::vector<double> windowed(n);
  double w2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // periodic Hann
    const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n)));
    windowed[i] = w * x[i];
    w2 += w * w;
  }
  std::vector<std::complex<double>> spectrum;
  Eigen::FFT<double> fft;
  fft.fwd(spectrum, windowed);

  const std::size_t half = n / 2;
  const double scale = 1.0 / (fs * w2);
  std::vector<double> density(half + 1);
  for (std::size_t k = 0; k <= half; ++k) {
    const bool edge = (k == 0) || (k == half && n % 2 == 0);
    density[k] = std::norm(spectrum[k]) * scale * (edge ? 1.0 : 2.0);
  }
  return density;
}

BandPower spectral_power(const EegEpoch& epoch, std::span<const BandDef> bands) {
  if (epoch.rejected) throw DomainError("epoch rejected");
  BandPower out;
  out.bands.assign(bands.begin(), bands.end());
  out.density.assign(bands.size(), {});
  const double df = kSampleRate / static_cast<double>(kEpochSamples);
  for (std::size_t c = 0; c < kChannels; ++c) {
    const auto psd = power_spectrum(epoch.channel(c));
    for (std::size_t b = 0; b < bands.size(); ++b) {
      double sum = 0.0;
      for (std::size_t k = 0; k < psd.size(); ++k) {
        const double f = static_cast<double>(k) * df;
        if (f >= bands[b].lo_hz && f < bands[b].hi_hz) sum += psd[k];
      }
      out.density[b][c] = sum;
    }
  }
  return out;
}

BandPower spectral_power(const EegEpoch& epoch) {
  const std::array<BandDef, 2> bands = {kAlpha, kBeta};
  return spectral_power(epoch, bands);
}

}  // namespace bciarm::eeg
