#include "bciarm/eeg/synthetic.hpp"

#include <cmath>
#include <numbers>

#include "bciarm/error.hpp"

namespace bciarm::eeg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Amplitudes in microvolts.
constexpr double kPinkGain = 2.2;
constexpr double kThetaAmp = 5.0;
constexpr double kAlphaAmp = 15.0;
constexpr double kBetaAmp = 5.0;
constexpr double kHighBetaAmp = 6.0;
constexpr double kJitter = 0.10;

constexpr std::uint64_t kNoiseStreamSalt = 0x9e3779b97f4a7c15ULL;

}  // namespace

SyntheticEeg::Modulation SyntheticEeg::modulation(std::optional<Command> command) {
  Modulation m;
  if (!command) return m;
  // Every command suppresses Alpha and boosts Beta everywhere; one channel
  // carries the strongest ERD and another the strongest ERS. The (ERD, ERS)
  // channel pair is distinct for each of the 12 codes.
  const int k = code(*command) - 1;
  const std::size_t erd_ch = static_cast<std::size_t>(k % 5);
  const std::size_t ers_ch = (erd_ch + 1 + static_cast<std::size_t>(k / 5)) % kChannels;
  for (std::size_t c = 0; c < kChannels; ++c) {
    m.alpha_drop[c] = 0.15 + (c == erd_ch ? 0.55 : 0.0);
    m.beta_gain[c] = 0.20 + (c == ers_ch ? 1.30 : 0.0);
  }
  return m;
}

SyntheticEeg::SyntheticEeg(std::uint64_t seed, Condition condition)
    : condition_(condition), base_rng_(seed), noise_rng_(seed ^ kNoiseStreamSalt) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (ChannelState& ch : channels_) {
    ch.offset = -20.0 + 40.0 * unit(base_rng_);
    ch.theta_hz = 5.5 + unit(base_rng_);
    ch.alpha_hz = 9.5 + unit(base_rng_);
    ch.beta_hz = 18.0 + 4.0 * unit(base_rng_);
    ch.theta_phase = kTwoPi * unit(base_rng_);
    ch.alpha_phase = kTwoPi * unit(base_rng_);
    ch.beta_phase = kTwoPi * unit(base_rng_);
  }
  for (ChannelState& ch : channels_) {
    ch.high_beta_hz = 22.0 + 6.0 * unit(noise_rng_);
    ch.high_beta_phase = kTwoPi * unit(noise_rng_);
  }
}

void SyntheticEeg::start_block() {
  std::uniform_real_distribution<double> jitter(1.0 - kJitter, 1.0 + kJitter);
  for (ChannelState& ch : channels_) {
    ch.alpha_jitter = jitter(base_rng_);
    ch.beta_jitter = jitter(base_rng_);
  }
}

void SyntheticEeg::generate(std::optional<Command> command, std::size_t n, std::vector<EegSample>& out) {
  const Modulation mod = modulation(command);
  std::normal_distribution<double> white(0.0, 1.0);
  out.reserve(out.size() + n);
  for (std::size_t i = 0; i < n; ++i, ++index_) {
    if (index_ % kEpochSamples == 0) start_block();
    const double t = static_cast<double>(index_) / kSampleRate;
    EegSample s;
    s.t = t;
    for (std::size_t c = 0; c < kChannels; ++c) {
      ChannelState& ch = channels_[c];
      // Paul Kellet's economy pink filter
      const double w = white(base_rng_);
      ch.pink[0] = 0.99765 * ch.pink[0] + w * 0.0990460;
      ch.pink[1] = 0.96300 * ch.pink[1] + w * 0.2965164;
      ch.pink[2] = 0.57000 * ch.pink[2] + w * 1.0526913;
      const double pink = ch.pink[0] + ch.pink[1] + ch.pink[2] + w * 0.1848;

      const double alpha = kAlphaAmp * ch.alpha_jitter * (1.0 - mod.alpha_drop[c]);
      const double beta = kBetaAmp * ch.beta_jitter * (1.0 + mod.beta_gain[c]);
      double v = ch.offset + kPinkGain * pink;
      v += kThetaAmp * std::sin(kTwoPi * ch.theta_hz * t + ch.theta_phase);
      v += alpha * std::sin(kTwoPi * ch.alpha_hz * t + ch.alpha_phase);
      v += beta * std::sin(kTwoPi * ch.beta_hz * t + ch.beta_phase);
      if (condition_ == Condition::Noisy) {
        v += kHighBetaAmp * std::sin(kTwoPi * ch.high_beta_hz * t + ch.high_beta_phase);
      }
      s.ch[c] = v;
    }
    out.push_back(s);
  }
}

std::vector<EegSample> gen_synthetic(std::optional<Command> command, Condition condition,
                                     double duration_s, std::uint64_t seed) {
  if (!(duration_s >= 2.0)) throw DomainError("synthetic duration must be at least one epoch (2 s)");
  SyntheticEeg gen(seed, condition);
  std::vector<EegSample> out;
  gen.generate(command, static_cast<std::size_t>(std::llround(duration_s * kSampleRate)), out);
  return out;
}

SyntheticSession gen_session(const std::vector<SessionBlock>& blocks, Condition condition,
                             std::uint64_t seed) {
  if (blocks.empty()) throw DomainError("session needs at least one block");
  SyntheticEeg gen(seed, condition);
  SyntheticSession session;
  for (const SessionBlock& b : blocks) {
    if (!(b.duration_s > 0.0)) throw DomainError("block duration must be positive");
    const std::size_t first = gen.samples_emitted();
    const auto n = static_cast<std::size_t>(std::llround(b.duration_s * kSampleRate));
    gen.generate(b.command, n, session.samples);
    if (b.command) {
      session.labels.push_back({static_cast<double>(first) / kSampleRate,
                                static_cast<double>(first + n) / kSampleRate, *b.command});
    }
  }
  return session;
}

}  // namespace bciarm::eeg
