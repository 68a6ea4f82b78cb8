#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "bciarm/eeg/labels.hpp"
#include "bciarm/eeg/signal.hpp"
#include "bciarm/features/command.hpp"

namespace bciarm::eeg {

enum class Condition { Quiet, Noisy };

// Seeded EEG-like stream: 1/f background, theta/alpha/beta oscillators and
// per-command ERD/ERS modulation. During a command the Alpha amplitude is
// scaled by (1 - d) and the Beta amplitude by (1 + g), with channel weights
// that differ per command. The noisy condition adds a high-Beta component on
// every channel, drawn from a separate random stream so the quiet part of a
// noisy stream is identical to the quiet stream for the same seed.
class SyntheticEeg {
 public:
  SyntheticEeg(std::uint64_t seed, Condition condition);

  // Appends n samples generated under `command` (nullopt = rest).
  void generate(std::optional<Command> command, std::size_t n, std::vector<EegSample>& out);

  std::size_t samples_emitted() const { return index_; }

  struct Modulation {
    std::array<double, kChannels> alpha_drop{};  // d per channel
    std::array<double, kChannels> beta_gain{};   // g per channel
  };
  static Modulation modulation(std::optional<Command> command);

 private:
  struct ChannelState {
    double pink[3]{};
    double offset{0.0};
    double theta_hz{6.0}, alpha_hz{10.0}, beta_hz{20.0}, high_beta_hz{25.0};
    double theta_phase{0.0}, alpha_phase{0.0}, beta_phase{0.0}, high_beta_phase{0.0};
    double alpha_jitter{1.0}, beta_jitter{1.0};
  };

  void start_block();

  Condition condition_;
  std::mt19937_64 base_rng_;
  std::mt19937_64 noise_rng_;
  std::array<ChannelState, kChannels> channels_{};
  std::size_t index_{0};
};

// Whole stream of one command (or rest). duration_s must cover at least one
// epoch (2 s); throws DomainError otherwise.
std::vector<EegSample> gen_synthetic(std::optional<Command> command, Condition condition,
                                     double duration_s, std::uint64_t seed);

// Labelled block of a multi-command session.
struct SessionBlock {
  std::optional<Command> command;
  double duration_s{0.0};
};

struct SyntheticSession {
  std::vector<EegSample> samples;
  std::vector<LabelInterval> labels;  // one per non-rest block
};

SyntheticSession gen_session(const std::vector<SessionBlock>& blocks, Condition condition,
                             std::uint64_t seed);

}  // namespace bciarm::eeg
