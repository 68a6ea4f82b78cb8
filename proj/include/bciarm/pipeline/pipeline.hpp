#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "bciarm/arm/arm.hpp"
#include "bciarm/eeg/labels.hpp"
#include "bciarm/eeg/signal.hpp"
#include "bciarm/eeg/synthetic.hpp"
#include "bciarm/features/classifier.hpp"

namespace bciarm::pipeline {

// -- safety gate --------------------------------------------------------------

// Confidence gates on classifier confidence; BandPower gates on the mean
// Beta band power across channels (uV^2/Hz).
enum class GateMode { Confidence, BandPower };

struct SafetyConfig {
  double confidence_threshold{0.5};
  std::uint32_t cooldown_epochs{1};
  GateMode mode{GateMode::Confidence};
  double power_threshold{0.0};
};

enum class GateDecision { Passed, BelowThreshold, Cooldown, RejectedEpoch };

std::string_view gate_name(GateDecision g);
std::optional<GateDecision> parse_gate(std::string_view s);
std::string_view gate_mode_name(GateMode m);
std::optional<GateMode> parse_gate_mode(std::string_view s);

// Decision order: rejected epoch, then cooldown, then threshold. Every call
// counts as one epoch for the cooldown; a pass arms `cooldown_epochs`
// further calls that cannot pass.
class CommandGate {
 public:
  explicit CommandGate(SafetyConfig cfg = {});

  // Threshold chosen by the configured mode.
  GateDecision decide(bool rejected, double level);
  GateDecision decide(bool rejected, double level, double threshold);

  const SafetyConfig& config() const { return cfg_; }
  void set_threshold(double value);  // confidence threshold, [0, 1]
  std::uint32_t cooldown_remaining() const { return cooldown_left_; }

 private:
  SafetyConfig cfg_;
  std::uint32_t cooldown_left_{0};
};

// -- decoding -----------------------------------------------------------------

struct DecodeConfig {
  eeg::BandDef alpha{eeg::kAlpha};
  eeg::BandDef beta{eeg::kBeta};
  eeg::ArtifactConfig artifacts{};
};

// Per-channel Alpha/Beta densities of the DC-removed epoch.
struct BandPowers {
  std::array<double, eeg::kChannels> alpha{};
  std::array<double, eeg::kChannels> beta{};

  double mean_beta() const;
  bool operator==(const BandPowers&) const = default;
};

// remove_dc -> reject_artifacts; when kept: band powers, then
// bandpass(Alpha) + bandpass(Beta) -> features.
struct PreparedEpoch {
  bool rejected{false};
  std::optional<BandPowers> power;
  std::optional<features::FeatureVector> features;
};

PreparedEpoch prepare_epoch(const eeg::EegEpoch& raw, const DecodeConfig& cfg);

// -- events -------------------------------------------------------------------

struct IssuedCommand {
  Command label{Command::Push};
  arm::Joint joint{arm::Joint::Base};
  arm::Direction direction{arm::Direction::CW};

  bool operator==(const IssuedCommand&) const = default;
};

struct PipelineEvent {
  std::uint64_t epoch_index{0};
  double start_t{0.0};
  std::optional<BandPowers> band_power;
  std::optional<features::FeatureVector> features;
  std::optional<Command> predicted;
  double confidence{0.0};
  GateDecision gate{GateDecision::RejectedEpoch};
  std::optional<IssuedCommand> command;  // present exactly when gate == Passed
};

bool operator==(const PipelineEvent& a, const PipelineEvent& b);

// Header line `# bci-arm events v1`, then one JSON object per event.
std::string format_events(std::span<const PipelineEvent> events);
std::vector<PipelineEvent> parse_events(std::string_view text);
void record_events(std::span<const PipelineEvent> events, const std::filesystem::path& path);
std::vector<PipelineEvent> load_events(const std::filesystem::path& path);

// -- epoch sources ------------------------------------------------------------

class EpochSource {
 public:
  virtual ~EpochSource() = default;
  // nullopt once exhausted.
  virtual std::optional<eeg::EegEpoch> next() = 0;
};

class ReplaySource final : public EpochSource {
 public:
  explicit ReplaySource(std::vector<eeg::EegEpoch> epochs);
  static ReplaySource from_samples(std::span<const eeg::EegSample> samples);
  std::optional<eeg::EegEpoch> next() override;

 private:
  std::vector<eeg::EegEpoch> epochs_;
  std::size_t pos_{0};
};

// Streams the generator epoch by epoch following a block schedule; with
// `loop` the schedule repeats forever.
class SyntheticSource final : public EpochSource {
 public:
  SyntheticSource(std::uint64_t seed, eeg::Condition condition, std::vector<eeg::SessionBlock> schedule,
                  bool loop = false);
  std::optional<eeg::EegEpoch> next() override;

  // Label of the block the most recent epoch was drawn from.
  std::optional<Command> current_label() const { return current_; }

 private:
  eeg::SyntheticEeg gen_;
  std::vector<eeg::SessionBlock> schedule_;
  bool loop_;
  std::size_t block_{0};
  std::size_t emitted_in_block_{0};
  std::optional<Command> current_;
};

// -- control loop -------------------------------------------------------------

// Ticks elapsing per 2 s epoch at 20 ms per tick.
inline constexpr std::uint64_t kTicksPerEpoch = 100;

// Owns the arm state and the gate; the single writer of both. Used by
// run_pipeline and by the live service so both paths gate identically.
class ControlLoop {
 public:
  ControlLoop(std::shared_ptr<const features::CommandModel> model, SafetyConfig safety, DecodeConfig decode,
              arm::CommandBinding binding, arm::ArmState arm);

  // Decode one epoch, gate it and apply the command on a pass. Throws
  // DomainError when no trained model is loaded.
  PipelineEvent on_epoch(const eeg::EegEpoch& epoch);

  // Operator-injected command: `strength` stands in for confidence.
  GateDecision on_manual(Command label, double strength);

  void tick();

  const arm::ArmState& arm() const { return arm_; }
  void set_arm(arm::ArmState s) { arm_ = std::move(s); }
  CommandGate& gate() { return gate_; }
  const CommandGate& gate() const { return gate_; }
  const arm::CommandBinding& binding() const { return binding_; }
  const std::optional<BandPowers>& last_power() const { return last_power_; }
  std::optional<GateDecision> last_gate() const { return last_gate_; }
  bool has_model() const { return model_ && model_->trained(); }
  void set_model(std::shared_ptr<const features::CommandModel> m) { model_ = std::move(m); }

 private:
  std::optional<IssuedCommand> issue(Command label, double confidence);

  std::shared_ptr<const features::CommandModel> model_;
  DecodeConfig decode_;
  arm::CommandBinding binding_;
  arm::ArmState arm_;
  CommandGate gate_;
  std::uint64_t epoch_index_{0};
  std::optional<BandPowers> last_power_;
  std::optional<GateDecision> last_gate_;
};

struct PipelineResult {
  std::vector<PipelineEvent> events;
  arm::ArmState arm;
};

// Drains the source: one event per epoch, kTicksPerEpoch arm ticks after
// each. `max_epochs` bounds unbounded sources.
PipelineResult run_pipeline(EpochSource& source, const features::CommandModel& model, const SafetyConfig& safety,
                            arm::ArmState arm, const arm::CommandBinding& binding, const DecodeConfig& decode = {},
                            std::optional<std::size_t> max_epochs = std::nullopt);

// -- scripts ------------------------------------------------------------------

struct ScriptStep {
  Command label{Command::Push};
  std::uint32_t repeat{1};
};

struct Script {
  std::string name;
  std::vector<ScriptStep> steps;
  std::optional<Eigen::Vector3d> target;  // expected final tool position, mm
};

// "Pull*2, Drop*2, Smile" -> steps; a bare label repeats once.
std::vector<ScriptStep> parse_steps(std::string_view text);
std::string format_steps(std::span<const ScriptStep> steps);

// The bundled pick-and-place: lower into the pick zone, close the gripper,
// lift, swing the base, lower into the drop zone, open.
Script pick_and_place_script();

// Incremental executor: one activation at a time, each after the arm settles.
class ScriptRunner {
 public:
  ScriptRunner() = default;
  // Validates every label against the binding before any motion.
  ScriptRunner(const Script& script, const arm::CommandBinding& binding);

  bool done() const { return next_ >= queue_.size(); }
  // Applies the next activation when the arm has settled; returns whether
  // one was applied.
  bool maybe_apply(arm::ArmState& arm, const arm::CommandBinding& binding);

 private:
  std::vector<Command> queue_;
  std::size_t next_{0};
};

// Tick-by-tick trajectory, starting with the initial state.
std::vector<arm::ArmState> run_script(const Script& script, arm::ArmState arm, const arm::CommandBinding& binding);

// -- training -----------------------------------------------------------------

// Epochs lying entirely inside a labelled interval take that label; rejected
// and unlabelled epochs are discarded. Throws DomainError for an empty label
// track, fewer than two labels, or any label left without epochs.
features::CommandModel train_session(std::span<const eeg::EegSample> samples,
                                     std::span<const eeg::LabelInterval> labels, const DecodeConfig& decode = {});

}  // namespace bciarm::pipeline
