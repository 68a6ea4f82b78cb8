#include "bciarm/pipeline/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "bciarm/error.hpp"
#include "bciarm/text.hpp"

namespace bciarm::pipeline {

namespace {

using json = nlohmann::json;

constexpr std::string_view kEventsHeader = "# bci-arm events v1";

constexpr std::array<std::pair<GateDecision, std::string_view>, 4> kGateNames = {{
    {GateDecision::Passed, "passed"},
    {GateDecision::BelowThreshold, "below_threshold"},
    {GateDecision::Cooldown, "cooldown"},
    {GateDecision::RejectedEpoch, "rejected_epoch"},
}};

}  // namespace

// -- gate ---------------------------------------------------------------------

std::string_view gate_name(GateDecision g) {
  for (const auto& [value, label] : kGateNames) {
    if (value == g) return label;
  }
  return "?";
}

std::optional<GateDecision> parse_gate(std::string_view s) {
  for (const auto& [value, label] : kGateNames) {
    if (label == s) return value;
  }
  return std::nullopt;
}

std::string_view gate_mode_name(GateMode m) { return m == GateMode::Confidence ? "confidence" : "band_power"; }

std::optional<GateMode> parse_gate_mode(std::string_view s) {
  if (s == "confidence") return GateMode::Confidence;
  if (s == "band_power") return GateMode::BandPower;
  return std::nullopt;
}

CommandGate::CommandGate(SafetyConfig cfg) : cfg_(cfg) { set_threshold(cfg.confidence_threshold); }

void CommandGate::set_threshold(double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw DomainError("threshold must lie in [0, 1]");
  cfg_.confidence_threshold = value;
}

GateDecision CommandGate::decide(bool rejected, double level) {
  const double threshold = cfg_.mode == GateMode::Confidence ? cfg_.confidence_threshold : cfg_.power_threshold;
  return decide(rejected, level, threshold);
}

GateDecision CommandGate::decide(bool rejected, double level, double threshold) {
  const bool cooling = cooldown_left_ > 0;
  if (cooling) --cooldown_left_;
  if (rejected) return GateDecision::RejectedEpoch;
  if (cooling) return GateDecision::Cooldown;
  if (!(level >= threshold)) return GateDecision::BelowThreshold;
  cooldown_left_ = cfg_.cooldown_epochs;
  return GateDecision::Passed;
}

// -- decoding -----------------------------------------------------------------

double BandPowers::mean_beta() const {
  double sum = 0.0;
  for (double v : beta) sum += v;
  return sum / static_cast<double>(beta.size());
}

PreparedEpoch prepare_epoch(const eeg::EegEpoch& raw, const DecodeConfig& cfg) {
  PreparedEpoch out;
  const eeg::EegEpoch clean = eeg::reject_artifacts(eeg::remove_dc(raw), cfg.artifacts);
  if (clean.rejected) {
    out.rejected = true;
    return out;
  }
  const std::array<eeg::BandDef, 2> bands = {cfg.alpha, cfg.beta};
  const eeg::BandPower bp = eeg::spectral_power(clean, bands);
  BandPowers p;
  for (std::size_t c = 0; c < eeg::kChannels; ++c) {
    p.alpha[c] = bp.at(0, c);
    p.beta[c] = bp.at(1, c);
  }
  out.power = p;

  const eeg::EegEpoch alpha = eeg::bandpass(clean, cfg.alpha);
  const eeg::EegEpoch beta = eeg::bandpass(clean, cfg.beta);
  eeg::EegEpoch filtered = clean;
  for (std::size_t c = 0; c < eeg::kChannels; ++c) {
    for (std::size_t i = 0; i < eeg::kEpochSamples; ++i) filtered.data[c][i] = alpha.data[c][i] + beta.data[c][i];
  }
  out.features = features::extract_features(filtered);
  return out;
}

// -- events -------------------------------------------------------------------

bool operator==(const PipelineEvent& a, const PipelineEvent& b) {
  const bool feats_equal = a.features.has_value() == b.features.has_value() &&
                           (!a.features || a.features->values == b.features->values);
  return a.epoch_index == b.epoch_index && a.start_t == b.start_t && a.band_power == b.band_power &&
         feats_equal && a.predicted == b.predicted && a.confidence == b.confidence && a.gate == b.gate &&
         a.command == b.command;
}

namespace {

json event_to_json(const PipelineEvent& e) {
  json j;
  j["epoch"] = e.epoch_index;
  j["t"] = e.start_t;
  if (e.band_power) {
    j["band_power"] = {{"alpha", e.band_power->alpha}, {"beta", e.band_power->beta}};
  } else {
    j["band_power"] = nullptr;
  }
  if (e.features) {
    j["features"] = e.features->values;
  } else {
    j["features"] = nullptr;
  }
  j["predicted"] = e.predicted ? json(name(*e.predicted)) : json(nullptr);
  j["confidence"] = e.confidence;
  j["gate"] = gate_name(e.gate);
  if (e.command) {
    j["command"] = {{"label", name(e.command->label)},
                    {"joint", arm::joint_name(e.command->joint)},
                    {"direction", arm::direction_name(e.command->direction)}};
  } else {
    j["command"] = nullptr;
  }
  return j;
}

Command label_field(const json& j) {
  const auto c = parse_command(j.get<std::string>());
  if (!c) throw IoError("unknown label '" + j.get<std::string>() + "'");
  return *c;
}

PipelineEvent event_from_json(const json& j) {
  PipelineEvent e;
  e.epoch_index = j.at("epoch").get<std::uint64_t>();
  e.start_t = j.at("t").get<double>();
  if (!j.at("band_power").is_null()) {
    BandPowers p;
    p.alpha = j.at("band_power").at("alpha").get<std::array<double, eeg::kChannels>>();
    p.beta = j.at("band_power").at("beta").get<std::array<double, eeg::kChannels>>();
    e.band_power = p;
  }
  if (!j.at("features").is_null()) {
    features::FeatureVector fv;
    fv.values = j.at("features").get<std::array<double, features::kFeatureDims>>();
    e.features = fv;
  }
  if (!j.at("predicted").is_null()) e.predicted = label_field(j.at("predicted"));
  e.confidence = j.at("confidence").get<double>();
  const auto gate = parse_gate(j.at("gate").get<std::string>());
  if (!gate) throw IoError("unknown gate decision");
  e.gate = *gate;
  if (!j.at("command").is_null()) {
    const json& c = j.at("command");
    IssuedCommand ic;
    ic.label = label_field(c.at("label"));
    const auto joint = arm::parse_joint(c.at("joint").get<std::string>());
    if (!joint) throw IoError("unknown joint");
    ic.joint = *joint;
    const auto dir = c.at("direction").get<std::string>();
    if (dir != "CW" && dir != "CCW") throw IoError("unknown direction");
    ic.direction = dir == "CW" ? arm::Direction::CW : arm::Direction::CCW;
    e.command = ic;
  }
  return e;
}

}  // namespace

std::string format_events(std::span<const PipelineEvent> events) {
  std::string out(kEventsHeader);
  out += '\n';
  for (const PipelineEvent& e : events) {
    out += event_to_json(e).dump();
    out += '\n';
  }
  return out;
}

std::vector<PipelineEvent> parse_events(std::string_view body) {
  const auto lines = text::split(body, '\n');
  if (lines.empty() || text::trim(lines.front()) != kEventsHeader) {
    throw IoError("missing event log header '" + std::string(kEventsHeader) + "'");
  }
  std::vector<PipelineEvent> events;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = text::trim(lines[i]);
    if (line.empty()) continue;
    try {
      events.push_back(event_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw IoError("malformed event at line " + std::to_string(i + 1) + ": " + e.what());
    } catch (const IoError& e) {
      throw IoError(std::string(e.what()) + " at line " + std::to_string(i + 1));
    }
  }
  return events;
}

void record_events(std::span<const PipelineEvent> events, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write event log: " + path.string());
  out << format_events(events);
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<PipelineEvent> load_events(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("event log not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_events(buf.str());
}

// -- sources ------------------------------------------------------------------

ReplaySource::ReplaySource(std::vector<eeg::EegEpoch> epochs) : epochs_(std::move(epochs)) {}

ReplaySource ReplaySource::from_samples(std::span<const eeg::EegSample> samples) {
  return ReplaySource(eeg::make_epochs(samples));
}

std::optional<eeg::EegEpoch> ReplaySource::next() {
  if (pos_ >= epochs_.size()) return std::nullopt;
  return epochs_[pos_++];
}

SyntheticSource::SyntheticSource(std::uint64_t seed, eeg::Condition condition,
                                 std::vector<eeg::SessionBlock> schedule, bool loop)
    : gen_(seed, condition), schedule_(std::move(schedule)), loop_(loop) {
  for (const auto& b : schedule_) {
    if (!(b.duration_s >= 2.0)) throw DomainError("synthetic blocks must last at least one epoch");
  }
}

std::optional<eeg::EegEpoch> SyntheticSource::next() {
  while (true) {
    if (block_ >= schedule_.size()) {
      if (!loop_ || schedule_.empty()) return std::nullopt;
      block_ = 0;
    }
    const auto& b = schedule_[block_];
    const auto epochs_in_block =
        static_cast<std::size_t>(std::llround(b.duration_s * eeg::kSampleRate)) / eeg::kEpochSamples;
    if (emitted_in_block_ < epochs_in_block) break;
    ++block_;
    emitted_in_block_ = 0;
  }
  const auto& b = schedule_[block_];
  std::vector<eeg::EegSample> samples;
  const double t0 = static_cast<double>(gen_.samples_emitted()) / eeg::kSampleRate;
  gen_.generate(b.command, eeg::kEpochSamples, samples);
  ++emitted_in_block_;
  current_ = b.command;
  eeg::EegEpoch epoch;
  epoch.start_t = t0;
  for (std::size_t i = 0; i < eeg::kEpochSamples; ++i) {
    for (std::size_t c = 0; c < eeg::kChannels; ++c) epoch.data[c][i] = samples[i].ch[c];
  }
  return epoch;
}

// -- control loop -------------------------------------------------------------

ControlLoop::ControlLoop(std::shared_ptr<const features::CommandModel> model, SafetyConfig safety,
                         DecodeConfig decode, arm::CommandBinding binding, arm::ArmState arm)
    : model_(std::move(model)),
      decode_(decode),
      binding_(std::move(binding)),
      arm_(std::move(arm)),
      gate_(safety) {}

std::optional<IssuedCommand> ControlLoop::issue(Command label, double confidence) {
  const arm::Binding& b = binding_.at(label);
  arm_ = arm::apply_command(arm_, binding_, label);
  arm_.last_command = arm::LastCommand{label, confidence};
  return IssuedCommand{label, b.joint, b.direction};
}

PipelineEvent ControlLoop::on_epoch(const eeg::EegEpoch& epoch) {
  if (!has_model()) throw DomainError("no trained model loaded");
  PipelineEvent ev;
  ev.epoch_index = epoch_index_++;
  ev.start_t = epoch.start_t;

  const PreparedEpoch prepared = prepare_epoch(epoch, decode_);
  if (prepared.rejected) {
    ev.gate = gate_.decide(true, 0.0);
  } else {
    ev.band_power = prepared.power;
    ev.features = prepared.features;
    const features::Prediction p = features::classify(*model_, *prepared.features);
    ev.predicted = p.label;
    ev.confidence = p.confidence;
    const double level =
        gate_.config().mode == GateMode::Confidence ? p.confidence : prepared.power->mean_beta();
    ev.gate = gate_.decide(false, level);
    if (ev.gate == GateDecision::Passed) ev.command = issue(p.label, p.confidence);
  }
  last_power_ = ev.band_power;
  last_gate_ = ev.gate;
  return ev;
}

GateDecision ControlLoop::on_manual(Command label, double strength) {
  binding_.at(label);  // unbound labels fail before touching the gate
  // A manual command has no signal behind it, so its strength is always
  // compared with the confidence threshold.
  const GateDecision g = gate_.decide(false, strength, gate_.config().confidence_threshold);
  if (g == GateDecision::Passed) {
    issue(label, strength);
  } else {
    arm_.last_command = arm::LastCommand{label, strength};
  }
  last_gate_ = g;
  return g;
}

void ControlLoop::tick() { arm_ = arm::tick(arm_); }

PipelineResult run_pipeline(EpochSource& source, const features::CommandModel& model, const SafetyConfig& safety,
                            arm::ArmState arm, const arm::CommandBinding& binding, const DecodeConfig& decode,
                            std::optional<std::size_t> max_epochs) {
  if (!model.trained()) throw DomainError("model is not trained");
  ControlLoop loop(std::make_shared<const features::CommandModel>(model), safety, decode, binding, std::move(arm));
  PipelineResult result;
  while (!max_epochs || result.events.size() < *max_epochs) {
    auto epoch = source.next();
    if (!epoch) break;
    result.events.push_back(loop.on_epoch(*epoch));
    for (std::uint64_t t = 0; t < kTicksPerEpoch; ++t) loop.tick();
  }
  result.arm = loop.arm();
  return result;
}

// -- scripts ------------------------------------------------------------------

std::vector<ScriptStep> parse_steps(std::string_view body) {
  std::vector<ScriptStep> steps;
  for (std::string_view item : text::split(body, ',')) {
    item = text::trim(item);
    if (item.empty()) continue;
    ScriptStep step;
    std::string_view label = item;
    if (const auto star = item.find('*'); star != std::string_view::npos) {
      label = text::trim(item.substr(0, star));
      const auto repeat = text::parse_int(item.substr(star + 1));
      if (!repeat || *repeat < 0) throw DomainError("bad repeat count in '" + std::string(item) + "'");
      step.repeat = static_cast<std::uint32_t>(*repeat);
    }
    const auto c = parse_command(label);
    if (!c) throw DomainError("unknown label '" + std::string(label) + "' in script");
    step.label = *c;
    steps.push_back(step);
  }
  if (steps.empty()) throw DomainError("script has no steps");
  return steps;
}

std::string format_steps(std::span<const ScriptStep> steps) {
  std::string out;
  for (const ScriptStep& s : steps) {
    if (!out.empty()) out += ", ";
    out += name(s.label);
    if (s.repeat != 1) out += "*" + std::to_string(s.repeat);
  }
  return out;
}

Script pick_and_place_script() {
  Script s;
  s.name = "pick_and_place";
  s.steps = parse_steps("Pull*2, Drop*2, Smile, Lift*2, Push*2, MoveRight, Pull*2, Drop*2, ClenchTeeth");
  // Tool position for the default configuration: base at +90, shoulder and
  // elbow at -60 (kinematic), wrist level.
  s.target = Eigen::Vector3d(0.0, -207.53520777580994, 154.46152422706632);
  return s;
}

ScriptRunner::ScriptRunner(const Script& script, const arm::CommandBinding& binding) {
  if (script.steps.empty()) throw DomainError("script '" + script.name + "' has no steps");
  for (const ScriptStep& s : script.steps) {
    binding.at(s.label);
    for (std::uint32_t r = 0; r < s.repeat; ++r) queue_.push_back(s.label);
  }
}

bool ScriptRunner::maybe_apply(arm::ArmState& arm, const arm::CommandBinding& binding) {
  if (done() || !arm::settled(arm)) return false;
  arm = arm::apply_command(arm, binding, queue_[next_++]);
  return true;
}

std::vector<arm::ArmState> run_script(const Script& script, arm::ArmState arm, const arm::CommandBinding& binding) {
  ScriptRunner runner(script, binding);
  std::vector<arm::ArmState> trajectory{arm};
  // Finish any motion already in progress first.
  while (!arm::settled(arm)) {
    arm = arm::tick(arm);
    trajectory.push_back(arm);
  }
  while (runner.maybe_apply(arm, binding)) {
    while (!arm::settled(arm)) {
      arm = arm::tick(arm);
      trajectory.push_back(arm);
    }
  }
  return trajectory;
}

// -- training -----------------------------------------------------------------

features::CommandModel train_session(std::span<const eeg::EegSample> samples,
                                     std::span<const eeg::LabelInterval> labels, const DecodeConfig& decode) {
  if (labels.empty()) throw DomainError("session has no labelled intervals");
  std::set<int> codes;
  for (const auto& l : labels) codes.insert(code(l.label));
  if (codes.size() < 2) throw DomainError("label track must cover at least two labels");

  constexpr double kEps = 1e-6;
  const double epoch_len = static_cast<double>(eeg::kEpochSamples) / eeg::kSampleRate;
  std::vector<features::LabeledFeatures> training;
  for (const eeg::EegEpoch& epoch : eeg::make_epochs(samples)) {
    const double t0 = epoch.start_t;
    const double t1 = t0 + epoch_len;
    const auto hit = std::find_if(labels.begin(), labels.end(), [&](const eeg::LabelInterval& l) {
      return t0 >= l.start_t - kEps && t1 <= l.end_t + kEps;
    });
    if (hit == labels.end()) continue;
    const PreparedEpoch prepared = prepare_epoch(epoch, decode);
    if (prepared.rejected) continue;
    training.emplace_back(*prepared.features, hit->label);
  }
  std::vector<Command> required;
  for (int c : codes) required.push_back(*command_from_code(c));
  return features::train(std::span<const features::LabeledFeatures>(training), required);
}

}  // namespace bciarm::pipeline
