#include "bciarm/service/engine.hpp"

#include <cmath>

#include "bciarm/error.hpp"
#include "json.hpp"

namespace bciarm::service {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

struct Engine::Message {
  const json& body;

  const json* find(const char* key) const {
    const auto it = body.find(key);
    return it == body.end() ? nullptr : &*it;
  }

  std::string string(const char* key) const {
    const json* v = find(key);
    if (!v) throw DomainError(std::string("missing field '") + key + "'");
    if (!v->is_string()) throw DomainError(std::string("field '") + key + "' must be a string");
    return v->get<std::string>();
  }

  double number(const char* key, double lo, double hi) const {
    const json* v = find(key);
    if (!v) throw DomainError(std::string("missing field '") + key + "'");
    return checked(key, *v, lo, hi);
  }

  double number_or(const char* key, double fallback, double lo, double hi) const {
    const json* v = find(key);
    return v ? checked(key, *v, lo, hi) : fallback;
  }

  static double checked(const char* key, const json& v, double lo, double hi) {
    if (!v.is_number()) throw DomainError(std::string("field '") + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d) || d < lo || d > hi) {
      throw DomainError(std::string("field '") + key + "' out of range [" + json(lo).dump() + ", " +
                        json(hi).dump() + "]");
    }
    return d;
  }
};

namespace {

arm::ArmState initial_arm(const Config& cfg) { return arm::make_arm(cfg.arm); }

}  // namespace

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Manual: return "manual";
    case Mode::Synthetic: return "synthetic";
    case Mode::Replay: return "replay";
  }
  return "manual";
}

std::string error_reply(std::uint64_t seq_ref, std::string_view message) {
  ojson msg = ojson::object();
  msg["type"] = "error";
  msg["seq_ref"] = seq_ref;
  msg["message"] = message;
  // The message may echo client bytes that are not valid UTF-8.
  return msg.dump(-1, ' ', false, ojson::error_handler_t::replace);
}

Engine::Engine(Config cfg, std::shared_ptr<const features::CommandModel> model)
    : cfg_(std::move(cfg)),
      model_(std::move(model)),
      loop_(model_, cfg_.safety, cfg_.decode, cfg_.binding(), initial_arm(cfg_)) {}

std::optional<std::string> Engine::handle(std::string_view frame, std::uint64_t fallback_ref) {
  const json body = json::parse(frame, nullptr, false);
  std::uint64_t ref = fallback_ref;
  if (body.is_object()) {
    const auto it = body.find("seq");
    if (it != body.end() && it->is_number_unsigned()) ref = it->get<std::uint64_t>();
  }
  try {
    if (body.is_discarded()) throw DomainError("malformed JSON");
    if (!body.is_object()) throw DomainError("message must be a JSON object");
    const Message msg{body};
    const std::string type = msg.string("type");
    if (type == "command") {
      on_command(msg);
    } else if (type == "set_threshold") {
      on_set_threshold(msg);
    } else if (type == "set_limits") {
      on_set_limits(msg);
    } else if (type == "run_script") {
      on_run_script(msg);
    } else if (type == "set_mode") {
      on_set_mode(msg);
    } else {
      throw DomainError("unknown message type '" + type + "'");
    }
  } catch (const DomainError& e) {
    return error_reply(ref, e.what());
  } catch (const IoError& e) {
    return error_reply(ref, e.what());
  }
  return std::nullopt;
}

void Engine::on_command(const Message& m) {
  const std::string label_text = m.string("name");
  const auto label = parse_command(label_text);
  if (!label) throw DomainError("unknown label '" + label_text + "'");
  if (m.find("source")) {
    const std::string src_text = m.string("source");
    const auto src = parse_source(src_text);
    if (!src) throw DomainError("unknown source '" + src_text + "'");
    if (*src != source_of(*label)) {
      throw DomainError(std::string(name(*label)) + " is a " + std::string(name(source_of(*label))) + " command");
    }
  }
  const double strength = m.number_or("strength", 1.0, 0.0, 1.0);
  last_ = Decision{*label, strength, loop_.on_manual(*label, strength)};
}

void Engine::on_set_threshold(const Message& m) { loop_.gate().set_threshold(m.number("value", 0.0, 1.0)); }

void Engine::on_set_limits(const Message& m) {
  const std::string joint_text = m.string("joint");
  const auto joint = arm::parse_joint(joint_text);
  if (!joint) throw DomainError("unknown joint '" + joint_text + "'");
  const double lo = m.number("min", 0.0, 180.0);
  const double hi = m.number("max", 0.0, 180.0);
  loop_.set_arm(arm::set_limits(loop_.arm(), *joint, lo, hi));
}

void Engine::on_run_script(const Message& m) {
  const std::string script_name = m.string("name");
  if (runner_ && !runner_->done()) throw DomainError("a script is already running");
  runner_.emplace(cfg_.script(script_name), loop_.binding());
}

void Engine::on_set_mode(const Message& m) {
  const std::string value = m.string("value");
  if (value == "manual") {
    source_.reset();
    mode_ = Mode::Manual;
    return;
  }
  if (value != "synthetic" && value != "replay") throw DomainError("unknown mode '" + value + "'");
  if (!loop_.has_model()) throw DomainError("mode '" + value + "' needs a trained model");

  std::unique_ptr<pipeline::EpochSource> next;
  if (value == "synthetic") {
    std::vector<eeg::SessionBlock> schedule;
    for (const auto& r : model_->references) schedule.push_back({r.label, cfg_.service.block_seconds});
    next = std::make_unique<pipeline::SyntheticSource>(cfg_.service.seed, cfg_.service.condition, schedule, true);
  } else {
    if (!m.find("session")) throw DomainError("replay needs a 'session' path");
    const auto samples = eeg::load_session(m.string("session"));
    auto replay = pipeline::ReplaySource::from_samples(samples);
    next = std::make_unique<pipeline::ReplaySource>(std::move(replay));
  }
  source_ = std::move(next);
  ticks_since_epoch_ = 0;
  mode_ = value == "synthetic" ? Mode::Synthetic : Mode::Replay;
}

std::string Engine::advance() {
  if (runner_) {
    arm::ArmState a = loop_.arm();
    if (runner_->maybe_apply(a, loop_.binding())) loop_.set_arm(std::move(a));
    if (runner_->done()) runner_.reset();
  }
  if (source_ && ++ticks_since_epoch_ >= pipeline::kTicksPerEpoch) {
    ticks_since_epoch_ = 0;
    if (auto epoch = source_->next()) {
      const pipeline::PipelineEvent ev = loop_.on_epoch(*epoch);
      last_ = Decision{ev.predicted, ev.confidence, ev.gate};
    } else {
      source_.reset();
      mode_ = Mode::Manual;
    }
  }
  loop_.tick();
  ++seq_;
  return snapshot();
}

bool Engine::busy() const { return !arm::settled(loop_.arm()) || runner_.has_value() || source_ != nullptr; }

std::string Engine::snapshot() const {
  const arm::ArmState& a = loop_.arm();
  ojson joints = ojson::array();
  for (const arm::ServoJoint& j : a.joints) joints.push_back(j.angle);

  ojson power = nullptr;
  if (const auto& p = loop_.last_power()) {
    power = ojson::object();
    for (std::size_t c = 0; c < eeg::kChannels; ++c) {
      ojson band = ojson::object();
      band["alpha"] = p->alpha[c];
      band["beta"] = p->beta[c];
      power[std::string(eeg::kChannelNames[c])] = std::move(band);
    }
  }

  ojson last = nullptr;
  if (last_) {
    last = ojson::object();
    last["label"] = last_->label ? ojson(name(*last_->label)) : ojson(nullptr);
    last["confidence"] = last_->confidence;
    last["gate"] = pipeline::gate_name(last_->gate);
  }

  ojson msg = ojson::object();
  msg["type"] = "state";
  msg["seq"] = seq_;
  msg["tick"] = a.tick_count;
  msg["joints"] = std::move(joints);
  ojson pose = ojson::object();
  pose["x"] = a.pose.position.x();
  pose["y"] = a.pose.position.y();
  pose["z"] = a.pose.position.z();
  msg["pose"] = std::move(pose);
  msg["band_power"] = std::move(power);
  msg["last"] = std::move(last);
  return msg.dump();
}

}  // namespace bciarm::service
