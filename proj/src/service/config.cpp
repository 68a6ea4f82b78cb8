#include "bciarm/service/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bciarm/error.hpp"
#include "bciarm/text.hpp"

namespace bciarm::service {

namespace {

namespace pt = boost::property_tree;

constexpr std::array<std::string_view, arm::kServoCount> kJointSections = {
    "joint.base", "joint.shoulder", "joint.elbow", "joint.wrist_rot", "joint.wrist_trans", "joint.gripper"};

class Reader {
 public:
  Reader(const pt::ptree& section, std::string name, std::vector<std::string>& warnings)
      : section_(section), name_(std::move(name)), warnings_(warnings) {}

  ~Reader() {
    for (const auto& [key, _] : section_) {
      if (!known_.contains(key)) warnings_.push_back("unknown key '" + key + "' in [" + name_ + "]");
    }
  }

  void number(const std::string& key, double& out, const std::function<bool(double)>& valid,
              std::string_view rule) {
    known_.insert(key);
    const auto raw = section_.get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!raw) return;
    const auto v = text::parse_double(*raw);
    if (!v || !std::isfinite(*v) || !valid(*v)) fail(key, *raw, rule);
    out = *v;
  }

  template <typename Int>
  void integer(const std::string& key, Int& out, long long lo, long long hi) {
    known_.insert(key);
    const auto raw = section_.get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!raw) return;
    const auto v = text::parse_int(*raw);
    if (!v || *v < lo || *v > hi) {
      fail(key, *raw, "an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    out = static_cast<Int>(*v);
  }

  std::optional<std::string> string(const std::string& key) {
    known_.insert(key);
    const auto raw = section_.get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!raw) return std::nullopt;
    return std::string(text::trim(*raw));
  }

  [[noreturn]] void fail(const std::string& key, const std::string& raw, std::string_view rule) const {
    throw DomainError("config [" + name_ + "] " + key + " = '" + raw + "': expected " + std::string(rule));
  }

 private:
  const pt::ptree& section_;
  std::string name_;
  std::vector<std::string>& warnings_;
  std::set<std::string> known_;
};

bool positive(double v) { return v > 0.0; }
bool non_negative(double v) { return v >= 0.0; }
bool servo_range(double v) { return v >= 0.0 && v <= 180.0; }
bool unit_range(double v) { return v >= 0.0 && v <= 1.0; }

void read_band(Reader& r, const std::string& key, eeg::BandDef& band) {
  const auto raw = r.string(key);
  if (!raw) return;
  std::istringstream in(*raw);
  std::string lo_s, hi_s, extra;
  in >> lo_s >> hi_s >> extra;
  const auto lo = text::parse_double(lo_s);
  const auto hi = text::parse_double(hi_s);
  if (!lo || !hi || !extra.empty() || !(*lo > 0.0 && *lo < *hi && *hi < eeg::kSampleRate / 2.0)) {
    r.fail(key, *raw, "'lo hi' with 0 < lo < hi < 64");
  }
  band.lo_hz = *lo;
  band.hi_hz = *hi;
}

}  // namespace

arm::CommandBinding Config::binding() const {
  std::array<double, arm::kServoCount> steps{};
  for (std::size_t i = 0; i < arm::kServoCount; ++i) steps[i] = arm.joints[i].step_deg;
  return arm::default_bindings(steps);
}

const pipeline::Script& Config::script(const std::string& name) const {
  const auto it = scripts.find(name);
  if (it == scripts.end()) throw DomainError("unknown script '" + name + "'");
  return it->second;
}

Config default_config() {
  Config c;
  for (auto& j : c.arm.joints) j = arm::JointConfig{0.0, 180.0, 3.0, 90.0, 90.0, 30.0};
  c.arm.joints[static_cast<std::size_t>(arm::Joint::Base)].step_deg = 90.0;
  const pipeline::Script pnp = pipeline::pick_and_place_script();
  c.scripts.emplace(pnp.name, pnp);
  return c;
}

LoadedConfig parse_config(std::string_view body) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(body)};
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw IoError(std::string("config: ") + e.what());
  }

  LoadedConfig loaded{default_config(), {}};
  Config& cfg = loaded.config;
  auto& warnings = loaded.warnings;

  bool saw_version = false;
  for (const auto& [key, node] : tree) {
    if (!node.empty()) continue;  // a section
    if (key == "version") {
      saw_version = true;
      const auto v = text::parse_int(node.data());
      if (!v || *v != kConfigVersion) {
        throw IoError("config: unsupported version '" + node.data() + "' (expected " +
                      std::to_string(kConfigVersion) + ")");
      }
    } else {
      warnings.push_back("unknown top-level key '" + key + "'");
    }
  }
  if (!saw_version) warnings.push_back("missing 'version'; assuming " + std::to_string(kConfigVersion));

  for (const auto& [section, node] : tree) {
    if (node.empty()) continue;
    if (section == "bands") {
      Reader r(node, section, warnings);
      read_band(r, "alpha", cfg.decode.alpha);
      read_band(r, "beta", cfg.decode.beta);
    } else if (section == "artifacts") {
      Reader r(node, section, warnings);
      r.number("clip_uv", cfg.decode.artifacts.clip_uv, positive, "a positive number");
      r.number("max_fraction", cfg.decode.artifacts.max_fraction, unit_range, "a fraction in [0, 1]");
    } else if (section == "kinematics") {
      Reader r(node, section, warnings);
      r.number("l1", cfg.arm.links.l1, positive, "a positive length in mm");
      r.number("l2", cfg.arm.links.l2, non_negative, "a non-negative length in mm");
      r.number("l3", cfg.arm.links.l3, non_negative, "a non-negative length in mm");
      r.number("l4", cfg.arm.links.l4, non_negative, "a non-negative length in mm");
    } else if (section.starts_with("joint.")) {
      const auto it = std::find(kJointSections.begin(), kJointSections.end(), section);
      if (it == kJointSections.end()) {
        warnings.push_back("unknown section [" + section + "]");
        continue;
      }
      arm::JointConfig& j = cfg.arm.joints[static_cast<std::size_t>(it - kJointSections.begin())];
      Reader r(node, section, warnings);
      r.number("min", j.min_deg, servo_range, "degrees in [0, 180]");
      r.number("max", j.max_deg, servo_range, "degrees in [0, 180]");
      r.number("initial", j.initial_deg, servo_range, "degrees in [0, 180]");
      r.number("zero", j.zero_deg, servo_range, "degrees in [0, 180]");
      r.number("step", j.step_deg, positive, "a positive step in degrees");
      r.number("slew", j.max_step_deg, positive, "positive degrees per tick");
    } else if (section == "safety") {
      Reader r(node, section, warnings);
      r.number("threshold", cfg.safety.confidence_threshold, unit_range, "a value in [0, 1]");
      r.integer("cooldown", cfg.safety.cooldown_epochs, 0, 1000000);
      r.number("power_threshold", cfg.safety.power_threshold, non_negative, "a non-negative power");
      if (auto mode = r.string("gate_mode")) {
        const auto m = pipeline::parse_gate_mode(*mode);
        if (!m) r.fail("gate_mode", *mode, "confidence or band_power");
        cfg.safety.mode = *m;
      }
    } else if (section == "service") {
      Reader r(node, section, warnings);
      r.integer("port", cfg.service.port, 0, 65535);
      r.integer("seed", cfg.service.seed, 0, std::numeric_limits<long long>::max());
      r.number("block_seconds", cfg.service.block_seconds, [](double v) { return v >= 2.0; },
               "at least 2 seconds");
      if (auto m = r.string("model")) cfg.service.model_path = *m;
      if (auto cond = r.string("condition")) {
        if (*cond == "quiet") {
          cfg.service.condition = eeg::Condition::Quiet;
        } else if (*cond == "noisy") {
          cfg.service.condition = eeg::Condition::Noisy;
        } else {
          r.fail("condition", *cond, "quiet or noisy");
        }
      }
    } else if (section.starts_with("script.")) {
      pipeline::Script script;
      script.name = section.substr(7);
      if (script.name.empty()) throw DomainError("config: script section needs a name");
      Reader r(node, section, warnings);
      const auto steps = r.string("steps");
      if (!steps) throw DomainError("config [" + section + "] needs 'steps'");
      script.steps = pipeline::parse_steps(*steps);
      if (auto target = r.string("target")) {
        std::istringstream in(*target);
        std::string xs, ys, zs, extra;
        in >> xs >> ys >> zs >> extra;
        const auto x = text::parse_double(xs), y = text::parse_double(ys), z = text::parse_double(zs);
        if (!x || !y || !z || !extra.empty()) r.fail("target", *target, "'x y z' in mm");
        script.target = Eigen::Vector3d(*x, *y, *z);
      }
      cfg.scripts[script.name] = script;
    } else {
      warnings.push_back("unknown section [" + section + "]");
    }
  }

  // Cross-field checks.
  for (std::size_t i = 0; i < arm::kServoCount; ++i) {
    const arm::JointConfig& j = cfg.arm.joints[i];
    const std::string where = "config [" + std::string(kJointSections[i]) + "]";
    if (!(j.min_deg < j.max_deg)) throw DomainError(where + ": min must be below max");
    if (j.initial_deg < j.min_deg || j.initial_deg > j.max_deg) {
      throw DomainError(where + ": initial angle outside [min, max]");
    }
  }
  if (cfg.decode.alpha.hi_hz > cfg.decode.beta.lo_hz) {
    warnings.push_back("alpha and beta bands overlap");
  }
  return loaded;
}

LoadedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("config not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace bciarm::service
