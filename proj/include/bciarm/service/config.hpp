#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bciarm/arm/arm.hpp"
#include "bciarm/eeg/synthetic.hpp"
#include "bciarm/kinematics/kinematics.hpp"
#include "bciarm/pipeline/pipeline.hpp"

namespace bciarm::service {

inline constexpr int kConfigVersion = 1;

struct ServiceSettings {
  std::uint16_t port{8765};
  std::string model_path;  // empty: manual mode only
  std::uint64_t seed{1};   // synthetic mode stream
  eeg::Condition condition{eeg::Condition::Quiet};
  double block_seconds{6.0};  // synthetic mode: seconds per label block
};

struct Config {
  pipeline::DecodeConfig decode;
  arm::ArmConfig arm;
  pipeline::SafetyConfig safety;
  std::map<std::string, pipeline::Script> scripts;
  ServiceSettings service;

  arm::CommandBinding binding() const;
  const pipeline::Script& script(const std::string& name) const;  // DomainError if absent
};

// Every default in one place; includes the bundled pick_and_place script.
Config default_config();

struct LoadedConfig {
  Config config;
  std::vector<std::string> warnings;  // unknown sections/keys, missing version
};

// INI text, see config/default.ini for every key. Keys absent from the file
// keep their defaults; unknown keys are ignored and reported as warnings;
// out-of-range values throw DomainError naming the key.
LoadedConfig parse_config(std::string_view text);
LoadedConfig load_config(const std::filesystem::path& path);

}  // namespace bciarm::service
