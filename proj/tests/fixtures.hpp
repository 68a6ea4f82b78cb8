#pragma once

#include <memory>
#include <vector>

#include "bciarm/eeg/synthetic.hpp"
#include "bciarm/features/classifier.hpp"
#include "bciarm/pipeline/pipeline.hpp"

namespace fixtures {

inline constexpr std::array<bciarm::Command, 4> kFourMental = {bciarm::Command::Push, bciarm::Command::Pull,
                                                               bciarm::Command::Lift, bciarm::Command::Drop};

// Four mental-command blocks of `block_s` seconds, repeated `rounds` times.
inline bciarm::eeg::SyntheticSession four_class_session(std::uint64_t seed,
                                                        bciarm::eeg::Condition cond = bciarm::eeg::Condition::Quiet,
                                                        double block_s = 20.0, int rounds = 1) {
  std::vector<bciarm::eeg::SessionBlock> blocks;
  for (int r = 0; r < rounds; ++r) {
    for (bciarm::Command c : kFourMental) blocks.push_back({c, block_s});
  }
  return bciarm::eeg::gen_session(blocks, cond, seed);
}

inline std::shared_ptr<const bciarm::features::CommandModel> four_class_model(
    std::uint64_t seed = 100, bciarm::eeg::Condition cond = bciarm::eeg::Condition::Quiet) {
  const auto s = four_class_session(seed, cond, 20.0, 2);
  return std::make_shared<const bciarm::features::CommandModel>(
      bciarm::pipeline::train_session(s.samples, s.labels));
}

}  // namespace fixtures
