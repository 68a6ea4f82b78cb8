#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bciarm/features/command.hpp"

namespace bciarm::eeg {

// One labelled training interval, [start_t, end_t] in session seconds.
struct LabelInterval {
  double start_t{0.0};
  double end_t{0.0};
  Command label{Command::Push};
};

// Label track lines: `start_t,end_t,label`; '#' comments allowed.
std::vector<LabelInterval> parse_labels(std::string_view text);
std::vector<LabelInterval> load_labels(const std::filesystem::path& path);
std::string format_labels(std::span<const LabelInterval> labels);
void save_labels(const std::filesystem::path& path, std::span<const LabelInterval> labels);

}  // namespace bciarm::eeg
