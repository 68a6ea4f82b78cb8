#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bciarm/eeg/signal.hpp"
#include "bciarm/features/command.hpp"
#include "bciarm/features/features.hpp"

namespace bciarm::features {

inline constexpr int kModelVersion = 1;

// Nearest-centroid model in z-scored feature space. Immutable once trained.
struct CommandModel {
  struct Reference {
    Command label{Command::Push};
    std::size_t epochs{0};
    std::vector<double> centroid;  // normalized space
    std::vector<double> scale;     // per-dimension std in normalized space, floored at 1e-6
  };

  int version{kModelVersion};
  std::vector<double> norm_mean;  // per-dimension, raw feature space
  std::vector<double> norm_std;   // floored at 1e-6
  std::vector<Reference> references;  // ascending label code

  bool trained() const { return references.size() >= 2; }
  std::size_t dims() const { return norm_mean.size(); }
};

struct Prediction {
  Command label{Command::Push};
  double confidence{0.0};
  std::vector<double> distances;  // parallel to model.references
};

using LabeledFeatures = std::pair<FeatureVector, Command>;
using LabeledEpoch = std::pair<eeg::EegEpoch, Command>;

// `required` lists labels that must receive at least one sample; any that
// did not are named in the DomainError. Fewer than two distinct labels is
// also an error.
CommandModel train(std::span<const LabeledFeatures> samples, std::span<const Command> required = {});
CommandModel train(std::span<const LabeledEpoch> epochs, std::span<const Command> required = {});

// Euclidean nearest centroid; confidence is the softmin weight of the winner,
// exp(-d_best) / sum_l exp(-d_l). Ties go to the lower label code.
Prediction classify(const CommandModel& model, std::span<const double> fv);
inline Prediction classify(const CommandModel& model, const FeatureVector& fv) {
  return classify(model, std::span<const double>(fv.values));
}

// Versioned JSON. Serialization is deterministic: equal models give equal bytes.
std::string model_to_json(const CommandModel& model);
CommandModel model_from_json(std::string_view json);
void save_model(const std::filesystem::path& path, const CommandModel& model);
// Throws IoError("model not found: ...") for a missing file.
CommandModel load_model(const std::filesystem::path& path);

}  // namespace bciarm::features
