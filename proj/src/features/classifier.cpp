#include "bciarm/features/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "bciarm/error.hpp"

namespace bciarm::features {

namespace {

constexpr double kScaleFloor = 1e-6;
constexpr std::string_view kFormat = "bci-arm-model";

using json = nlohmann::json;

}  // namespace

CommandModel train(std::span<const LabeledFeatures> samples, std::span<const Command> required) {
  std::map<int, std::vector<const FeatureVector*>> by_label;
  for (const auto& [fv, label] : samples) by_label[code(label)].push_back(&fv);

  std::string missing;
  for (Command c : required) {
    if (!by_label.contains(code(c))) {
      if (!missing.empty()) missing += ", ";
      missing += name(c);
    }
  }
  if (!missing.empty()) throw DomainError("no training epochs for label(s): " + missing);
  if (by_label.size() < 2) throw DomainError("training needs at least two labels");

  CommandModel model;
  const std::size_t dims = kFeatureDims;
  const double n = static_cast<double>(samples.size());
  model.norm_mean.assign(dims, 0.0);
  model.norm_std.assign(dims, 0.0);
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < dims; ++i) model.norm_mean[i] += s.first.values[i];
  }
  for (double& m : model.norm_mean) m /= n;
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < dims; ++i) {
      const double dev = s.first.values[i] - model.norm_mean[i];
      model.norm_std[i] += dev * dev;
    }
  }
  for (double& sd : model.norm_std) sd = std::max(std::sqrt(sd / n), kScaleFloor);

  for (const auto& [label_code, vectors] : by_label) {
    CommandModel::Reference ref;
    ref.label = *command_from_code(label_code);
    ref.epochs = vectors.size();
    ref.centroid.assign(dims, 0.0);
    ref.scale.assign(dims, 0.0);
    const double m = static_cast<double>(vectors.size());
    std::vector<std::vector<double>> z;
    z.reserve(vectors.size());
    for (const FeatureVector* fv : vectors) {
      std::vector<double> row(dims);
      for (std::size_t i = 0; i < dims; ++i) row[i] = (fv->values[i] - model.norm_mean[i]) / model.norm_std[i];
      for (std::size_t i = 0; i < dims; ++i) ref.centroid[i] += row[i];
      z.push_back(std::move(row));
    }
    for (double& v : ref.centroid) v /= m;
    for (const auto& row : z) {
      for (std::size_t i = 0; i < dims; ++i) {
        const double dev = row[i] - ref.centroid[i];
        ref.scale[i] += dev * dev;
      }
    }
    for (double& sd : ref.scale) sd = std::max(std::sqrt(sd / m), kScaleFloor);
    model.references.push_back(std::move(ref));
  }
  return model;
}

CommandModel train(std::span<const LabeledEpoch> epochs, std::span<const Command> required) {
  std::vector<LabeledFeatures> samples;
  samples.reserve(epochs.size());
  for (const auto& [epoch, label] : epochs) samples.emplace_back(extract_features(epoch), label);
  return train(std::span<const LabeledFeatures>(samples), required);
}

Prediction classify(const CommandModel& model, std::span<const double> fv) {
  if (!model.trained()) throw DomainError("model is not trained");
  if (fv.size() != model.dims()) {
    throw DomainError("feature dimension " + std::to_string(fv.size()) + " does not match model dimension " +
                      std::to_string(model.dims()));
  }
  std::vector<double> z(fv.size());
  for (std::size_t i = 0; i < fv.size(); ++i) z[i] = (fv[i] - model.norm_mean[i]) / model.norm_std[i];

  Prediction p;
  p.distances.reserve(model.references.size());
  std::size_t best = 0;
  for (std::size_t r = 0; r < model.references.size(); ++r) {
    double sum = 0.0;
    const auto& c = model.references[r].centroid;
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double d = z[i] - c[i];
      sum += d * d;
    }
    p.distances.push_back(std::sqrt(sum));
    if (p.distances[r] < p.distances[best]) best = r;
  }
  double denom = 0.0;
  for (double d : p.distances) denom += std::exp(-(d - p.distances[best]));
  p.label = model.references[best].label;
  p.confidence = 1.0 / denom;
  return p;
}

std::string model_to_json(const CommandModel& model) {
  json j;
  j["format"] = kFormat;
  j["version"] = model.version;
  j["dims"] = model.dims();
  j["norm_mean"] = model.norm_mean;
  j["norm_std"] = model.norm_std;
  json refs = json::array();
  for (const auto& r : model.references) {
    refs.push_back({{"label", name(r.label)},
                    {"code", code(r.label)},
                    {"source", name(source_of(r.label))},
                    {"epochs", r.epochs},
                    {"centroid", r.centroid},
                    {"scale", r.scale}});
  }
  j["references"] = std::move(refs);
  return j.dump(1) + "\n";
}

CommandModel model_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError(std::string("model is not valid JSON: ") + e.what());
  }
  try {
    if (j.value("format", std::string{}) != kFormat) throw IoError("not a bci-arm model file");
    const int version = j.at("version").get<int>();
    if (version != kModelVersion) throw IoError("unsupported model version " + std::to_string(version));
    CommandModel m;
    m.version = version;
    m.norm_mean = j.at("norm_mean").get<std::vector<double>>();
    m.norm_std = j.at("norm_std").get<std::vector<double>>();
    const auto dims = j.at("dims").get<std::size_t>();
    if (m.norm_mean.size() != dims || m.norm_std.size() != dims) throw IoError("model normalization size mismatch");
    for (const auto& r : j.at("references")) {
      CommandModel::Reference ref;
      const auto label = command_from_code(r.at("code").get<int>());
      if (!label) throw IoError("model references unknown label code");
      ref.label = *label;
      ref.epochs = r.at("epochs").get<std::size_t>();
      ref.centroid = r.at("centroid").get<std::vector<double>>();
      ref.scale = r.at("scale").get<std::vector<double>>();
      if (ref.centroid.size() != dims || ref.scale.size() != dims) throw IoError("model centroid size mismatch");
      m.references.push_back(std::move(ref));
    }
    std::sort(m.references.begin(), m.references.end(),
              [](const auto& a, const auto& b) { return code(a.label) < code(b.label); });
    return m;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const CommandModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write model: " + path.string());
  out << model_to_json(model);
  if (!out) throw IoError("write failed: " + path.string());
}

CommandModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("model not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace bciarm::features
