#pragma once

#include "lexground/detection.hpp"
#include "lexground/entsharp.hpp"
#include "lexground/eval.hpp"
#include "lexground/feature_table.hpp"
#include "lexground/tagger.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace lexground {

/// Seeded projection applied to image features before training.
struct ProjectionInfo {
  Eigen::Index input_dim = 0;
  Eigen::Index output_dim = 0;
  std::uint64_t seed = 0;
};

/// Detection baseline: word vectors for the vocabulary plus the averaged
/// detection vector of every image.
struct DetectionModel {
  std::vector<std::string> words;
  Eigen::MatrixXd word_vectors;
  int k = 1;
  std::uint64_t fallback_seed = 0;
  std::vector<std::string> image_ids;
  Eigen::MatrixXd image_vectors;
};

using AnyModel = std::variant<GroundingModel, DetectionModel, TaggerModel>;

struct ModelFile {
  AnyModel model;
  std::optional<ProjectionInfo> projection;
  std::string config_hash;
  std::uint64_t seed = 0;
};

/// One JSON header line, then "FTBL" blocks holding the numeric payload.
void save_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

/// Short method label: entsharp, untrained, detection, softmax, multinomial.
std::string method_name(const ModelFile& file);

/// Ranker over `features` (ignored by detection models). Grounding models
/// re-apply their recorded projection first.
Ranker make_ranker(const ModelFile& file, const FeatureTable* features);

}  // namespace lexground
