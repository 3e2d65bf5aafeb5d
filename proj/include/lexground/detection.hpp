#pragma once

#include "lexground/eval.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lexground {

/// Pretrained word embeddings with a deterministic random fallback for
/// out-of-table words.
class WordVectorTable {
 public:
  WordVectorTable() = default;
  WordVectorTable(Eigen::Index dim, std::uint64_t fallback_seed)
      : dim_(dim), fallback_seed_(fallback_seed) {}

  /// Throws DataError on dimension mismatch or non-finite entries.
  void add(const std::string& word, Eigen::VectorXd vector);

  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }
  std::uint64_t fallback_seed() const { return fallback_seed_; }
  void set_fallback_seed(std::uint64_t seed) { fallback_seed_ = seed; }

  bool contains(const std::string& word) const { return vectors_.count(word) != 0; }
  /// Table vector, or nullptr when the word is absent.
  const Eigen::VectorXd* find(const std::string& word) const;

  /// Table vector, else a standard Gaussian vector seeded by (word, seed).
  Eigen::VectorXd lookup(const std::string& word) const;
  Eigen::VectorXd fallback(const std::string& word) const;

  /// Words in sorted order (for deterministic serialization).
  std::vector<std::string> sorted_words() const;

 private:
  Eigen::Index dim_ = 0;
  std::uint64_t fallback_seed_ = 0;
  std::unordered_map<std::string, Eigen::VectorXd> vectors_;
};

/// Text format: `word v1 ... vd` per line; a leading "<count> <dim>" line is
/// detected and skipped.
WordVectorTable load_word_vectors(const std::filesystem::path& path, std::uint64_t fallback_seed);
void save_word_vectors(const WordVectorTable& table, const std::filesystem::path& path);

using Prediction = std::pair<std::string, double>;  // (class label, confidence)

/// Top class predictions of an external image classifier, per image.
struct DetectionTable {
  std::map<std::string, std::vector<Prediction>> predictions;
};

/// JSONL {"image_id", "predictions": [[label, confidence], ...]}. Confidences
/// must be non-increasing and every row must hold >= `min_predictions`.
DetectionTable load_detections(const std::filesystem::path& path,
                               std::size_t min_predictions = 20);
void save_detections(const DetectionTable& table, const std::filesystem::path& path);

/// Vector of a class label: underscore-separated parts are looked up
/// separately (with fallback) and averaged.
Eigen::VectorXd label_vector(const std::string& label, const WordVectorTable& wv);

/// Mean of the label vectors of the top-K predictions. K in [1, 20].
Eigen::VectorXd detection_image_vector(std::span<const Prediction> predictions,
                                       const WordVectorTable& wv, int k);

using ImageVectors = std::map<std::string, Eigen::VectorXd>;

ImageVectors detection_image_vectors(const DetectionTable& detections, const WordVectorTable& wv,
                                     int k);

/// Cosine ranking of image vectors against the (possibly fallback) word vector.
/// `candidates` empty means every image in `image_vectors`.
Ranking detection_rank(const std::string& word, const WordVectorTable& wv,
                       const ImageVectors& image_vectors,
                       std::span<const std::string> candidates = {});

struct KSelection {
  int best_k = 1;
  std::vector<std::pair<int, double>> mean_auc;  // (K, mean AP over words)
};

/// Sweeps K over [k_min, k_max] and keeps the K with the highest mean AP
/// over the labeled words; ties go to the smallest K.
KSelection select_detection_k(const WordVectorTable& wv, const DetectionTable& detections,
                              std::span<const LabeledSubset> labeled, int k_min = 1,
                              int k_max = 20);

}  // namespace lexground
