#pragma once

#include "lexground/corpus.hpp"
#include "lexground/eval.hpp"
#include "lexground/feature_table.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lexground {

enum class Provenance { entsharp, untrained, detection, tagger };

std::string_view to_string(Provenance p);
Provenance provenance_from_string(std::string_view s);

/// One unit vector per word in image-feature space. Rows follow `words`,
/// which is sorted lexicographically.
struct GroundingModel {
  std::vector<std::string> words;
  Eigen::MatrixXd word_vectors;
  std::vector<bool> zero_norm;  // rows that could not be normalized
  Provenance provenance = Provenance::untrained;
  int iterations_run = 0;

  std::optional<Eigen::Index> find(std::string_view word) const;
};

/// Per-image distributions over co-occurring words. The sparsity pattern of
/// `probabilities` is exactly the co-occurrence incidence.
struct MembershipState {
  Eigen::SparseMatrix<double, Eigen::RowMajor> probabilities;
  int iteration = 0;
  double mean_entropy = 0.0;  // nats
};

/// Feature rows of the indexed images, in index order, widened to double.
Eigen::MatrixXd gather_images(const CooccurrenceIndex& cooc, const FeatureTable& features);

/// Word vector = l2_normalize(mean of co-occurring image rows).
GroundingModel init_centroids(const CooccurrenceIndex& cooc, const Eigen::MatrixXd& images);

/// Uniform over each image's co-occurring words.
MembershipState init_memberships(const CooccurrenceIndex& cooc);

/// w := normalize(sum_i p_i(w) * image_i). Words whose weighted sum has
/// near-zero norm keep the row from `previous` and are flagged.
GroundingModel centroid_update(const MembershipState& state, const Eigen::MatrixXd& images,
                               const GroundingModel& previous);

/// p_i(w) ∝ 1[i,w] exp(sharpness * cos(image_i, w)).
MembershipState membership_update(const GroundingModel& model, const Eigen::MatrixXd& images,
                                  const CooccurrenceIndex& cooc, double sharpness,
                                  std::size_t threads = 1);

double mean_entropy(const Eigen::SparseMatrix<double, Eigen::RowMajor>& probabilities);

struct TraceRecord {
  int iteration = 0;
  double mean_entropy = 0.0;
  double max_centroid_displacement = 0.0;
  std::vector<double> word_auc;  // aligned with TrainOptions::trace_labels
};

struct TrainTrace {
  double initial_entropy = 0.0;  // entropy of the uniform initial memberships
  std::vector<TraceRecord> records;
};

struct TrainOptions {
  int iterations = 100;
  std::size_t threads = 1;
  /// When non-empty, each trace record carries the PR-AUC of every subset.
  std::vector<LabeledSubset> trace_labels;
  /// Called after each iteration with the updated model and memberships.
  std::function<void(int, const GroundingModel&, const MembershipState&)> on_iteration;
};

struct TrainResult {
  GroundingModel model;
  MembershipState state;
  TrainTrace trace;
};

/// Averaging baseline: init_centroids over L2-normalized image features.
GroundingModel untrained_baseline(const CooccurrenceIndex& cooc, const FeatureTable& features);

/// Sharpened soft clustering. Image features are L2-normalized once, then
/// for t = 1..iterations centroids are recomputed from the memberships and
/// memberships from the centroids with sharpness t.
TrainResult train(const CooccurrenceIndex& cooc, const FeatureTable& features,
                  const TrainOptions& options = {});

/// Cosine ranking of `candidates` (all feature rows when empty) for `word`.
Ranking rank_images(const GroundingModel& model, std::string_view word,
                    const FeatureTable& features, std::span<const std::string> candidates = {});

}  // namespace lexground
