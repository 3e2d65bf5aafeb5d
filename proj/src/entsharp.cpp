#include "lexground/entsharp.hpp"

#include "lexground/errors.hpp"
#include "lexground/numeric.hpp"
#include "lexground/parallel.hpp"

#include <algorithm>

namespace lexground {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::entsharp: return "entsharp";
    case Provenance::untrained: return "untrained";
    case Provenance::detection: return "detection";
    case Provenance::tagger: return "tagger";
  }
  return "unknown";
}

Provenance provenance_from_string(std::string_view s) {
  if (s == "entsharp") return Provenance::entsharp;
  if (s == "untrained") return Provenance::untrained;
  if (s == "detection") return Provenance::detection;
  if (s == "tagger") return Provenance::tagger;
  throw DataError("unknown provenance \"" + std::string(s) + "\"");
}

std::optional<Eigen::Index> GroundingModel::find(std::string_view word) const {
  auto it = std::lower_bound(words.begin(), words.end(), word);
  if (it == words.end() || *it != word) return std::nullopt;
  return static_cast<Eigen::Index>(it - words.begin());
}

Eigen::MatrixXd gather_images(const CooccurrenceIndex& cooc, const FeatureTable& features) {
  Eigen::MatrixXd images(static_cast<Eigen::Index>(cooc.num_images()), features.dim());
  for (std::size_t i = 0; i < cooc.num_images(); ++i) {
    images.row(static_cast<Eigen::Index>(i)) =
        features.row(cooc.feature_rows()[i]).cast<double>();
  }
  return images;
}

GroundingModel init_centroids(const CooccurrenceIndex& cooc, const Eigen::MatrixXd& images) {
  GroundingModel model;
  model.words = cooc.words();
  model.word_vectors.resize(static_cast<Eigen::Index>(cooc.num_words()), images.cols());
  model.zero_norm.assign(cooc.num_words(), false);
  for (std::size_t w = 0; w < cooc.num_words(); ++w) {
    const auto rows = cooc.images_of(w);
    if (rows.empty()) {
      throw DataError("word \"" + cooc.words()[w] + "\" has no co-occurring images");
    }
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(images.cols());
    for (int i : rows) sum += images.row(i).transpose();
    auto normalized = l2_normalize(sum / static_cast<double>(rows.size()));
    model.word_vectors.row(static_cast<Eigen::Index>(w)) = normalized.values.transpose();
    model.zero_norm[w] = normalized.zero_norm;
  }
  model.provenance = Provenance::untrained;
  return model;
}

double mean_entropy(const Eigen::SparseMatrix<double, Eigen::RowMajor>& probabilities) {
  const Eigen::Index n = probabilities.outerSize();
  if (n == 0) return 0.0;
  const auto* outer = probabilities.outerIndexPtr();
  const double* values = probabilities.valuePtr();
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = Eigen::Map<const Eigen::VectorXd>(values + outer[i], outer[i + 1] - outer[i]);
    total += shannon_entropy(row);
  }
  return total / static_cast<double>(n);
}

MembershipState init_memberships(const CooccurrenceIndex& cooc) {
  MembershipState state;
  state.probabilities = cooc.incidence_matrix();
  state.probabilities.makeCompressed();
  for (Eigen::Index i = 0; i < state.probabilities.outerSize(); ++i) {
    const auto size = static_cast<double>(cooc.words_of(static_cast<std::size_t>(i)).size());
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(state.probabilities, i);
         it; ++it) {
      it.valueRef() = 1.0 / size;
    }
  }
  state.iteration = 0;
  state.mean_entropy = mean_entropy(state.probabilities);
  return state;
}

GroundingModel centroid_update(const MembershipState& state, const Eigen::MatrixXd& images,
                               const GroundingModel& previous) {
  const Eigen::MatrixXd sums = state.probabilities.transpose() * images;
  GroundingModel model = previous;
  model.provenance = Provenance::entsharp;
  for (Eigen::Index w = 0; w < sums.rows(); ++w) {
    auto normalized = l2_normalize(sums.row(w));
    if (normalized.zero_norm) {
      model.zero_norm[static_cast<std::size_t>(w)] = true;
      continue;
    }
    model.word_vectors.row(w) = normalized.values.transpose();
    model.zero_norm[static_cast<std::size_t>(w)] = false;
  }
  return model;
}

MembershipState membership_update(const GroundingModel& model, const Eigen::MatrixXd& images,
                                  const CooccurrenceIndex& cooc, double sharpness,
                                  std::size_t threads) {
  if (sharpness < 0.0 || !std::isfinite(sharpness)) {
    throw DataError("membership_update: sharpness must be finite and nonnegative");
  }
  MembershipState state;
  state.probabilities = cooc.incidence_matrix();
  state.probabilities.makeCompressed();

  const Eigen::VectorXd word_norms = model.word_vectors.rowwise().norm();
  const auto* outer = state.probabilities.outerIndexPtr();
  const auto* inner = state.probabilities.innerIndexPtr();
  double* values = state.probabilities.valuePtr();

  parallel_for(cooc.num_images(), threads, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double image_norm = images.row(row).norm();
    Eigen::Map<Eigen::VectorXd> scores(values + outer[row], outer[row + 1] - outer[row]);
    for (Eigen::Index k = 0; k < scores.size(); ++k) {
      const Eigen::Index w = inner[outer[row] + k];
      const double denom = image_norm * word_norms(w);
      scores(k) = denom < kNormEpsilon
                      ? 0.0
                      : images.row(row).dot(model.word_vectors.row(w)) / denom;
    }
    sharpened_softmax_inplace(scores, sharpness);
  });
  state.mean_entropy = mean_entropy(state.probabilities);
  return state;
}

GroundingModel untrained_baseline(const CooccurrenceIndex& cooc, const FeatureTable& features) {
  return init_centroids(cooc, gather_images(cooc, normalize_rows(features)));
}

TrainResult train(const CooccurrenceIndex& cooc, const FeatureTable& features,
                  const TrainOptions& options) {
  if (options.iterations < 0) throw ConfigError("iterations must be nonnegative");
  if (cooc.num_images() == 0 || cooc.num_words() == 0) {
    throw DataError("co-occurrence index is empty");
  }
  const FeatureTable normalized = normalize_rows(features);
  const Eigen::MatrixXd images = gather_images(cooc, normalized);

  TrainResult result;
  result.model = init_centroids(cooc, images);
  result.model.provenance = Provenance::entsharp;
  result.state = init_memberships(cooc);
  result.trace.initial_entropy = result.state.mean_entropy;

  for (int t = 1; t <= options.iterations; ++t) {
    GroundingModel next = centroid_update(result.state, images, result.model);
    const double displacement =
        (next.word_vectors - result.model.word_vectors).rowwise().norm().maxCoeff();
    result.model = std::move(next);
    result.model.iterations_run = t;
    result.state = membership_update(result.model, images, cooc, static_cast<double>(t),
                                     options.threads);
    result.state.iteration = t;

    TraceRecord record;
    record.iteration = t;
    record.mean_entropy = result.state.mean_entropy;
    record.max_centroid_displacement = displacement;
    for (const auto& subset : options.trace_labels) {
      const auto ids = subset.image_ids();
      record.word_auc.push_back(
          average_precision_auc(ranking_ids(rank_images(result.model, subset.word, features, ids)),
                                subset));
    }
    result.trace.records.push_back(std::move(record));
    if (options.on_iteration) options.on_iteration(t, result.model, result.state);
  }
  return result;
}

Ranking rank_images(const GroundingModel& model, std::string_view word,
                    const FeatureTable& features, std::span<const std::string> candidates) {
  const auto w = model.find(word);
  if (!w) throw DataError("word \"" + std::string(word) + "\" is not in the model vocabulary");
  if (features.dim() != model.word_vectors.cols()) {
    throw DataError("model dimension " + std::to_string(model.word_vectors.cols()) +
                    " does not match feature dimension " + std::to_string(features.dim()));
  }
  const Eigen::VectorXd word_vector = model.word_vectors.row(*w).transpose();
  Ranking ranking;
  auto score_row = [&](const std::string& id, Eigen::Index row) {
    ranking.push_back({id, cosine_similarity(features.row(row).cast<double>(), word_vector)});
  };
  if (candidates.empty()) {
    ranking.reserve(static_cast<std::size_t>(features.rows()));
    for (Eigen::Index r = 0; r < features.rows(); ++r) score_row(features.ids()[r], r);
  } else {
    ranking.reserve(candidates.size());
    for (const auto& id : candidates) {
      auto row = features.find(id);
      if (!row) throw DataError("candidate image \"" + id + "\" missing from the feature table");
      score_row(id, *row);
    }
  }
  sort_ranking(ranking);
  return ranking;
}

}  // namespace lexground
